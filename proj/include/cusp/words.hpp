#pragma once

// Free-group word arithmetic: the vertices of the Cayley tree and the
// operations every other module is built from.
//
// A generator x_i is encoded as letter 2*i, its inverse as 2*i+1, so
// inv(l) == l^1 and the letter order a < A < b < B < ... doubles as the
// lexicographic order used by shortlex everywhere. Textual form pairs
// lowercase/uppercase: a/A, b/B, ... and "1" denotes the identity.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cusp/errors.hpp"
#include "cusp/rational.hpp"

namespace cusp {

using Letter = std::uint8_t;

constexpr int kMaxRank = 26;

inline Letter inv(Letter l) { return l ^ 1u; }
inline bool is_inverse_letter(Letter l) { return l & 1u; }
inline int generator_index(Letter l) { return l >> 1; }

inline char letter_to_char(Letter l) {
  return static_cast<char>((is_inverse_letter(l) ? 'A' : 'a') + generator_index(l));
}

inline Letter char_to_letter(char c, int rank) {
  if (c >= 'a' && c < 'a' + rank) return static_cast<Letter>(2 * (c - 'a'));
  if (c >= 'A' && c < 'A' + rank) return static_cast<Letter>(2 * (c - 'A') + 1);
  throw Error(ErrorCode::UnknownLetter,
              std::string("letter '") + c + "' outside rank-" + std::to_string(rank) + " alphabet");
}

/// Freely reduced word; empty = identity. Ordering is shortlex.
struct ReducedWord {
  std::vector<Letter> letters;

  bool empty() const { return letters.empty(); }
  int size() const { return static_cast<int>(letters.size()); }
  Letter front() const { return letters.front(); }
  Letter back() const { return letters.back(); }

  friend bool operator==(const ReducedWord& a, const ReducedWord& b) = default;
  friend bool operator<(const ReducedWord& a, const ReducedWord& b) {
    if (a.letters.size() != b.letters.size()) return a.letters.size() < b.letters.size();
    return a.letters < b.letters;
  }
};

struct WordHash {
  std::size_t operator()(const ReducedWord& w) const {
    std::size_t h = 1469598103934665603ull;
    for (Letter l : w.letters) h = (h ^ l) * 1099511628211ull;
    return h;
  }
};

inline ReducedWord identity_word() { return {}; }

/// Free reduction of an arbitrary letter sequence: unique normal form, idempotent.
inline ReducedWord reduce(std::span<const Letter> raw) {
  ReducedWord out;
  out.letters.reserve(raw.size());
  for (Letter l : raw) {
    if (!out.letters.empty() && out.letters.back() == inv(l))
      out.letters.pop_back();
    else
      out.letters.push_back(l);
  }
  return out;
}

inline ReducedWord reduce(const std::vector<Letter>& raw) {
  return reduce(std::span<const Letter>(raw));
}

inline ReducedWord inverse(const ReducedWord& w) {
  ReducedWord out;
  out.letters.reserve(w.letters.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out.letters.push_back(inv(*it));
  return out;
}

inline ReducedWord multiply(const ReducedWord& x, const ReducedWord& y) {
  ReducedWord out = x;
  for (Letter l : y.letters) {
    if (!out.letters.empty() && out.letters.back() == inv(l))
      out.letters.pop_back();
    else
      out.letters.push_back(l);
  }
  return out;
}

inline ReducedWord word_letter(Letter l) {
  ReducedWord w;
  w.letters.push_back(l);
  return w;
}

inline ReducedWord prefix(const ReducedWord& w, int n) {
  ReducedWord out;
  out.letters.assign(w.letters.begin(), w.letters.begin() + std::min<int>(n, w.size()));
  return out;
}

inline int common_prefix_length(const ReducedWord& x, const ReducedWord& y) {
  int n = std::min(x.size(), y.size());
  int i = 0;
  while (i < n && x.letters[i] == y.letters[i]) ++i;
  return i;
}

/// Word metric on the Cayley tree: |x^-1 y|. Both arguments reduced, so the
/// only cancellation in x^-1 y is the common prefix.
inline int distance(const ReducedWord& x, const ReducedWord& y) {
  return x.size() + y.size() - 2 * common_prefix_length(x, y);
}

/// (x|y)_base = (d(base,x) + d(base,y) - d(x,y)) / 2; in the tree this is the
/// length of the longest common prefix of base^-1 x and base^-1 y.
inline Rational gromov_product(const ReducedWord& x, const ReducedWord& y,
                               const ReducedWord& base) {
  return Rational(distance(base, x) + distance(base, y) - distance(x, y), 2);
}

inline bool is_cyclically_reduced(const ReducedWord& w) {
  return w.empty() || w.front() != inv(w.back());
}

// ---- text form ----

inline std::string format_word(const ReducedWord& w) {
  if (w.empty()) return "1";
  std::string s;
  s.reserve(w.letters.size());
  for (Letter l : w.letters) s.push_back(letter_to_char(l));
  return s;
}

inline ReducedWord parse_word(const std::string& text, int rank) {
  if (text == "1") return identity_word();
  std::vector<Letter> raw;
  raw.reserve(text.size());
  for (char c : text) raw.push_back(char_to_letter(c, rank));
  return reduce(raw);
}

// ---- sphere / ball enumeration ----

inline std::uint64_t sphere_size(int rank, int n) {
  if (n == 0) return 1;
  std::uint64_t s = 2 * static_cast<std::uint64_t>(rank);
  for (int k = 1; k < n; ++k) s *= 2 * rank - 1;
  return s;
}

inline std::uint64_t ball_size(int rank, int radius) {
  std::uint64_t total = 0;
  for (int k = 0; k <= radius; ++k) total += sphere_size(rank, k);
  return total;
}

/// All reduced words of length exactly n, in shortlex order.
inline std::vector<ReducedWord> sphere_words(int rank, int n) {
  std::vector<ReducedWord> cur{identity_word()};
  for (int k = 0; k < n; ++k) {
    std::vector<ReducedWord> next;
    next.reserve(cur.size() * (2 * rank - 1) + 2);
    for (const auto& w : cur) {
      for (Letter l = 0; l < 2 * rank; ++l) {
        if (!w.empty() && w.back() == inv(l)) continue;
        ReducedWord e = w;
        e.letters.push_back(l);
        next.push_back(std::move(e));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

/// All reduced words of length <= radius, shortlex order.
inline std::vector<ReducedWord> ball_words(int rank, int radius) {
  std::vector<ReducedWord> out{identity_word()};
  std::vector<ReducedWord> layer{identity_word()};
  for (int k = 0; k < radius; ++k) {
    std::vector<ReducedWord> next;
    for (const auto& w : layer) {
      for (Letter l = 0; l < 2 * rank; ++l) {
        if (!w.empty() && w.back() == inv(l)) continue;
        ReducedWord e = w;
        e.letters.push_back(l);
        next.push_back(std::move(e));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

// ---- group spec ----

/// The ambient group: a free group of the given rank with its tree Cayley
/// graph (delta = 0). delta is carried for the generic-backend estimates.
struct GroupSpec {
  int rank = 2;
  Rational delta = Rational(0);

  void validate() const {
    if (rank < 2 || rank > kMaxRank)
      throw Error(ErrorCode::ValidationError,
                  "rank must be between 2 and " + std::to_string(kMaxRank) + ", got " +
                      std::to_string(rank));
    if (delta < Rational(0))
      throw Error(ErrorCode::ValidationError, "delta must be non-negative");
  }

  // The free tree backend is exactly 0-hyperbolic; every module that walks
  // the tree insists on it.
  void require_tree() const {
    validate();
    if (!(delta == Rational(0)))
      throw Error(ErrorCode::ValidationError, "free Cayley tree backend requires delta = 0");
  }
};

}  // namespace cusp
