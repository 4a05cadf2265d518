#pragma once

// Exact decision of almost malnormality via fiber products of core graphs,
// and the finite-scale coset-intersection diameter experiment.

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cusp/ball.hpp"
#include "cusp/stallings.hpp"
#include "cusp/words.hpp"

namespace cusp {

/// Connected piece of the product automaton of two core graphs. A first
/// Betti number >= 1 means the two subgroups share a conjugate: the loops of
/// the component read words lying in p1^-1 H1 p1 and p2^-1 H2 p2 at once.
struct FiberComponent {
  std::vector<std::pair<int, int>> vertices;  // trimmed to the cyclic core
  bool contains_basepair = false;
  int first_betti = 0;
  std::pair<int, int> root{-1, -1};           // least vertex pair, BFS origin
  std::optional<ReducedWord> cycle_word;      // a nontrivial loop at root, if betti >= 1
};

inline std::vector<FiberComponent> fiber_product(const CoreGraph& c1, const CoreGraph& c2) {
  if (c1.rank != c2.rank) throw Error(ErrorCode::ValidationError, "rank mismatch");
  int R2 = 2 * c1.rank;
  int n1 = c1.n(), n2 = c2.n();
  auto id = [&](int v1, int v2) { return v1 * n2 + v2; };
  auto stepable = [&](int v1, int v2, int l) {
    return c1.next[v1][l] >= 0 && c2.next[v2][l] >= 0;
  };

  // Trim to the cyclic cores first: vertices of synchronized degree <= 1
  // cannot lie on a loop.
  std::vector<char> alive(static_cast<std::size_t>(n1) * n2, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v1 = 0; v1 < n1; ++v1)
      for (int v2 = 0; v2 < n2; ++v2) {
        if (!alive[id(v1, v2)]) continue;
        int deg = 0;
        for (int l = 0; l < R2; ++l)
          if (stepable(v1, v2, l) && alive[id(c1.next[v1][l], c2.next[v2][l])]) ++deg;
        if (deg <= 1) {
          alive[id(v1, v2)] = 0;
          changed = true;
        }
      }
  }

  std::vector<int> comp(static_cast<std::size_t>(n1) * n2, -1);
  std::vector<FiberComponent> out;
  for (int v1 = 0; v1 < n1; ++v1)
    for (int v2 = 0; v2 < n2; ++v2) {
      if (!alive[id(v1, v2)] || comp[id(v1, v2)] >= 0) continue;
      FiberComponent fc;
      fc.root = {v1, v2};
      int ci = static_cast<int>(out.size());
      // BFS in letter order; remember parents for the spanning tree.
      std::map<std::pair<int, int>, std::pair<std::pair<int, int>, Letter>> parent;
      std::queue<std::pair<int, int>> q;
      comp[id(v1, v2)] = ci;
      q.push({v1, v2});
      std::uint64_t degree_sum = 0;
      std::optional<std::tuple<std::pair<int, int>, Letter, std::pair<int, int>>> chord;
      while (!q.empty()) {
        auto [u1, u2] = q.front();
        q.pop();
        fc.vertices.push_back({u1, u2});
        if (u1 == c1.base && u2 == c2.base) fc.contains_basepair = true;
        for (int l = 0; l < R2; ++l) {
          if (!stepable(u1, u2, l)) continue;
          std::pair<int, int> t{c1.next[u1][l], c2.next[u2][l]};
          if (!alive[id(t.first, t.second)]) continue;
          ++degree_sum;
          if (comp[id(t.first, t.second)] < 0) {
            comp[id(t.first, t.second)] = ci;
            parent[t] = {{u1, u2}, static_cast<Letter>(l)};
            q.push(t);
          } else if (!chord) {
            // Revisited vertex: candidate chord, unless this is the reverse
            // of the tree edge or of an earlier traversal.
            auto pit = parent.find({u1, u2});
            bool is_tree_reverse = pit != parent.end() && pit->second.first == t &&
                                   pit->second.second == inv(static_cast<Letter>(l));
            if (!is_tree_reverse) chord = {{u1, u2}, static_cast<Letter>(l), t};
          }
        }
      }
      int V = static_cast<int>(fc.vertices.size());
      int E = static_cast<int>(degree_sum / 2);
      fc.first_betti = E - V + 1;
      if (fc.first_betti >= 1) {
        if (!chord) throw Error(ErrorCode::Internal, "betti >= 1 but no chord found");
        auto tree_path = [&](std::pair<int, int> v) {
          ReducedWord w;
          while (v != fc.root) {
            auto [p, l] = parent.at(v);
            w.letters.push_back(l);
            v = p;
          }
          std::reverse(w.letters.begin(), w.letters.end());
          return w;
        };
        auto [from, l, to] = *chord;
        ReducedWord loop = tree_path(from);
        loop.letters.push_back(l);
        loop = multiply(loop, inverse(tree_path(to)));
        if (loop.empty()) throw Error(ErrorCode::Internal, "chord produced a trivial loop");
        fc.cycle_word = loop;
      }
      std::sort(fc.vertices.begin(), fc.vertices.end());
      fc.root = fc.vertices.front();
      out.push_back(std::move(fc));
    }
  return out;
}

struct MalnormalityWitness {
  ReducedWord g;
  int i = 0;
  int j = 0;
  ReducedWord element;  // nontrivial, in H_i and in g^-1 H_j g
};

struct MalnormalityCertificate {
  bool verdict = true;
  std::optional<MalnormalityWitness> witness;
};

/// Decides whether {H_i} is an (almost) malnormal collection. In a free
/// group every nontrivial subgroup is torsion-free, so "infinite
/// intersection" and "nontrivial intersection" coincide. Negative verdicts
/// carry a checkable witness.
inline MalnormalityCertificate is_almost_malnormal(const SubgroupCollection& coll) {
  if (coll.size() == 0) throw Error(ErrorCode::EmptyCollection, "no subgroups given");
  for (int i = 0; i < coll.size(); ++i)
    for (int j = 0; j < coll.size(); ++j) {
      auto comps = fiber_product(coll.cores[i], coll.cores[j]);
      for (const auto& fc : comps) {
        if (fc.first_betti < 1) continue;
        if (i == j && fc.contains_basepair) continue;  // diagonal component: the g in H_i case
        // The loop word ell at root = (v1, v2) lies in p1^-1 H_i p1 and in
        // p2^-1 H_j p2 for the basepoint paths p_k, so h = p1 ell p1^-1 is a
        // nontrivial element of H_i and g = p2 p1^-1 conjugates it into H_j.
        // Off-diagonal roots give g outside H_i (distinct core vertices mean
        // distinct cosets).
        const CoreGraph& A = coll.cores[i];
        const CoreGraph& B = coll.cores[j];
        ReducedWord ell = *fc.cycle_word;
        ReducedWord p1 = A.vertex_word[fc.root.first];
        ReducedWord p2 = B.vertex_word[fc.root.second];
        MalnormalityWitness w;
        w.i = i;
        w.j = j;
        w.element = multiply(multiply(p1, ell), inverse(p1));
        w.g = multiply(p2, inverse(p1));
        if (w.element.empty() || !membership(A, w.element) ||
            !membership(B, multiply(multiply(w.g, w.element), inverse(w.g))) ||
            (i == j && membership(A, w.g)))
          throw Error(ErrorCode::Internal, "malnormality witness failed verification");
        return MalnormalityCertificate{false, w};
      }
    }
  return MalnormalityCertificate{true, std::nullopt};
}

// ---- coset intersection diameters (the bounded-coset-intersection experiment) ----

/// Vertices within distance R of the coset g*H, truncated to the ball of
/// radius ball_radius, enumerated exactly via the subgroup's elements.
/// Every w with |w| <= ball_radius and d(w, gh) <= R needs |gh| <= ball_radius + R,
/// so the element sweep below is complete. `elements` may carry a precomputed
/// list covering word length >= |g_rep| + ball_radius + R.
inline std::vector<ReducedWord> coset_neighborhood(const CoreGraph& core, const ReducedWord& g_rep,
                                                   int R, int ball_radius,
                                                   const std::vector<ReducedWord>* elements = nullptr) {
  std::unordered_set<ReducedWord, WordHash> seen;
  std::vector<ReducedWord> local;
  if (!elements) {
    local = subgroup_elements(core, g_rep.size() + ball_radius + R);
    elements = &local;
  }
  std::vector<ReducedWord> fringe = ball_words(core.rank, R);
  auto sweep = [&](const ReducedWord& h) {
    ReducedWord v = multiply(g_rep, h);
    if (v.size() > ball_radius + R) return;
    for (const auto& z : fringe) {
      ReducedWord w = multiply(v, z);
      if (w.size() <= ball_radius) seen.insert(std::move(w));
    }
  };
  sweep(identity_word());
  for (const auto& h : *elements) sweep(h);
  std::vector<ReducedWord> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

/// diam{ w : |w| <= ball_radius, d(w, c1) <= R, d(w, c2) <= R }, or nullopt
/// when that set is empty. The two cosets must be distinct: for equal cosets
/// the bound is vacuous and the truncated value would be a ball artifact.
inline std::optional<int> coset_intersection_diameter(const SubgroupCollection& coll,
                                                      const CosetRef& c1, const CosetRef& c2,
                                                      int R, int ball_radius) {
  if (R < 0 || ball_radius < R)
    throw Error(ErrorCode::ValidationError, "need 0 <= R <= ball_radius");
  if (c1 == c2)
    throw Error(ErrorCode::CosetEqual,
                "cosets coincide: " + coset_to_string(coll, c1));
  auto n1 = coset_neighborhood(coll.cores[c1.subgroup], c1.rep, R, ball_radius);
  auto n2 = coset_neighborhood(coll.cores[c2.subgroup], c2.rep, R, ball_radius);
  std::vector<ReducedWord> common;
  std::set_intersection(n1.begin(), n1.end(), n2.begin(), n2.end(), std::back_inserter(common));
  if (common.empty()) return std::nullopt;
  int diam = 0;
  for (std::size_t a = 0; a < common.size(); ++a)
    for (std::size_t b = a + 1; b < common.size(); ++b)
      diam = std::max(diam, distance(common[a], common[b]));
  return diam;
}

struct BciSample {
  CosetRef c1, c2;
  std::optional<int> diameter;
};

struct BciReport {
  int R = 0;
  int ball_radius = 0;
  std::vector<BciSample> samples;
  int D_emp = 1;  // strictly above every observed diameter
};

/// Sweep all distinct coset pairs with canonical representatives of length
/// <= ball_radius - R (capped, in a ball-radius-stable deterministic order)
/// and record the empirical diameter bound D_emp.
inline BciReport run_bci(const SubgroupCollection& coll, int R, int ball_radius,
                         const Caps& caps = Caps{}) {
  if (coll.size() == 0) {
    return BciReport{R, ball_radius, {}, 1};
  }
  BciReport rep;
  rep.R = R;
  rep.ball_radius = ball_radius;
  std::vector<CosetRef> cosets;
  int L = std::max(0, ball_radius - R);
  for (int i = 0; i < coll.size(); ++i)
    for (const auto& r : cosets_up_to(coll.cores[i], L)) cosets.push_back(CosetRef{i, r});

  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < static_cast<int>(cosets.size()); ++a)
    for (int b = a + 1; b < static_cast<int>(cosets.size()); ++b) pairs.push_back({a, b});
  // Short pairs first so the capped sample is the same prefix for every
  // ball radius; ties broken shortlex.
  std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& p, const auto& q) {
    int lp = cosets[p.first].rep.size() + cosets[p.second].rep.size();
    int lq = cosets[q.first].rep.size() + cosets[q.second].rep.size();
    if (lp != lq) return lp < lq;
    if (!(cosets[p.first] == cosets[q.first])) return cosets[p.first] < cosets[q.first];
    return cosets[p.second] < cosets[q.second];
  });
  if (pairs.size() > caps.bci_pairs) pairs.resize(caps.bci_pairs);

  // Element lists are shared across every pair touching the same subgroup.
  std::vector<std::vector<ReducedWord>> elems(coll.size());
  for (int i = 0; i < coll.size(); ++i)
    elems[i] = subgroup_elements(coll.cores[i], L + ball_radius + R);

  int max_diam = 0;
  for (auto [a, b] : pairs) {
    BciSample s;
    s.c1 = cosets[a];
    s.c2 = cosets[b];
    auto n1 = coset_neighborhood(coll.cores[s.c1.subgroup], s.c1.rep, R, ball_radius,
                                 &elems[s.c1.subgroup]);
    auto n2 = coset_neighborhood(coll.cores[s.c2.subgroup], s.c2.rep, R, ball_radius,
                                 &elems[s.c2.subgroup]);
    std::vector<ReducedWord> common;
    std::set_intersection(n1.begin(), n1.end(), n2.begin(), n2.end(), std::back_inserter(common));
    if (!common.empty()) {
      int diam = 0;
      for (std::size_t u = 0; u < common.size(); ++u)
        for (std::size_t v = u + 1; v < common.size(); ++v)
          diam = std::max(diam, distance(common[u], common[v]));
      s.diameter = diam;
      max_diam = std::max(max_diam, diam);
    }
    rep.samples.push_back(std::move(s));
  }
  rep.D_emp = max_diam + 1;
  return rep;
}

}  // namespace cusp
