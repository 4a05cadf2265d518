#pragma once

// Folded core graphs of finitely generated subgroups of a free group:
// membership, canonical coset representatives, the quasiconvexity constant,
// and limit-set prefix queries. The core graph is the partial deterministic
// automaton whose basepoint loops spell exactly the subgroup.

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cusp/errors.hpp"
#include "cusp/union_find.hpp"
#include "cusp/words.hpp"

namespace cusp {

struct CoreGraph {
  int rank = 2;
  int base = 0;
  // next[v][l] = target of the l-labeled edge out of v, or -1. Folded:
  // deterministic; inverse letters give the reverse edge.
  std::vector<std::vector<int>> next;
  int lambda = 0;          // basepoint eccentricity; the quasiconvexity constant
  bool proper = true;      // infinite index (complete automata are rejected at fold time)
  bool finite_index = false;
  std::vector<int> dist_to_base;
  std::vector<ReducedWord> vertex_word;  // shortlex-least word reading base -> v
  // extends[v][l]: the edge v --l--> next[v][l] lies on an infinite reduced ray.
  std::vector<std::vector<char>> extends;

  int n() const { return static_cast<int>(next.size()); }

  int step(int v, Letter l) const { return next[v][l]; }

  /// Endpoint of the path labeled w from v, or -1 if it leaves the graph.
  int trace(int v, const ReducedWord& w) const {
    for (Letter l : w.letters) {
      v = next[v][l];
      if (v < 0) return -1;
    }
    return v;
  }

  int degree(int v) const {
    int d = 0;
    for (int t : next[v])
      if (t >= 0) ++d;
    return d;
  }

  std::uint64_t edge_count() const {
    std::uint64_t total = 0;
    for (int v = 0; v < n(); ++v) total += degree(v);
    return total / 2;
  }
};

namespace detail {

// extends[v][l]: directed edges that begin an infinite reduced ray. A
// directed edge survives iff it has a surviving non-backtracking successor;
// prune to the fixpoint.
inline void compute_extends(CoreGraph& g) {
  int R2 = 2 * g.rank;
  g.extends.assign(g.n(), std::vector<char>(R2, 0));
  for (int v = 0; v < g.n(); ++v)
    for (int l = 0; l < R2; ++l) g.extends[v][l] = g.next[v][l] >= 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < g.n(); ++v) {
      for (int l = 0; l < R2; ++l) {
        if (!g.extends[v][l]) continue;
        int w = g.next[v][l];
        bool ok = false;
        for (int f = 0; f < R2 && !ok; ++f) {
          if (f == static_cast<int>(inv(static_cast<Letter>(l)))) continue;
          if (g.next[w][f] >= 0 && g.extends[w][f]) ok = true;
        }
        if (!ok) {
          g.extends[v][l] = 0;
          changed = true;
        }
      }
    }
  }
}

inline void compute_base_data(CoreGraph& g) {
  g.dist_to_base.assign(g.n(), -1);
  g.vertex_word.assign(g.n(), identity_word());
  std::queue<int> q;
  g.dist_to_base[g.base] = 0;
  q.push(g.base);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int l = 0; l < 2 * g.rank; ++l) {
      int w = g.next[v][l];
      if (w >= 0 && g.dist_to_base[w] < 0) {
        g.dist_to_base[w] = g.dist_to_base[v] + 1;
        g.vertex_word[w] = g.vertex_word[v];
        g.vertex_word[w].letters.push_back(static_cast<Letter>(l));
        q.push(w);
      }
    }
  }
  g.lambda = *std::max_element(g.dist_to_base.begin(), g.dist_to_base.end());
}

}  // namespace detail

/// Stallings construction: wedge the generator loops at the basepoint, fold
/// to a deterministic graph, trim hanging trees. Rejects the trivial
/// subgroup and finite-index subgroups (their limit set is all of the
/// boundary, which degenerates every construction downstream).
inline CoreGraph fold(const GroupSpec& spec, const std::vector<ReducedWord>& generators) {
  spec.validate();
  std::vector<ReducedWord> gens;
  for (const auto& g : generators) {
    ReducedWord r = reduce(g.letters);
    if (!r.empty()) gens.push_back(r);
  }
  if (gens.empty())
    throw Error(ErrorCode::TrivialSubgroup, "all generators reduce to the identity");

  int R2 = 2 * spec.rank;
  // Mutable multigraph during folding: per vertex a list of (letter, target).
  std::vector<std::vector<std::pair<int, int>>> adj(1);
  auto add_edge = [&](int u, Letter l, int v) {
    adj[u].push_back({l, v});
    adj[v].push_back({inv(l), u});
  };
  for (const auto& g : gens) {
    int cur = 0;
    for (int i = 0; i < g.size(); ++i) {
      int nxt = (i + 1 == g.size()) ? 0 : static_cast<int>(adj.size());
      if (nxt != 0) adj.emplace_back();
      add_edge(cur, g.letters[i], nxt);
      cur = nxt;
    }
  }

  UnionFind uf(static_cast<int>(adj.size()));
  std::queue<int> work;
  for (int v = 0; v < static_cast<int>(adj.size()); ++v) work.push(v);
  while (!work.empty()) {
    int v = uf.find(work.front());
    work.pop();
    // Group out-edges of the merged vertex by letter; identify clashing targets.
    std::map<int, int> seen;  // letter -> representative target
    bool merged_any = false;
    auto& edges = adj[v];
    for (std::size_t i = 0; i < edges.size(); ++i) {
      int l = edges[i].first;
      int t = uf.find(edges[i].second);
      edges[i].second = t;
      auto [it, fresh] = seen.emplace(l, t);
      if (!fresh && it->second != t) {
        int a = uf.find(it->second), b = t;
        uf.unite(a, b);
        int keep = uf.find(a);
        int drop = keep == a ? b : a;
        if (drop != keep) {
          adj[keep].insert(adj[keep].end(), adj[drop].begin(), adj[drop].end());
          adj[drop].clear();
        }
        it->second = keep;
        merged_any = true;
        work.push(keep);
        work.push(uf.find(v));
      }
    }
    if (merged_any) work.push(uf.find(v));
  }

  // Collapse to representatives and build the deterministic table.
  std::vector<int> rep_index(adj.size(), -1);
  std::vector<int> reps;
  for (int v = 0; v < static_cast<int>(adj.size()); ++v) {
    int r = uf.find(v);
    if (rep_index[r] < 0) {
      rep_index[r] = static_cast<int>(reps.size());
      reps.push_back(r);
    }
  }
  std::vector<std::vector<int>> table(reps.size(), std::vector<int>(R2, -1));
  for (int i = 0; i < static_cast<int>(reps.size()); ++i) {
    for (auto [l, t] : adj[reps[i]]) {
      int ti = rep_index[uf.find(t)];
      if (table[i][l] >= 0 && table[i][l] != ti)
        throw Error(ErrorCode::Internal, "folding left a nondeterministic edge");
      table[i][l] = ti;
    }
  }
  int base = rep_index[uf.find(0)];

  // Trim hanging trees: non-basepoint vertices of degree <= 1.
  std::vector<char> alive(table.size(), 1);
  bool trimmed = true;
  while (trimmed) {
    trimmed = false;
    for (int v = 0; v < static_cast<int>(table.size()); ++v) {
      if (!alive[v] || v == base) continue;
      int deg = 0;
      for (int l = 0; l < R2; ++l)
        if (table[v][l] >= 0 && alive[table[v][l]]) ++deg;
      if (deg <= 1) {
        alive[v] = 0;
        trimmed = true;
      }
    }
  }

  CoreGraph core;
  core.rank = spec.rank;
  std::vector<int> newid(table.size(), -1);
  // Deterministic numbering: BFS from the basepoint in letter order.
  std::vector<int> order;
  std::queue<int> bfs;
  newid[base] = 0;
  order.push_back(base);
  bfs.push(base);
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (int l = 0; l < R2; ++l) {
      int w = table[v][l];
      if (w >= 0 && alive[w] && newid[w] < 0) {
        newid[w] = static_cast<int>(order.size());
        order.push_back(w);
        bfs.push(w);
      }
    }
  }
  core.next.assign(order.size(), std::vector<int>(R2, -1));
  for (int i = 0; i < static_cast<int>(order.size()); ++i)
    for (int l = 0; l < R2; ++l) {
      int w = table[order[i]][l];
      if (w >= 0 && alive[w]) core.next[i][l] = newid[w];
    }
  core.base = 0;

  bool complete = true;
  for (int v = 0; v < core.n() && complete; ++v)
    for (int l = 0; l < R2; ++l)
      if (core.next[v][l] < 0) {
        complete = false;
        break;
      }
  core.finite_index = complete;
  core.proper = !complete;
  if (complete)
    throw Error(ErrorCode::NotProper,
                "subgroup has finite index (complete automaton on " +
                    std::to_string(core.n()) + " vertices); its limit set is the whole boundary");

  detail::compute_base_data(core);
  detail::compute_extends(core);
  return core;
}

inline bool membership(const CoreGraph& core, const ReducedWord& w) {
  return core.trace(core.base, w) == core.base;
}

inline int quasiconvexity_constant(const CoreGraph& core) { return core.lambda; }

/// Is w a prefix of some point of the limit set? True iff w reads from the
/// basepoint and the final edge continues to an infinite reduced ray.
inline bool limit_prefix_extends(const CoreGraph& core, const ReducedWord& w) {
  if (w.empty()) {
    for (int l = 0; l < 2 * core.rank; ++l)
      if (core.next[core.base][l] >= 0 && core.extends[core.base][l]) return true;
    return false;
  }
  int v = core.base;
  for (int i = 0; i < w.size(); ++i) {
    Letter l = w.letters[i];
    if (core.next[v][l] < 0) return false;
    if (i + 1 == w.size() && !core.extends[v][l]) return false;
    v = core.next[v][l];
  }
  return true;
}

namespace detail {

// Shortest reduced word tracing v -> base whose first letter is none of the
// banned ones, together with the shortlex-least such word. States are
// (vertex, letter we arrived by); the first BFS arrival is shortlex-least.
inline std::optional<ReducedWord> constrained_return(const CoreGraph& core, int v,
                                                     const std::vector<Letter>& banned_first) {
  if (v == core.base) return identity_word();
  int R2 = 2 * core.rank;
  struct State {
    int vertex;
    int in_letter;  // -1 for the virtual start
    ReducedWord word;
  };
  std::vector<std::vector<char>> visited(core.n(), std::vector<char>(R2 + 1, 0));
  std::queue<State> q;
  visited[v][R2] = 1;
  q.push({v, -1, identity_word()});
  std::optional<ReducedWord> best;
  while (!q.empty()) {
    State s = q.front();
    q.pop();
    if (best && s.word.size() >= best->size()) break;  // later layers cannot win
    for (int l = 0; l < R2; ++l) {
      if (s.in_letter >= 0 && l == static_cast<int>(inv(static_cast<Letter>(s.in_letter)))) continue;
      if (s.in_letter < 0 &&
          std::find(banned_first.begin(), banned_first.end(), static_cast<Letter>(l)) !=
              banned_first.end())
        continue;
      int w = core.next[s.vertex][l];
      if (w < 0) continue;
      if (visited[w][l]) continue;
      visited[w][l] = 1;
      State t{w, l, s.word};
      t.word.letters.push_back(static_cast<Letter>(l));
      if (w == core.base && (!best || t.word < *best)) best = t.word;
      q.push(std::move(t));
    }
  }
  return best;
}

}  // namespace detail

/// Shortlex-least element of the left coset wH. Every u in wH factors as
/// u = (x[c..])^-1 * tau with x = w^-1, where x[0..c) reads from the
/// basepoint to some vertex and tau returns that vertex to the basepoint;
/// scanning the readable prefixes of x gives all candidates.
inline ReducedWord coset_min_rep(const CoreGraph& core, const ReducedWord& w) {
  ReducedWord x = inverse(w);
  std::optional<ReducedWord> best;
  int v = core.base;
  for (int c = 0;; ++c) {
    std::vector<Letter> banned;
    if (c >= 1) banned.push_back(inv(x.letters[c - 1]));  // keep x[0..c)*tau reduced
    if (c < x.size()) banned.push_back(x.letters[c]);     // cancellation handled at c+1
    if (auto tau = detail::constrained_return(core, v, banned)) {
      ReducedWord cand;
      cand.letters.reserve(x.size() - c + tau->size());
      for (int i = x.size() - 1; i >= c; --i) cand.letters.push_back(inv(x.letters[i]));
      cand.letters.insert(cand.letters.end(), tau->letters.begin(), tau->letters.end());
      if (!best || cand < *best) best = cand;
    }
    if (c == x.size()) break;
    v = core.next[v][x.letters[c]];
    if (v < 0) break;
  }
  if (!best) throw Error(ErrorCode::Internal, "coset has no representative");
  return *best;
}

/// d(x, H) in the word metric: length of the shortest element of x^-1 H,
/// without materializing it.
inline int dist_to_subgroup(const CoreGraph& core, const ReducedWord& x) {
  return coset_min_rep(core, inverse(x)).size();
}

/// d(x, gH) = d(g^-1 x, H).
inline int coset_distance(const CoreGraph& core, const ReducedWord& g_rep, const ReducedWord& x) {
  return dist_to_subgroup(core, multiply(inverse(g_rep), x));
}

/// Canonical (shortlex-least) representatives of every left coset wH with a
/// representative of length <= max_len, sorted shortlex. Enumerated through
/// the Schreier graph of right cosets (overhang states), which the inverse
/// bijection matches length-for-length with left cosets.
inline std::vector<ReducedWord> cosets_up_to(const CoreGraph& core, int max_len) {
  struct State {
    int vertex;
    std::string overhang;  // reduced word hanging off the core, first letter undefined at vertex
    ReducedWord word;      // right-coset representative read so far
  };
  auto key = [](int v, const std::string& t) {
    return std::to_string(v) + "|" + t;
  };
  std::unordered_set<std::string> visited;
  std::queue<State> q;
  std::vector<ReducedWord> right_reps;
  State start{core.base, {}, identity_word()};
  visited.insert(key(start.vertex, start.overhang));
  right_reps.push_back(start.word);
  q.push(std::move(start));
  while (!q.empty()) {
    State s = q.front();
    q.pop();
    if (s.word.size() == max_len) continue;
    for (int l = 0; l < 2 * core.rank; ++l) {
      State t = s;
      if (!t.overhang.empty()) {
        Letter back = static_cast<Letter>(t.overhang.back());
        if (inv(back) == static_cast<Letter>(l))
          t.overhang.pop_back();
        else
          t.overhang.push_back(static_cast<char>(l));
      } else {
        int w = core.next[t.vertex][l];
        if (w >= 0)
          t.vertex = w;
        else
          t.overhang.push_back(static_cast<char>(l));
      }
      std::string k = key(t.vertex, t.overhang);
      if (visited.contains(k)) continue;
      visited.insert(std::move(k));
      t.word.letters.push_back(static_cast<Letter>(l));
      right_reps.push_back(t.word);
      q.push(std::move(t));
    }
  }
  std::vector<ReducedWord> left;
  left.reserve(right_reps.size());
  for (const auto& r : right_reps) left.push_back(coset_min_rep(core, inverse(r)));
  std::sort(left.begin(), left.end());
  return left;
}

/// Non-identity subgroup elements of word length <= max_len, sorted shortlex.
inline std::vector<ReducedWord> subgroup_elements(const CoreGraph& core, int max_len) {
  std::vector<ReducedWord> out;
  struct Frame {
    int vertex;
    int in_letter;
    ReducedWord word;
  };
  std::vector<Frame> stack{{core.base, -1, identity_word()}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.vertex == core.base && !f.word.empty()) out.push_back(f.word);
    if (f.word.size() == max_len) continue;
    for (int l = 2 * core.rank - 1; l >= 0; --l) {
      if (f.in_letter >= 0 && l == static_cast<int>(inv(static_cast<Letter>(f.in_letter)))) continue;
      int w = core.next[f.vertex][l];
      if (w < 0) continue;
      Frame g{w, l, f.word};
      g.word.letters.push_back(static_cast<Letter>(l));
      stack.push_back(std::move(g));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---- a named collection of subgroups (the peripheral family) ----

struct SubgroupCollection {
  GroupSpec spec;
  std::vector<std::string> names;
  std::vector<std::vector<ReducedWord>> generators;
  std::vector<CoreGraph> cores;

  int size() const { return static_cast<int>(cores.size()); }

  int lambda_max() const {
    int m = 0;
    for (const auto& c : cores) m = std::max(m, c.lambda);
    return m;
  }
};

inline SubgroupCollection make_collection(const GroupSpec& spec,
                                          const std::vector<std::string>& names,
                                          const std::vector<std::vector<ReducedWord>>& gens) {
  SubgroupCollection coll;
  coll.spec = spec;
  coll.names = names;
  coll.generators = gens;
  for (const auto& g : gens) coll.cores.push_back(fold(spec, g));
  return coll;
}

/// A left coset g*H_i, addressed by subgroup index and canonical representative.
struct CosetRef {
  int subgroup = 0;
  ReducedWord rep;

  friend bool operator==(const CosetRef& a, const CosetRef& b) = default;
  friend bool operator<(const CosetRef& a, const CosetRef& b) {
    if (a.subgroup != b.subgroup) return a.subgroup < b.subgroup;
    return a.rep < b.rep;
  }
};

inline CosetRef make_coset(const SubgroupCollection& coll, int subgroup, const ReducedWord& w) {
  if (subgroup < 0 || subgroup >= coll.size())
    throw Error(ErrorCode::ValidationError, "subgroup index out of range");
  return CosetRef{subgroup, coset_min_rep(coll.cores[subgroup], w)};
}

inline std::string coset_to_string(const SubgroupCollection& coll, const CosetRef& c) {
  return format_word(c.rep) + "*" + coll.names[c.subgroup];
}

}  // namespace cusp
