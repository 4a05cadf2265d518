#pragma once

// Finite certificates for the dynamical claims: collapsing sequences (the
// convergence criterion), bounded parabolic points with the explicit
// neighborhood constants, and conical limit points along eventually
// periodic rays. Everything acts on rational boundary points u*v^inf and on
// depth-d cylinder sets; "all but finitely many i" is replaced by stability
// under doubling the index horizon.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "cusp/malnormal.hpp"
#include "cusp/quotient.hpp"
#include "cusp/stallings.hpp"
#include "cusp/words.hpp"

namespace cusp {

inline int delta_int(const GroupSpec& spec) {
  if (!spec.delta.is_integer())
    throw Error(ErrorCode::ValidationError, "certificate constants need an integer delta");
  return static_cast<int>(spec.delta.num);
}

/// Eventually periodic boundary point head * period^inf in normal form:
/// period cyclically reduced, primitive, no cancellation at the junction,
/// and the head shortest among spellings of the same infinite word.
struct RationalBoundaryPoint {
  ReducedWord head;
  ReducedWord period;

  friend bool operator==(const RationalBoundaryPoint&, const RationalBoundaryPoint&) = default;
  friend bool operator<(const RationalBoundaryPoint& a, const RationalBoundaryPoint& b) {
    if (!(a.head == b.head)) return a.head < b.head;
    return a.period < b.period;
  }
};

inline ReducedWord rotate_left(const ReducedWord& v) {
  ReducedWord out;
  out.letters.assign(v.letters.begin() + 1, v.letters.end());
  out.letters.push_back(v.letters.front());
  return out;
}

inline ReducedWord rotate_right(const ReducedWord& v) {
  ReducedWord out;
  out.letters.push_back(v.letters.back());
  out.letters.insert(out.letters.end(), v.letters.begin(), v.letters.end() - 1);
  return out;
}

inline RationalBoundaryPoint make_rational_point(const ReducedWord& head_raw,
                                                 const ReducedWord& period_raw) {
  ReducedWord head = reduce(head_raw.letters);
  ReducedWord v = reduce(period_raw.letters);
  if (v.empty()) throw Error(ErrorCode::ValidationError, "period must be nontrivial");
  // Cyclic reduction v = c v0 c^-1 shifts c into the head: v^inf = c * v0^inf.
  while (v.size() >= 2 && v.front() == inv(v.back())) {
    head = multiply(head, word_letter(v.front()));
    v.letters.erase(v.letters.begin());
    v.letters.pop_back();
  }
  // Primitive root.
  for (int d = 1; d <= v.size() / 2; ++d) {
    if (v.size() % d != 0) continue;
    bool pow = true;
    for (int i = d; i < v.size() && pow; ++i) pow = v.letters[i] == v.letters[i % d];
    if (pow) {
      v.letters.resize(d);
      break;
    }
  }
  // Junction cancellation eats into the periods, rotating the phase.
  while (!head.empty() && head.back() == inv(v.front())) {
    head.letters.pop_back();
    v = rotate_left(v);
  }
  // Shortest head: a trailing letter equal to the period's last letter can
  // be absorbed by rotating the phase the other way.
  while (!head.empty() && head.back() == v.back()) {
    head.letters.pop_back();
    v = rotate_right(v);
  }
  return RationalBoundaryPoint{std::move(head), std::move(v)};
}

inline ReducedWord prefix_of_point(const RationalBoundaryPoint& x, int n) {
  ReducedWord out = prefix(x.head, n);
  while (out.size() < n) {
    for (Letter l : x.period.letters) {
      out.letters.push_back(l);
      if (out.size() == n) break;
    }
  }
  return out;
}

inline std::string format_point(const RationalBoundaryPoint& x) {
  return format_word(x.head) + "." + format_word(x.period);
}

/// Left translation action on the boundary; the normal form machinery
/// absorbs any cancellation of g into the periodic tail.
inline RationalBoundaryPoint act_on_point(const ReducedWord& g, const RationalBoundaryPoint& x) {
  return make_rational_point(multiply(g, x.head), x.period);
}

/// Is x a point of Lambda(H)? Trace the head from the basepoint, then pump
/// the period until a vertex repeats at a period boundary.
inline bool point_in_limit_set(const CoreGraph& core, const RationalBoundaryPoint& x) {
  int v = core.trace(core.base, x.head);
  if (v < 0) return false;
  std::set<int> seen{v};
  for (;;) {
    v = core.trace(v, x.period);
    if (v < 0) return false;
    if (!seen.insert(v).second) return true;
  }
}

/// The translate g*Lambda(H_i) containing x, if any. Candidate cosets are
/// read off the splittings x = prefix_s(x) * (ray from a core vertex) with
/// s up to one full period past the head; each candidate is verified
/// exactly, so the scan decides membership in the union of all translates.
inline std::optional<CosetRef> find_containing_translate(const SubgroupCollection& coll,
                                                         const RationalBoundaryPoint& x) {
  for (int i = 0; i < coll.size(); ++i) {
    const CoreGraph& core = coll.cores[i];
    std::set<CosetRef> candidates;
    for (int s = 0; s <= x.head.size() + x.period.size(); ++s) {
      ReducedWord p = prefix_of_point(x, s);
      for (int q = 0; q < core.n(); ++q)
        candidates.insert(make_coset(coll, i, multiply(p, inverse(core.vertex_word[q]))));
    }
    for (const auto& c : candidates)
      if (point_in_limit_set(core, act_on_point(inverse(c.rep), x))) return c;
  }
  return std::nullopt;
}

// ---- collapsing sequences ----

struct CollapseReport {
  ReducedWord family_s, family_t;        // g_i = s * t^i
  RationalBoundaryPoint attractor;       // s * t^inf, the limit of g_i
  RationalBoundaryPoint repeller;        // t^-inf, the limit of g_i^-1
  int depth = 3;
  int i_max = 32;
  std::vector<ReducedWord> K, L;
  std::vector<int> violation_indices;    // i <= i_max with g_i^-1 K meeting L
  bool stable = false;                   // unchanged when the horizon doubles
  bool quotient_level = false;           // classes of the depth-d partition compared
};

/// Collapsing check for the family g_i = s * t^i: K must avoid the
/// attractor's cylinder and L the repeller's, and the report lists every i
/// for which the inverse translate g_i^-1 maps a sampled point of K into L
/// (through partition classes when a collection is supplied). For a genuine
/// collapsing family the violation set is finite: stable under doubling.
inline CollapseReport collapsing_check(const SubgroupCollection& coll, const ReducedWord& s,
                                       const ReducedWord& t, std::vector<ReducedWord> K,
                                       std::vector<ReducedWord> L, int depth, int i_max) {
  if (t.empty() || !is_cyclically_reduced(t))
    throw Error(ErrorCode::ValidationError, "family period must be cyclically reduced, nonempty");
  if (depth < 1 || i_max < 1) throw Error(ErrorCode::ValidationError, "need depth, i_max >= 1");
  if (K.empty() || L.empty())
    throw Error(ErrorCode::ValidationError, "K and L must be nonempty cylinder sets");
  for (const auto* set : {&K, &L})
    for (const auto& w : *set)
      if (w.size() != depth)
        throw Error(ErrorCode::ValidationError, "cylinder " + format_word(w) +
                                                    " does not have depth " + std::to_string(depth));
  std::sort(K.begin(), K.end());
  std::sort(L.begin(), L.end());

  CollapseReport rep;
  rep.family_s = s;
  rep.family_t = t;
  rep.depth = depth;
  rep.i_max = i_max;
  rep.attractor = make_rational_point(s, t);
  rep.repeller = make_rational_point(identity_word(), inverse(t));
  rep.K = K;
  rep.L = L;

  if (std::binary_search(K.begin(), K.end(), prefix_of_point(rep.attractor, depth)))
    throw Error(ErrorCode::BadCompacts, "K meets the attractor cylinder");
  if (std::binary_search(L.begin(), L.end(), prefix_of_point(rep.repeller, depth)))
    throw Error(ErrorCode::BadCompacts, "L meets the repeller cylinder");

  // Quotient-level comparison when a (malnormal) collection is present.
  std::optional<CylinderPartition> part;
  std::unordered_map<ReducedWord, int, WordHash> cyl_index;
  std::set<int> L_classes;
  if (coll.size() > 0) {
    part = decomposition_partition(coll, depth);
    for (int i = 0; i < static_cast<int>(part->cylinders.size()); ++i)
      cyl_index.emplace(part->cylinders[i], i);
    for (const auto& w : L) L_classes.insert(part->class_of[cyl_index.at(w)]);
    rep.quotient_level = true;
  }
  auto lands_in_L = [&](const ReducedWord& w) {
    if (part) return L_classes.contains(part->class_of[cyl_index.at(w)]);
    return std::binary_search(L.begin(), L.end(), w);
  };

  // Sample points of a cylinder: one eventually periodic point per
  // admissible single-letter tail.
  auto reps_of = [&](const ReducedWord& w) {
    std::vector<RationalBoundaryPoint> out;
    for (Letter l = 0; l < 2 * coll.spec.rank; ++l)
      if (l != inv(w.back())) out.push_back(make_rational_point(w, word_letter(l)));
    return out;
  };
  std::vector<RationalBoundaryPoint> k_points;
  for (const auto& w : K)
    for (auto& p : reps_of(w)) k_points.push_back(std::move(p));

  std::vector<int> violations_all;
  ReducedWord g = s;
  for (int i = 0; i <= 2 * i_max; ++i) {
    ReducedWord h = inverse(g);
    bool hit = false;
    for (const auto& p : k_points) {
      RationalBoundaryPoint y = act_on_point(h, p);
      if (lands_in_L(prefix_of_point(y, depth))) {
        hit = true;
        break;
      }
    }
    if (hit) violations_all.push_back(i);
    g = multiply(g, t);
  }
  for (int i : violations_all)
    if (i <= i_max) rep.violation_indices.push_back(i);
  rep.stable = rep.violation_indices.size() == violations_all.size();
  return rep;
}

// ---- conical limit points ----

struct ConicalCertificate {
  RationalBoundaryPoint point;
  int C = 0;                 // lambda_max + 6 delta
  int R = 0;                 // C + lambda_max + 2 delta, the diameter-experiment radius
  int D_emp = 1;             // empirical bound from the coset-intersection sweep
  int chi = 2;               // 2 * D_emp
  std::vector<int> ns;       // escape times along the ray
  int checked_depth = 0;
  bool translates_converge = false;  // sampled inverse translates limit x and y
  bool used_fallback = false;        // some n_i came from the jump s - chi/2
  bool needed_inflation = false;     // a jump target still failed; scanned past it
};

/// Certify that the ray of x escapes every C-neighborhood of a coset after
/// chi steps, along a sequence n_1 < n_2 < ... The greedy candidate is
/// n_{i-1}+1; when a coset pins the ray longer, jump to s - chi/2 where s is
/// the last time the ray is C-close to that coset.
inline ConicalCertificate conical_certificate(const SubgroupCollection& coll,
                                              const RationalBoundaryPoint& x, int i_max,
                                              int checked_depth, int bci_ball_radius = 8,
                                              const Caps& caps = Caps{}) {
  coll.spec.require_tree();
  if (i_max < 1 || checked_depth < 2)
    throw Error(ErrorCode::ValidationError, "need i_max >= 1, checked_depth >= 2");
  if (auto inside = find_containing_translate(coll, x))
    throw Error(ErrorCode::NotConicalCandidate,
                format_point(x) + " lies in the translated limit set " +
                    coset_to_string(coll, *inside));

  int delta = delta_int(coll.spec);
  int lambda = coll.lambda_max();
  ConicalCertificate cert;
  cert.point = x;
  cert.C = lambda + 6 * delta;
  cert.R = cert.C + lambda + 2 * delta;
  cert.D_emp = run_bci(coll, cert.R, bci_ball_radius, caps).D_emp;
  cert.chi = 2 * cert.D_emp;
  cert.checked_depth = checked_depth;

  auto gamma = [&](int k) { return prefix_of_point(x, k); };

  // Every coset C-close to gamma(n) arises as (gamma(n) * w) H with |w| <= C.
  auto near_cosets = [&](int n) {
    std::set<CosetRef> out;
    ReducedWord base = gamma(n);
    for (const auto& w : ball_words(coll.spec.rank, cert.C))
      for (int i = 0; i < coll.size(); ++i) {
        CosetRef c = make_coset(coll, i, multiply(base, w));
        if (coset_distance(coll.cores[i], c.rep, base) <= cert.C) out.insert(std::move(c));
      }
    return out;
  };

  // Returns the last C-close time of a violating coset, or nullopt when the
  // escape condition holds at n.
  auto violation_sup = [&](int n) -> std::optional<int> {
    for (const auto& c : near_cosets(n)) {
      const CoreGraph& core = coll.cores[c.subgroup];
      int tmax = n;
      for (int t = n + 1; t <= checked_depth; ++t)
        if (coset_distance(core, c.rep, gamma(t)) <= cert.C) tmax = t;
      if (coset_distance(core, c.rep, gamma(checked_depth)) <= cert.C)
        throw Error(ErrorCode::Horizon,
                    "ray still inside N_C(" + coset_to_string(coll, c) + ") at depth " +
                        std::to_string(checked_depth));
      if (tmax - n >= cert.chi) return tmax;
    }
    return std::nullopt;
  };

  int t = 0;
  for (int i = 1; i <= i_max; ++i) {
    int n = t;
    for (;;) {
      if (n >= checked_depth)
        throw Error(ErrorCode::Horizon, "checked_depth " + std::to_string(checked_depth) +
                                            " too small to place " + std::to_string(i_max) +
                                            " escape times");
      auto sup = violation_sup(n);
      if (!sup) break;
      int jump = *sup - cert.chi / 2;
      cert.used_fallback = true;
      if (jump <= n) {
        cert.needed_inflation = true;
        jump = n + 1;
      }
      n = jump;
    }
    cert.ns.push_back(n);
    t = n + 1;
  }

  // Collapsing consequence: the inverse translates gamma(n_i)^-1 push x and
  // a reference point toward stable limits along a subsequence; witnessed by
  // a repeated pair of depth-3 images.
  {
    RationalBoundaryPoint y = make_rational_point(identity_word(), inverse(x.period));
    if (y == x) y = make_rational_point(identity_word(), word_letter(inv(x.period.letters[0])));
    int m = 3;
    std::map<std::pair<ReducedWord, ReducedWord>, int> seen;
    int need = std::min<int>(3, static_cast<int>(cert.ns.size()));
    for (int n : cert.ns) {
      ReducedWord g = inverse(gamma(n));
      auto key = std::make_pair(prefix_of_point(act_on_point(g, x), m),
                                prefix_of_point(act_on_point(g, y), m));
      if (++seen[key] >= need) cert.translates_converge = true;
    }
  }
  return cert;
}

// ---- bounded parabolic points ----

struct ParabolicCertificate {
  CosetRef coset;
  int R = 1;
  int lambda = 0;            // quasiconvexity constant of the stabilizer
  int frontier_ball = 2;     // 2R + 100 delta
  std::vector<ReducedWord> frontier;  // vertices at distance exactly R, within the ball
  std::vector<ReducedWord> E;         // depth-d cylinders whose geodesic crosses the frontier
  int depth = 4;
  bool covered = false;
  bool e_avoids_limit_set = true;
  std::vector<ReducedWord> uncovered;  // first few failures, for diagnostics
};

/// Certify that the stabilizer of the collapsed limit set acts cocompactly
/// off its fixed point: E is the compact fundamental piece (cylinders whose
/// geodesic crosses the R-frontier near the origin), and every depth-d
/// cylinder away from the limit set is a stabilizer translate of a
/// refinement of E.
inline ParabolicCertificate parabolic_certificate(const SubgroupCollection& coll,
                                                  const CosetRef& coset, int R, int depth,
                                                  const Caps& caps = Caps{}) {
  coll.spec.require_tree();
  int delta = delta_int(coll.spec);
  if (depth < 1) throw Error(ErrorCode::ValidationError, "depth must be >= 1");

  // The stabilizer of g*Lambda(H) is the conjugate subgroup g H g^-1; for a
  // translated coset, conjugate the generators and work at its own basepoint.
  CoreGraph stab;
  if (coset.rep.empty()) {
    stab = coll.cores[coset.subgroup];
  } else {
    std::vector<ReducedWord> conj;
    for (const auto& w : coll.generators[coset.subgroup])
      conj.push_back(multiply(multiply(coset.rep, w), inverse(coset.rep)));
    stab = fold(coll.spec, conj);
  }

  ParabolicCertificate cert;
  cert.coset = coset;
  cert.R = R;
  cert.lambda = stab.lambda;
  cert.depth = depth;
  cert.frontier_ball = 2 * R + 100 * delta;
  if (R <= 2 * stab.lambda + 10 * delta)
    throw Error(ErrorCode::BadR, "need R > 2*lambda + 10*delta = " +
                                     std::to_string(2 * stab.lambda + 10 * delta));

  int F = cert.frontier_ball;
  if (ball_size(coll.spec.rank, F) > caps.ball_vertices)
    throw Error(ErrorCode::ResourceLimit, "frontier ball of radius " + std::to_string(F) +
                                              " exceeds the vertex cap");
  std::unordered_set<ReducedWord, WordHash> frontier;
  for (const auto& w : ball_words(coll.spec.rank, F))
    if (dist_to_subgroup(stab, w) == R) frontier.insert(w);
  cert.frontier.assign(frontier.begin(), frontier.end());
  std::sort(cert.frontier.begin(), cert.frontier.end());

  auto crosses_frontier = [&](const ReducedWord& w) {
    for (int j = 1; j <= std::min(w.size(), F); ++j)
      if (frontier.contains(prefix(w, j))) return true;
    return false;
  };

  std::vector<ReducedWord> cylinders = sphere_words(coll.spec.rank, depth);
  std::vector<ReducedWord> limit_shadow = translate_shadow(stab, identity_word(), depth);
  std::unordered_set<ReducedWord, WordHash> shadow_set(limit_shadow.begin(), limit_shadow.end());
  for (const auto& w : cylinders)
    if (crosses_frontier(w)) {
      cert.E.push_back(w);
      if (shadow_set.contains(w)) cert.e_avoids_limit_set = false;
    }

  // Does every infinite reduced extension of v cross the frontier? The
  // frontier lives inside the radius-F ball, so the recursion bottoms out.
  auto rays_hit = [&](auto&& self, const ReducedWord& v) -> bool {
    if (v.size() >= F) return false;
    for (Letter l = 0; l < 2 * coll.spec.rank; ++l) {
      if (!v.empty() && l == inv(v.back())) continue;
      ReducedWord child = v;
      child.letters.push_back(l);
      if (frontier.contains(child)) continue;
      if (!self(self, child)) return false;
    }
    return true;
  };
  auto refinement_of_E = [&](const ReducedWord& v) {
    if (v.empty()) return false;
    if (crosses_frontier(v)) return true;
    if (v.size() >= F) return false;
    return rays_hit(rays_hit, v);
  };

  std::vector<ReducedWord> stab_elements = subgroup_elements(stab, depth + R);
  cert.covered = true;
  for (const auto& w : cylinders) {
    if (shadow_set.contains(w)) continue;
    bool ok = refinement_of_E(w);
    for (std::size_t p = 0; p < stab_elements.size() && !ok; ++p) {
      ReducedWord v = multiply(inverse(stab_elements[p]), w);
      int cancelled = (stab_elements[p].size() + w.size() - v.size()) / 2;
      if (cancelled >= w.size()) continue;  // translate spreads over many cylinders
      ok = refinement_of_E(v);
    }
    if (!ok) {
      cert.covered = false;
      if (cert.uncovered.size() < 8) cert.uncovered.push_back(w);
    }
  }
  return cert;
}

}  // namespace cusp
