#pragma once

// Experiment orchestration: dispatch a parsed config to the right module,
// serialize the outcome as a deterministic report, and map failures to
// machine-readable codes and exit statuses.

#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cusp/ball.hpp"
#include "cusp/config.hpp"
#include "cusp/dot.hpp"
#include "cusp/dynamics.hpp"
#include "cusp/errors.hpp"
#include "cusp/malnormal.hpp"
#include "cusp/quotient.hpp"
#include "cusp/report.hpp"
#include "cusp/stallings.hpp"
#include "cusp/words.hpp"

namespace cusp {

#ifndef CUSP_VERSION
#define CUSP_VERSION "0.0.0"
#endif

struct RunResult {
  std::string report;
  int exit_status = 0;
  std::string dot;  // optional sidecar content
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline RationalBoundaryPoint parse_point(const std::string& text, int rank) {
  auto dot = text.find('.');
  if (dot == std::string::npos)
    throw Error(ErrorCode::ValidationError, "point must be head.period, got '" + text + "'");
  return make_rational_point(parse_word(text.substr(0, dot), rank),
                             parse_word(text.substr(dot + 1), rank));
}

namespace detail {

inline int subgroup_index(const SubgroupCollection& coll, const std::string& name) {
  for (int i = 0; i < coll.size(); ++i)
    if (coll.names[i] == name) return i;
  throw Error(ErrorCode::ValidationError, "unknown subgroup '" + name + "'");
}

inline SubgroupCollection collection_from_config(const ExperimentConfig& cfg) {
  std::vector<std::string> names;
  std::vector<std::vector<ReducedWord>> gens;
  if (const std::string* sel = cfg.param("collection")) {
    for (const auto& want : split_ws(*sel)) {
      bool found = false;
      for (const auto& [name, g] : cfg.subgroups)
        if (name == want) {
          names.push_back(name);
          gens.push_back(g);
          found = true;
        }
      if (!found) throw Error(ErrorCode::ValidationError, "unknown subgroup '" + want + "'");
    }
  } else {
    for (const auto& [name, g] : cfg.subgroups) {
      names.push_back(name);
      gens.push_back(g);
    }
  }
  return make_collection(cfg.group, names, gens);
}

inline CosetRef parse_coset(const std::string& text, const SubgroupCollection& coll) {
  auto colon = text.find(':');
  std::string name = colon == std::string::npos ? text : text.substr(0, colon);
  std::string word = colon == std::string::npos ? "1" : text.substr(colon + 1);
  int idx = subgroup_index(coll, name);
  return make_coset(coll, idx, parse_word(word, coll.spec.rank));
}

/// Cylinder-set selectors: all | start:<w> | not-start:<w> | list:w1,w2 |
/// avoid-attractor | avoid-repeller.
inline std::vector<ReducedWord> resolve_cylinders(const std::string& selector, int depth,
                                                  int rank, const RationalBoundaryPoint& attractor,
                                                  const RationalBoundaryPoint& repeller) {
  std::vector<ReducedWord> all = sphere_words(rank, depth);
  auto starts_with = [](const ReducedWord& w, const ReducedWord& p) {
    return common_prefix_length(w, p) == p.size();
  };
  if (selector == "all") return all;
  std::vector<ReducedWord> out;
  if (selector.rfind("start:", 0) == 0) {
    ReducedWord p = parse_word(selector.substr(6), rank);
    for (auto& w : all)
      if (starts_with(w, p)) out.push_back(w);
  } else if (selector.rfind("not-start:", 0) == 0) {
    ReducedWord p = parse_word(selector.substr(10), rank);
    for (auto& w : all)
      if (!starts_with(w, p)) out.push_back(w);
  } else if (selector.rfind("list:", 0) == 0) {
    std::string items = selector.substr(5);
    std::string tok;
    std::istringstream in(items);
    while (std::getline(in, tok, ','))
      if (!tok.empty()) out.push_back(parse_word(tok, rank));
    std::sort(out.begin(), out.end());
  } else if (selector == "avoid-attractor") {
    ReducedWord avoid = prefix_of_point(attractor, depth);
    for (auto& w : all)
      if (!(w == avoid)) out.push_back(w);
  } else if (selector == "avoid-repeller") {
    ReducedWord avoid = prefix_of_point(repeller, depth);
    for (auto& w : all)
      if (!(w == avoid)) out.push_back(w);
  } else {
    throw Error(ErrorCode::ValidationError, "bad cylinder selector '" + selector + "'");
  }
  if (out.empty()) throw Error(ErrorCode::ValidationError, "selector matched no cylinders");
  return out;
}

inline std::string join_words(const std::vector<ReducedWord>& ws) {
  std::string s;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (i) s += " ";
    s += format_word(ws[i]);
  }
  return s.empty() ? "-" : s;
}

inline std::string join_ints(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += " ";
    s += std::to_string(xs[i]);
  }
  return s.empty() ? "-" : s;
}

inline void require_params(const ExperimentConfig& cfg, const std::set<std::string>& allowed) {
  for (const auto& [k, _] : cfg.params)
    if (!allowed.contains(k))
      throw Error(ErrorCode::ValidationError,
                  "unknown parameter '" + k + "' for command " + cfg.command);
}

// ---- per-command handlers ----

inline void run_delta(const ExperimentConfig& cfg, Report& rep, RunResult& res) {
  require_params(cfg, {"radius", "graph"});
  MetricBallGraph g;
  if (const std::string* path = cfg.param("graph")) {
    g = import_graph(read_file(*path));
    rep.kv("backend", "imported:" + *path);
  } else {
    int radius = cfg.param_int("radius", 3);
    g = build_ball(cfg.group, radius, cfg.caps);
    rep.kv("backend", "free-ball");
    rep.kv("radius", radius);
  }
  rep.kv("vertices", static_cast<long long>(g.n()));
  rep.kv("edges", static_cast<long long>(g.edge_count()));
  DeltaEstimate est = four_point_delta(g, cfg.caps, cfg.seed);
  rep.kv("delta", est.delta.str());
  rep.kv("exact", est.exact);
  rep.kv("quadruples_scanned", static_cast<long long>(est.quadruples_scanned));
  (void)res;
}

inline void run_fold(const ExperimentConfig& cfg, Report& rep, RunResult& res) {
  require_params(cfg, {"subgroup"});
  std::vector<std::pair<std::string, std::vector<ReducedWord>>> wanted;
  if (const std::string* name = cfg.param("subgroup")) {
    for (const auto& sg : cfg.subgroups)
      if (sg.first == *name) wanted.push_back(sg);
    if (wanted.empty()) throw Error(ErrorCode::ValidationError, "unknown subgroup '" + *name + "'");
  } else {
    wanted = cfg.subgroups;
  }
  if (wanted.empty()) throw Error(ErrorCode::ValidationError, "no subgroups in spec");
  rep.table("cores", {"subgroup", "vertices", "edges", "lambda", "proper", "finite_index"});
  std::string dot;
  for (const auto& [name, gens] : wanted) {
    CoreGraph core = fold(cfg.group, gens);
    rep.row({name, std::to_string(core.n()), std::to_string(core.edge_count()),
             std::to_string(core.lambda), core.proper ? "true" : "false",
             core.finite_index ? "true" : "false"});
    if (wanted.size() == 1) dot = export_dot(core);
  }
  res.dot = dot;
}

inline void run_malnormal(const ExperimentConfig& cfg, Report& rep, RunResult&) {
  require_params(cfg, {"collection"});
  SubgroupCollection coll = collection_from_config(cfg);
  MalnormalityCertificate cert = is_almost_malnormal(coll);
  rep.kv("verdict", cert.verdict);
  if (cert.witness) {
    const auto& w = *cert.witness;
    rep.kv("witness_g", format_word(w.g));
    rep.kv("witness_subgroup_i", coll.names[w.i]);
    rep.kv("witness_subgroup_j", coll.names[w.j]);
    rep.kv("witness_element", format_word(w.element));
  }
  rep.table("fiber_products", {"i", "j", "components", "max_betti"});
  for (int i = 0; i < coll.size(); ++i)
    for (int j = 0; j < coll.size(); ++j) {
      auto comps = fiber_product(coll.cores[i], coll.cores[j]);
      int max_betti = 0;
      for (const auto& c : comps) max_betti = std::max(max_betti, c.first_betti);
      rep.row({coll.names[i], coll.names[j], std::to_string(comps.size()),
               std::to_string(max_betti)});
    }
}

inline void run_bci(const ExperimentConfig& cfg, Report& rep, RunResult&) {
  require_params(cfg, {"R", "radius", "radii", "coset1", "coset2", "collection"});
  SubgroupCollection coll = collection_from_config(cfg);
  int R = cfg.param_int("R", 1);
  std::vector<int> radii;
  if (const std::string* rs = cfg.param("radii")) {
    for (const auto& tok : split_ws(*rs)) {
      try {
        radii.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ValidationError, "bad radius '" + tok + "'");
      }
    }
  } else if (cfg.param("radius")) {
    radii.push_back(cfg.param_int("radius", 6));
  } else {
    radii = {4, 6, 8};
  }
  rep.kv("R", R);
  if (cfg.param("coset1") || cfg.param("coset2")) {
    if (!cfg.param("coset1") || !cfg.param("coset2"))
      throw Error(ErrorCode::ValidationError, "need both coset1 and coset2");
    CosetRef c1 = parse_coset(*cfg.param("coset1"), coll);
    CosetRef c2 = parse_coset(*cfg.param("coset2"), coll);
    rep.kv("coset1", coset_to_string(coll, c1));
    rep.kv("coset2", coset_to_string(coll, c2));
    rep.table("pair_diameter", {"ball_radius", "diameter"});
    for (int N : radii) {
      auto d = coset_intersection_diameter(coll, c1, c2, R, N);
      rep.row({std::to_string(N), d ? std::to_string(*d) : "EMPTY"});
    }
  } else {
    rep.table("sweep", {"ball_radius", "pairs", "nonempty", "D_emp"});
    BciReport last;
    for (int N : radii) {
      BciReport r = cusp::run_bci(coll, R, N, cfg.caps);
      int nonempty = 0;
      for (const auto& s : r.samples)
        if (s.diameter) ++nonempty;
      rep.row({std::to_string(N), std::to_string(r.samples.size()), std::to_string(nonempty),
               std::to_string(r.D_emp)});
      last = std::move(r);
    }
    rep.table("samples_last_radius", {"coset1", "coset2", "diameter"});
    std::size_t shown = 0;
    for (const auto& s : last.samples) {
      if (!s.diameter) continue;
      rep.row({coset_to_string(coll, s.c1), coset_to_string(coll, s.c2),
               std::to_string(*s.diameter)});
      if (++shown == 50) break;
    }
  }
}

inline void run_quotient(const ExperimentConfig& cfg, Report& rep, RunResult& res) {
  require_params(cfg, {"depth", "collection"});
  SubgroupCollection coll = collection_from_config(cfg);
  int depth = cfg.param_int("depth", 2);
  CylinderPartition part = decomposition_partition(coll, depth);
  rep.kv("depth", depth);
  rep.kv("cylinders", static_cast<long long>(part.cylinders.size()));
  rep.kv("classes", static_cast<long long>(part.classes.size()));
  rep.kv("parabolic_classes", part.parabolic_count());
  rep.kv("singleton_classes", part.singleton_count());
  SeparatingCosets seps = separating_cosets(coll, depth);
  rep.kv("separating_cosets", static_cast<long long>(seps.cosets.size()));
  rep.kv("separating_enumeration_complete", seps.complete);
  rep.table("classes", {"class", "kind", "coset", "cylinders"});
  for (int c = 0; c < static_cast<int>(part.classes.size()); ++c) {
    std::vector<ReducedWord> members;
    for (int i : part.classes[c]) members.push_back(part.cylinders[i]);
    rep.row({std::to_string(c), part.parabolic[c] ? "PARABOLIC" : "SINGLETON",
             part.parabolic[c] ? coset_to_string(coll, *part.parabolic[c]) : "-",
             join_words(members)});
  }
  res.dot = export_dot(part);
}

inline void run_refine(const ExperimentConfig& cfg, Report& rep, RunResult&) {
  require_params(cfg, {"depth", "deeper", "collection"});
  SubgroupCollection coll = collection_from_config(cfg);
  int n = cfg.param_int("depth", 1);
  int m = cfg.param_int("deeper", n + 1);
  RefinementReport r = refine_and_check(coll, n, m);
  rep.kv("depth", r.from_depth);
  rep.kv("deeper", r.to_depth);
  rep.kv("classes_coarse", r.class_count_from);
  rep.kv("classes_fine", r.class_count_to);
  rep.kv("well_defined", r.well_defined);
  rep.kv("surjective", r.surjective);
  rep.kv("all_split", r.all_split);
  rep.kv("min_split", r.min_split);
  rep.kv("usc_consistent", r.usc_consistent);
  rep.kv("separating_coarse", r.separating_from);
  rep.kv("separating_fine", r.separating_to);
  rep.kv("enumeration_complete", r.enumeration_complete);
}

inline void run_collapse(const ExperimentConfig& cfg, Report& rep, RunResult&) {
  require_params(cfg, {"family", "K", "L", "depth", "imax", "collection"});
  SubgroupCollection coll = collection_from_config(cfg);
  const std::string* fam = cfg.param("family");
  if (!fam) throw Error(ErrorCode::ValidationError, "collapse needs family = s.t");
  auto dot = fam->find('.');
  if (dot == std::string::npos)
    throw Error(ErrorCode::ValidationError, "family must be s.t, got '" + *fam + "'");
  ReducedWord s = parse_word(fam->substr(0, dot), cfg.group.rank);
  ReducedWord t = parse_word(fam->substr(dot + 1), cfg.group.rank);
  int depth = cfg.param_int("depth", 3);
  int imax = cfg.param_int("imax", 32);
  RationalBoundaryPoint attractor = make_rational_point(s, t);
  RationalBoundaryPoint repeller = make_rational_point(identity_word(), inverse(t));
  std::vector<ReducedWord> K = resolve_cylinders(cfg.param("K") ? *cfg.param("K") : "avoid-attractor",
                                                 depth, cfg.group.rank, attractor, repeller);
  std::vector<ReducedWord> L = resolve_cylinders(cfg.param("L") ? *cfg.param("L") : "avoid-repeller",
                                                 depth, cfg.group.rank, attractor, repeller);
  CollapseReport r = collapsing_check(coll, s, t, K, L, depth, imax);
  rep.kv("family", format_word(s) + "." + format_word(t));
  rep.kv("attractor", format_point(r.attractor));
  rep.kv("repeller", format_point(r.repeller));
  rep.kv("depth", depth);
  rep.kv("imax", imax);
  rep.kv("K_size", static_cast<long long>(K.size()));
  rep.kv("L_size", static_cast<long long>(L.size()));
  rep.kv("quotient_level", r.quotient_level);
  rep.kv("violation_indices", join_ints(r.violation_indices));
  rep.kv("stable", r.stable);
}

inline void run_conical(const ExperimentConfig& cfg, Report& rep, RunResult&) {
  require_params(cfg, {"point", "imax", "depth", "bciradius", "collection"});
  SubgroupCollection coll = collection_from_config(cfg);
  const std::string* pt = cfg.param("point");
  if (!pt) throw Error(ErrorCode::ValidationError, "conical needs point = head.period");
  RationalBoundaryPoint x = parse_point(*pt, cfg.group.rank);
  int imax = cfg.param_int("imax", 8);
  int depth = cfg.param_int("depth", 64);
  int bciradius = cfg.param_int("bciradius", 8);
  ConicalCertificate cert = conical_certificate(coll, x, imax, depth, bciradius, cfg.caps);
  rep.kv("point", format_point(cert.point));
  rep.kv("C", cert.C);
  rep.kv("R", cert.R);
  rep.kv("D_emp", cert.D_emp);
  rep.kv("chi", cert.chi);
  rep.kv("checked_depth", cert.checked_depth);
  rep.kv("ns", join_ints(cert.ns));
  rep.kv("translates_converge", cert.translates_converge);
  rep.kv("used_fallback", cert.used_fallback);
  rep.kv("needed_inflation", cert.needed_inflation);
}

inline void run_parabolic(const ExperimentConfig& cfg, Report& rep, RunResult&) {
  require_params(cfg, {"coset", "R", "depth", "collection"});
  SubgroupCollection coll = collection_from_config(cfg);
  const std::string* cs = cfg.param("coset");
  if (!cs) throw Error(ErrorCode::ValidationError, "parabolic needs coset = NAME[:word]");
  CosetRef coset = parse_coset(*cs, coll);
  int depth = cfg.param_int("depth", 6);
  int delta = delta_int(cfg.group);
  int lambda0 = coll.cores[coset.subgroup].lambda;
  int R = cfg.param_int("R", 2 * lambda0 + 10 * delta + 1);
  ParabolicCertificate cert = parabolic_certificate(coll, coset, R, depth, cfg.caps);
  rep.kv("coset", coset_to_string(coll, coset));
  rep.kv("R", cert.R);
  rep.kv("lambda", cert.lambda);
  rep.kv("frontier_ball", cert.frontier_ball);
  rep.kv("frontier_size", static_cast<long long>(cert.frontier.size()));
  rep.kv("E_size", static_cast<long long>(cert.E.size()));
  rep.kv("depth", cert.depth);
  rep.kv("covered", cert.covered);
  rep.kv("E_avoids_limit_set", cert.e_avoids_limit_set);
  if (!cert.uncovered.empty()) rep.kv("uncovered_sample", join_words(cert.uncovered));
}

}  // namespace detail

inline RunResult run_experiment(const ExperimentConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  RunResult res;
  Report rep;
  rep.line("cusp report");
  rep.kv("version", CUSP_VERSION);
  rep.kv("command", cfg.command);
  rep.kv("seed", static_cast<long long>(cfg.seed));
  rep.section("config");
  rep.raw(serialize_config(cfg));
  try {
    cfg.group.validate();
    rep.section("result");
    if (cfg.command == "delta")
      detail::run_delta(cfg, rep, res);
    else if (cfg.command == "fold")
      detail::run_fold(cfg, rep, res);
    else if (cfg.command == "malnormal")
      detail::run_malnormal(cfg, rep, res);
    else if (cfg.command == "bci")
      detail::run_bci(cfg, rep, res);
    else if (cfg.command == "quotient")
      detail::run_quotient(cfg, rep, res);
    else if (cfg.command == "refine")
      detail::run_refine(cfg, rep, res);
    else if (cfg.command == "collapse")
      detail::run_collapse(cfg, rep, res);
    else if (cfg.command == "conical")
      detail::run_conical(cfg, rep, res);
    else if (cfg.command == "parabolic")
      detail::run_parabolic(cfg, rep, res);
    else
      throw Error(ErrorCode::ValidationError, "unknown command '" + cfg.command + "'");
    rep.kv("status", std::string("ok"));
  } catch (const Error& e) {
    rep.section("error");
    rep.kv("code", std::string(error_code_name(e.code())));
    rep.kv("message", std::string(e.what()));
    res.exit_status = e.exit_status();
  }
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  rep.section("timing");
  rep.kv("elapsed_ms", static_cast<long long>(elapsed));
  res.report = rep.str();
  return res;
}

}  // namespace cusp
