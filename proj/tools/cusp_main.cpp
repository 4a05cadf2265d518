// cusp — desk-scale experiments on boundaries of relatively hyperbolic
// pairs over a free group: Stallings cores, malnormality certificates,
// decomposition-space partitions, and dynamical certificates.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cusp/cusp.hpp"

namespace {

struct CommonOpts {
  std::string spec_path;
  std::string out_path;
  std::string dot_path;
  long long seed = -1;  // -1: keep the spec file's seed
  std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--spec", o.spec_path, "experiment spec file")->required();
  cmd->add_option("--out", o.out_path, "write the report here instead of stdout");
  cmd->add_option("--dot", o.dot_path, "write a DOT sidecar (fold, quotient)");
  cmd->add_option("--seed", o.seed, "seed recorded in the report and used for sampling");
}

void add_param(CLI::App* cmd, CommonOpts& o, const std::string& flag, const std::string& key,
               const std::string& help) {
  cmd->add_option_function<std::string>(
         flag, [&o, key](const std::string& v) { o.overrides[key] = v; }, help)
      ->expected(1);
}

int run_command(const std::string& command, const CommonOpts& o, std::uint64_t ball_cap_override) {
  try {
    cusp::ParsedSpec parsed = cusp::parse_spec(cusp::read_file(o.spec_path));
    cusp::ExperimentConfig cfg = cusp::assemble_config(parsed, command);
    for (const auto& [k, v] : o.overrides) cfg.params[k] = v;
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    if (ball_cap_override) cfg.caps.ball_vertices = ball_cap_override;
    cfg.out_path = o.out_path;
    cfg.dot_path = o.dot_path;

    cusp::RunResult res = cusp::run_experiment(cfg);
    if (o.out_path.empty()) {
      std::cout << res.report;
    } else {
      std::ofstream out(o.out_path, std::ios::binary);
      if (!out) throw cusp::Error(cusp::ErrorCode::IoError, "cannot write " + o.out_path);
      out << res.report;
    }
    if (!o.dot_path.empty()) {
      if (res.dot.empty())
        throw cusp::Error(cusp::ErrorCode::ValidationError,
                          "command '" + command + "' produced no DOT output");
      std::ofstream out(o.dot_path, std::ios::binary);
      if (!out) throw cusp::Error(cusp::ErrorCode::IoError, "cannot write " + o.dot_path);
      out << res.dot;
    }
    return res.exit_status;
  } catch (const cusp::Error& e) {
    std::cerr << "cusp: " << e.what() << "\n";
    return e.exit_status();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary experiments for relatively hyperbolic pairs over free groups"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd;
    CommonOpts opts;
    std::string name;
  };
  std::vector<Sub> subs;
  std::uint64_t ball_cap = 0;
  app.add_option("--ball-cap", ball_cap, "override the ball vertex cap (also CUSP_BALL_CAP)");

  auto make = [&](const std::string& name, const std::string& desc) -> Sub& {
    subs.push_back({app.add_subcommand(name, desc), {}, name});
    add_common(subs.back().cmd, subs.back().opts);
    return subs.back();
  };

  {
    auto& s = make("delta", "four-point hyperbolicity estimate on a tree ball or imported graph");
    add_param(s.cmd, s.opts, "--radius", "radius", "tree ball radius");
    add_param(s.cmd, s.opts, "--graph", "graph", "adjacency-list graph file (basepoint on line 1)");
  }
  {
    auto& s = make("fold", "fold subgroup generators into core graphs");
    add_param(s.cmd, s.opts, "--subgroup", "subgroup", "restrict to one named subgroup");
  }
  {
    auto& s = make("malnormal", "decide almost malnormality of the collection");
    add_param(s.cmd, s.opts, "--collection", "collection", "subgroup names (space separated)");
  }
  {
    auto& s = make("bci", "coset-intersection diameter experiments");
    add_param(s.cmd, s.opts, "--R", "R", "neighborhood radius");
    add_param(s.cmd, s.opts, "--radius", "radius", "single truncation ball radius");
    add_param(s.cmd, s.opts, "--radii", "radii", "truncation radii, space separated");
    add_param(s.cmd, s.opts, "--coset1", "coset1", "first coset NAME[:word]");
    add_param(s.cmd, s.opts, "--coset2", "coset2", "second coset NAME[:word]");
    add_param(s.cmd, s.opts, "--collection", "collection", "subgroup names");
  }
  {
    auto& s = make("quotient", "depth-n decomposition-space partition");
    add_param(s.cmd, s.opts, "--depth", "depth", "cylinder depth n");
    add_param(s.cmd, s.opts, "--collection", "collection", "subgroup names");
  }
  {
    auto& s = make("refine", "refinement map between two partition depths");
    add_param(s.cmd, s.opts, "--depth", "depth", "coarse depth n");
    add_param(s.cmd, s.opts, "--deeper", "deeper", "fine depth m > n");
    add_param(s.cmd, s.opts, "--collection", "collection", "subgroup names");
  }
  {
    auto& s = make("collapse", "collapsing-sequence check for the family g_i = s t^i");
    add_param(s.cmd, s.opts, "--family", "family", "family s.t (e.g. 1.a)");
    add_param(s.cmd, s.opts, "--K", "K", "cylinder selector for K");
    add_param(s.cmd, s.opts, "--L", "L", "cylinder selector for L");
    add_param(s.cmd, s.opts, "--depth", "depth", "cylinder depth");
    add_param(s.cmd, s.opts, "--imax", "imax", "index horizon (doubled for stability)");
    add_param(s.cmd, s.opts, "--collection", "collection", "subgroup names");
  }
  {
    auto& s = make("conical", "conical-limit-point certificate for a rational point");
    add_param(s.cmd, s.opts, "--point", "point", "rational point head.period");
    add_param(s.cmd, s.opts, "--imax", "imax", "number of escape times");
    add_param(s.cmd, s.opts, "--depth", "depth", "checked ray depth");
    add_param(s.cmd, s.opts, "--bci-radius", "bciradius", "ball radius for the D_emp sweep");
    add_param(s.cmd, s.opts, "--collection", "collection", "subgroup names");
  }
  {
    auto& s = make("parabolic", "bounded-parabolic certificate for a coset");
    add_param(s.cmd, s.opts, "--coset", "coset", "coset NAME[:word]");
    add_param(s.cmd, s.opts, "--R", "R", "neighborhood radius (default 2*lambda+10*delta+1)");
    add_param(s.cmd, s.opts, "--depth", "depth", "cylinder depth");
    add_param(s.cmd, s.opts, "--collection", "collection", "subgroup names");
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& s : subs)
    if (s.cmd->parsed()) return run_command(s.name, s.opts, ball_cap);
  std::cerr << "cusp: no command\n";
  return 1;
}
