#pragma once

// Experiment input format: a small key-value document.
//
//   # comment
//   rank = 2
//   delta = 0
//   seed = 0
//
//   [subgroups]
//   H1 = a          # one subgroup per line: name = generator words
//   H2 = aa bb
//
//   [quotient]      # one section per command, holding its parameters
//   depth = 2
//   collection = H1 H2
//
// Words use the a/A convention (lowercase generators, uppercase inverses,
// "1" for the identity). Boundary points and families are written
// "head.period", e.g. 1.ab for (ab)^inf. Cosets are "NAME:word" or "NAME".

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cusp/ball.hpp"
#include "cusp/errors.hpp"
#include "cusp/words.hpp"

namespace cusp {

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds = {"delta",   "fold",    "malnormal",
                                                "bci",     "quotient", "refine",
                                                "collapse", "conical", "parabolic"};
  return cmds;
}

struct ExperimentConfig {
  GroupSpec group;
  std::vector<std::pair<std::string, std::vector<ReducedWord>>> subgroups;
  std::string command;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;

  // Runtime-only (not part of the serialized document).
  Caps caps = caps_from_env();
  std::string out_path;
  std::string dot_path;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.group.rank == b.group.rank && a.group.delta == b.group.delta &&
           a.subgroups == b.subgroups && a.command == b.command && a.params == b.params &&
           a.seed == b.seed;
  }

  const std::string* param(const std::string& key) const {
    auto it = params.find(key);
    return it == params.end() ? nullptr : &it->second;
  }
  int param_int(const std::string& key, int fallback) const {
    const std::string* v = param(key);
    if (!v) return fallback;
    try {
      return std::stoi(*v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ValidationError, "parameter " + key + " is not an integer: " + *v);
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

/// Everything a document can hold; one command's parameters are selected
/// when the config for a run is assembled.
struct ParsedSpec {
  GroupSpec group;
  std::vector<std::pair<std::string, std::vector<ReducedWord>>> subgroups;
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::uint64_t seed = 0;
};

inline ParsedSpec parse_spec(const std::string& text) {
  ParsedSpec spec;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  bool rank_seen = false;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto err = [&](const std::string& msg) {
      return Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + msg);
    };
    if (line.front() == '[') {
      if (line.back() != ']') throw err("unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw err("empty section name");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw err("expected 'key = value'");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw err("empty key");
    if (section.empty()) {
      if (key == "rank") {
        try {
          spec.group.rank = std::stoi(value);
        } catch (const std::exception&) {
          throw err("bad rank: " + value);
        }
        rank_seen = true;
      } else if (key == "delta") {
        spec.group.delta = parse_rational(value);
      } else if (key == "seed") {
        try {
          spec.seed = std::stoull(value);
        } catch (const std::exception&) {
          throw err("bad seed: " + value);
        }
      } else {
        throw err("unknown top-level key '" + key + "'");
      }
    } else if (section == "subgroups") {
      for (const auto& [name, gens] : spec.subgroups)
        if (name == key) throw Error(ErrorCode::ValidationError, "duplicate subgroup '" + key + "'");
      if (value.empty())
        throw Error(ErrorCode::ValidationError, "subgroup '" + key + "' has no generators");
      std::vector<ReducedWord> gens;
      for (const auto& tok : detail::split_ws(value)) {
        try {
          gens.push_back(parse_word(tok, spec.group.rank));
        } catch (const Error& e) {
          throw err(std::string(e.what()));
        }
      }
      spec.subgroups.push_back({key, std::move(gens)});
    } else {
      spec.sections[section][key] = value;
    }
  }
  if (!rank_seen) throw Error(ErrorCode::ValidationError, "missing 'rank'");
  spec.group.validate();
  for (const auto& [name, _] : spec.sections) {
    if (std::find(known_commands().begin(), known_commands().end(), name) ==
        known_commands().end())
      throw Error(ErrorCode::ValidationError, "unknown command section [" + name + "]");
  }
  return spec;
}

inline ExperimentConfig assemble_config(const ParsedSpec& spec, const std::string& command) {
  if (std::find(known_commands().begin(), known_commands().end(), command) ==
      known_commands().end())
    throw Error(ErrorCode::ValidationError, "unknown command '" + command + "'");
  ExperimentConfig cfg;
  cfg.group = spec.group;
  cfg.subgroups = spec.subgroups;
  cfg.command = command;
  cfg.seed = spec.seed;
  auto it = spec.sections.find(command);
  if (it != spec.sections.end()) cfg.params = it->second;
  return cfg;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "rank = " << cfg.group.rank << "\n";
  out << "delta = " << cfg.group.delta.str() << "\n";
  out << "seed = " << cfg.seed << "\n";
  if (!cfg.subgroups.empty()) {
    out << "\n[subgroups]\n";
    for (const auto& [name, gens] : cfg.subgroups) {
      out << name << " =";
      for (const auto& g : gens) out << " " << format_word(g);
      out << "\n";
    }
  }
  out << "\n[" << cfg.command << "]\n";
  for (const auto& [k, v] : cfg.params) out << k << " = " << v << "\n";
  return out.str();
}

inline ExperimentConfig parse_config_roundtrip(const std::string& text) {
  ParsedSpec spec = parse_spec(text);
  if (spec.sections.size() != 1)
    throw Error(ErrorCode::ValidationError, "expected exactly one command section");
  return assemble_config(spec, spec.sections.begin()->first);
}

}  // namespace cusp
