#pragma once

// Finite metric-graph backend: balls in the Cayley tree, imported adjacency
// graphs, and the four-point hyperbolicity estimate. This is the oracle
// substrate — everything here is brute force on purpose.

#include <cstdint>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cusp/errors.hpp"
#include "cusp/rational.hpp"
#include "cusp/words.hpp"

namespace cusp {

struct Caps {
  std::uint64_t ball_vertices = 1000000;     // build_ball refuses beyond this
  std::uint64_t quadruples = 100000000;      // four_point_delta samples beyond this
  std::uint64_t distance_entries = 80000000; // all-pairs table size guard
  std::uint64_t bci_pairs = 2000;            // coset pairs per bci sweep
};

// Environment variables override defaults; CLI flags override both.
inline Caps caps_from_env() {
  Caps caps;
  auto read = [](const char* name, std::uint64_t& slot) {
    if (const char* v = std::getenv(name)) {
      try {
        slot = std::stoull(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ValidationError, std::string("bad value for ") + name);
      }
    }
  };
  read("CUSP_BALL_CAP", caps.ball_vertices);
  read("CUSP_QUAD_CAP", caps.quadruples);
  read("CUSP_DIST_CAP", caps.distance_entries);
  read("CUSP_PAIR_CAP", caps.bci_pairs);
  return caps;
}

/// Connected unit-length graph with a distinguished basepoint and an
/// all-pairs distance table (filled on demand).
struct MetricBallGraph {
  int basepoint = 0;
  std::vector<std::vector<int>> adj;
  std::vector<ReducedWord> labels;  // nonempty only for tree balls
  std::vector<std::uint16_t> dist;  // row-major n*n once computed

  int n() const { return static_cast<int>(adj.size()); }

  std::uint64_t edge_count() const {
    std::uint64_t deg = 0;
    for (const auto& a : adj) deg += a.size();
    return deg / 2;
  }

  std::uint16_t d(int u, int v) const { return dist[static_cast<std::size_t>(u) * n() + v]; }

  void ensure_distances(const Caps& caps) {
    if (!dist.empty()) return;
    std::uint64_t entries = static_cast<std::uint64_t>(n()) * n();
    if (entries > caps.distance_entries)
      throw Error(ErrorCode::ResourceLimit,
                  "all-pairs table needs " + std::to_string(entries) + " entries (cap " +
                      std::to_string(caps.distance_entries) + ")");
    dist.assign(entries, UINT16_MAX);
    std::vector<int> queue_buf(n());
    for (int s = 0; s < n(); ++s) {
      auto* row = dist.data() + static_cast<std::size_t>(s) * n();
      int head = 0, tail = 0;
      row[s] = 0;
      queue_buf[tail++] = s;
      while (head < tail) {
        int u = queue_buf[head++];
        for (int v : adj[u]) {
          if (row[v] == UINT16_MAX) {
            row[v] = static_cast<std::uint16_t>(row[u] + 1);
            queue_buf[tail++] = v;
          }
        }
      }
      for (int v = 0; v < n(); ++v)
        if (row[v] == UINT16_MAX)
          throw Error(ErrorCode::ValidationError, "graph is not connected");
    }
  }
};

/// Ball of the given radius in the Cayley tree of the free group: vertices
/// are all reduced words of length <= radius, edges are generator moves.
inline MetricBallGraph build_ball(const GroupSpec& spec, int radius, const Caps& caps = Caps{}) {
  spec.validate();
  if (radius < 0) throw Error(ErrorCode::ValidationError, "radius must be >= 0");
  std::uint64_t projected = ball_size(spec.rank, radius);
  if (projected > caps.ball_vertices)
    throw Error(ErrorCode::ResourceLimit,
                "ball would have " + std::to_string(projected) + " vertices (cap " +
                    std::to_string(caps.ball_vertices) + ")");

  MetricBallGraph g;
  g.labels = ball_words(spec.rank, radius);
  std::unordered_map<ReducedWord, int, WordHash> index;
  index.reserve(g.labels.size() * 2);
  for (int i = 0; i < static_cast<int>(g.labels.size()); ++i) index.emplace(g.labels[i], i);
  g.adj.resize(g.labels.size());
  for (int i = 0; i < static_cast<int>(g.labels.size()); ++i) {
    const ReducedWord& w = g.labels[i];
    if (w.size() == radius) continue;  // only outward edges; inward ones come from shorter words
    for (Letter l = 0; l < 2 * spec.rank; ++l) {
      if (!w.empty() && w.back() == inv(l)) continue;
      ReducedWord e = w;
      e.letters.push_back(l);
      int j = index.at(e);
      g.adj[i].push_back(j);
      g.adj[j].push_back(i);
    }
  }
  g.basepoint = 0;
  return g;
}

/// Adjacency-list import: first non-comment line is the basepoint id, each
/// following line one undirected edge "u v". Vertex ids are arbitrary
/// non-negative integers.
inline MetricBallGraph import_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::unordered_map<long long, int> ids;
  MetricBallGraph g;
  auto vertex = [&](long long raw) {
    auto [it, fresh] = ids.emplace(raw, static_cast<int>(g.adj.size()));
    if (fresh) g.adj.emplace_back();
    return it->second;
  };
  bool have_base = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long u, v;
    if (!have_base) {
      if (ls >> u) {
        g.basepoint = vertex(u);
        have_base = true;
      }
      continue;
    }
    if (!(ls >> u)) continue;
    if (!(ls >> v))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 'u v'");
    int a = vertex(u), b = vertex(v);
    g.adj[a].push_back(b);
    g.adj[b].push_back(a);
  }
  if (!have_base) throw Error(ErrorCode::ParseError, "graph file is empty");
  return g;
}

struct DeltaEstimate {
  Rational delta;
  bool exact = true;  // false when the quadruple budget forced sampling
  std::uint64_t quadruples_scanned = 0;
};

/// Smallest delta such that, over all vertex quadruples, the largest of the
/// three pairwise distance sums exceeds the second largest by at most
/// 2*delta. Trees give exactly 0. Above the quadruple budget a seeded sample
/// is scanned instead and the result is a lower bound (exact = false).
inline DeltaEstimate four_point_delta(MetricBallGraph& g, const Caps& caps = Caps{},
                                      std::uint64_t seed = 0) {
  DeltaEstimate est;
  int n = g.n();
  if (n < 4) {
    est.delta = Rational(0);
    return est;
  }
  g.ensure_distances(caps);

  auto defect = [&](int i, int j, int k, int l) -> int {
    int s1 = g.d(i, j) + g.d(k, l);
    int s2 = g.d(i, k) + g.d(j, l);
    int s3 = g.d(i, l) + g.d(j, k);
    int hi = std::max(s1, std::max(s2, s3));
    int lo = std::min(s1, std::min(s2, s3));
    int mid = s1 + s2 + s3 - hi - lo;
    return hi - mid;
  };

  std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2 * (n - 2) / 3 * (n - 3) / 4;
  int best = 0;
  if (total <= caps.quadruples) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
          for (int l = k + 1; l < n; ++l) {
            int d = defect(i, j, k, l);
            if (d > best) best = d;
          }
    est.quadruples_scanned = total;
  } else {
    est.exact = false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (std::uint64_t t = 0; t < caps.quadruples; ++t) {
      int i = pick(rng), j = pick(rng), k = pick(rng), l = pick(rng);
      if (i == j || i == k || i == l || j == k || j == l || k == l) continue;
      int d = defect(i, j, k, l);
      if (d > best) best = d;
    }
    est.quadruples_scanned = caps.quadruples;
  }
  est.delta = Rational(best, 2);
  return est;
}

}  // namespace cusp
