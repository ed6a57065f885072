#pragma once

// Hand-rolled random inputs for property tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "hdt/graph.hpp"
#include "hdt/rng.hpp"

namespace hdt::testing {

inline Graph triangle() { return Graph::from_edges(3, {{0, 1}, {1, 2}, {2, 0}}); }
inline Graph path(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}
inline Graph cycle(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i < n; ++i) e.emplace_back(i, static_cast<NodeId>((i + 1) % n));
  return Graph::from_edges(n, e);
}
/// Center 0, leaves 1..leaves.
inline Graph star(std::size_t leaves) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph::from_edges(leaves + 1, e);
}
inline Graph complete(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

/// Connected graph: a random spanning tree plus `extra` random edges
/// (duplicates merged, so the final count may be lower).
inline Graph random_connected(std::size_t n, std::size_t extra, Rng& rng) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 1; i < n; ++i) e.emplace_back(static_cast<NodeId>(uniform_index(rng, i)), i);
  for (std::size_t k = 0; k < extra; ++k) {
    const auto u = static_cast<NodeId>(uniform_index(rng, n));
    const auto v = static_cast<NodeId>(uniform_index(rng, n));
    if (u != v) e.emplace_back(u, v);
  }
  return Graph::from_edges(n, e);
}

/// Connected graph with exactly `edges` distinct edges.
inline Graph random_connected_exact(std::size_t n, std::size_t edges, Rng& rng) {
  std::set<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 1; i < n; ++i) {
    const auto p = static_cast<NodeId>(uniform_index(rng, i));
    e.emplace(p, i);
  }
  while (e.size() < edges) {
    auto u = static_cast<NodeId>(uniform_index(rng, n));
    auto v = static_cast<NodeId>(uniform_index(rng, n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    e.emplace(u, v);
  }
  return Graph::from_edges(n, {e.begin(), e.end()});
}

/// Preferential attachment: each new node links to `m` existing nodes
/// chosen proportionally to degree. Heavy-tailed degrees.
inline Graph preferential_attachment(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<std::pair<NodeId, NodeId>> e;
  std::vector<NodeId> ends;
  for (NodeId i = 0; i <= m; ++i)
    for (NodeId j = i + 1; j <= m; ++j) {
      e.emplace_back(i, j);
      ends.push_back(i);
      ends.push_back(j);
    }
  for (auto v = static_cast<NodeId>(m + 1); v < n; ++v) {
    std::set<NodeId> targets;
    while (targets.size() < m) targets.insert(ends[uniform_index(rng, ends.size())]);
    for (NodeId t : targets) {
      e.emplace_back(t, v);
      ends.push_back(t);
      ends.push_back(v);
    }
  }
  return Graph::from_edges(n, e);
}

/// Strictly positive vector summing to 1 (Dirichlet(1) via exponentials),
/// with every entry at least `floor` before normalization.
inline std::vector<double> random_simplex_point(std::size_t n, Rng& rng, double floor = 1e-3) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> v(n);
  double total = 0.0;
  for (auto& x : v) {
    x = ex(rng) + floor;
    total += x;
  }
  for (auto& x : v) x /= total;
  return v;
}

inline std::vector<double> random_positive(std::size_t n, Rng& rng, double lo = 0.1, double hi = 10.0) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::vector<double> v(n);
  for (auto& x : v) x = std::exp(u(rng));
  return v;
}

inline double random_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace hdt::testing
