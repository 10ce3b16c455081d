#pragma once

#include <random>
#include <set>
#include <utility>
#include <vector>

#include "connesdist/graph.hpp"
#include "connesdist/operators.hpp"

namespace testutil {

/// Random graph on 2..max_nodes nodes. With ensure_connected a random
/// spanning tree (arbitrary orientation for directed graphs) guarantees a
/// connected support.
inline connesdist::Graph random_graph(std::mt19937_64& rng, int max_nodes, bool directed,
                                      bool ensure_connected = false, double edge_prob = 0.3) {
  std::uniform_int_distribution<int> nd(2, max_nodes);
  const int n = nd(rng);
  std::vector<connesdist::NodePair> edges;
  std::set<std::pair<int, int>> seen;
  const auto mark = [&](int a, int b) {
    seen.insert({a, b});
    if (!directed) seen.insert({b, a});
  };
  if (ensure_connected) {
    for (int i = 1; i < n; ++i) {
      std::uniform_int_distribution<int> pd(0, i - 1);
      const int j = pd(rng);
      const bool flip = directed && std::uniform_int_distribution<int>(0, 1)(rng) == 1;
      const int a = flip ? i : j;
      const int b = flip ? j : i;
      edges.push_back({a, b});
      mark(a, b);
    }
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j || seen.count({i, j})) continue;
      if (coin(rng) < edge_prob) {
        edges.push_back({i, j});
        mark(i, j);
      }
    }
  }
  return connesdist::Graph::build(n, edges, directed);
}

inline connesdist::VertexVector random_function(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  connesdist::VertexVector f(n);
  for (int i = 0; i < n; ++i) f[i] = gauss(rng);
  return f;
}

}  // namespace testutil
