#pragma once

// Small graph and embedding builders shared by the test binaries.

#include <cmath>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "gee/gcl.hpp"
#include "gee/graph.hpp"

namespace fixtures {

inline gee::Graph graph_of(std::size_t n, std::vector<std::pair<int, int>> pairs, bool directed) {
  std::vector<gee::Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({static_cast<gee::NodeIndex>(u), static_cast<gee::NodeIndex>(v), 1.0});
  return gee::Graph::from_edges(n, std::move(edges), directed);
}

/// Two 5-cliques {0..4} and {5..9} joined by the edge 4-5.
inline gee::Graph two_cliques() {
  std::vector<std::pair<int, int>> pairs;
  for (int base : {0, 5}) {
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) pairs.emplace_back(base + i, base + j);
    }
  }
  pairs.emplace_back(4, 5);
  return graph_of(10, pairs, false);
}

/// Random digraph with edge probability p that avoids the star and two-node cases.
inline gee::Graph random_digraph(std::size_t n, double p, std::mt19937_64& rng, bool weighted = false) {
  std::bernoulli_distribution coin(p);
  std::uniform_real_distribution<double> wdist(0.5, 3.0);
  for (;;) {
    std::vector<gee::Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && coin(rng)) {
          edges.push_back({static_cast<gee::NodeIndex>(i), static_cast<gee::NodeIndex>(j), weighted ? wdist(rng) : 1.0});
        }
      }
    }
    if (edges.size() < 3) continue;
    gee::Graph g = gee::Graph::from_edges(n, std::move(edges), true, weighted);
    if (gee::check_feasibility(g) == gee::Feasibility::feasible) return g;
  }
}

inline gee::Embedding random_embedding(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> coords(n * k);
  for (double& x : coords) x = gauss(rng);
  return gee::Embedding(n, k, std::move(coords));
}

/// Dense p matrix from the model's public accessors.
inline std::vector<std::vector<double>> p_matrix(const gee::GclModel& m) {
  std::vector<std::vector<double>> p(m.n(), std::vector<double>(m.n(), 0.0));
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t j = 0; j < m.n(); ++j) p[i][j] = m.probability(i, j);
  }
  return p;
}

}  // namespace fixtures
