#pragma once

// Community detection used when no partition is supplied. Directed graphs are clustered on
// their symmetrization A_uv = w(u,v) + w(v,u).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gee/graph.hpp"

namespace gee {

/// Newman modularity of the partition on the symmetrized graph.
double modularity(const Graph& graph, const Partition& partition);

/// Two-phase Louvain (local moving + aggregation). The seed fixes the node visiting order.
Partition louvain(const Graph& graph, std::uint64_t seed);

/// Single local-moving pass on the original graph (no aggregation).
Partition louvain_level1(const Graph& graph, std::uint64_t seed);

struct EcgOptions {
  std::size_t ensemble_size = 16;
  double min_weight = 0.05;
};

/// Undirected edge of the symmetrized graph with its ECG co-clustering weight.
struct EcgWeight {
  NodeIndex u = 0;
  NodeIndex v = 0;
  double weight = 0.0;
};

/// Co-clustering weights max(fraction of level-1 passes that co-cluster u and v, min_weight).
std::vector<EcgWeight> ecg_weights(const Graph& graph, const EcgOptions& options, std::uint64_t seed);

/// Ensemble clustering: Louvain on the graph re-weighted by `ecg_weights`.
Partition ecg(const Graph& graph, const EcgOptions& options, std::uint64_t seed);

}  // namespace gee
