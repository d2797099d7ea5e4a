#pragma once

// Deterministic synthetic graphs and embeddings for tests and benchmarks.

#include <cstddef>
#include <cstdint>
#include <utility>

#include "gee/graph.hpp"

namespace gee {

struct SbmParams {
  std::size_t n = 0;
  std::size_t blocks = 0;
  double p_in = 0.0;
  double p_out = 0.0;
  bool directed = false;
};

/// Planted partition: near-equal blocks (sizes differ by at most one, node i in block
/// i * blocks / n), independent Bernoulli edges per ordered (directed) or unordered pair.
std::pair<Graph, Partition> gen_sbm(const SbmParams& params, std::uint64_t seed);

/// Community centers at least `spread` apart, node = center + N(0, (noise * spread)^2) per axis.
Embedding gen_embedding(const Partition& partition, std::size_t k, double spread, double noise, std::uint64_t seed);

struct RewireResult {
  Graph graph;
  std::size_t requested = 0;
  std::size_t rewired = 0;
};

/// Moves round(fraction * |internal edges|) intra-community edges of each community to random
/// intra-community non-edges, keeping their weights. Degrees are not preserved.
RewireResult rewire_within(const Graph& graph, const Partition& partition, double fraction, std::uint64_t seed);

/// coords <- centroid + factor * (coords - centroid), per community with the unweighted mean.
Embedding rescale_communities(const Embedding& embedding, const Partition& partition, double factor);

}  // namespace gee
