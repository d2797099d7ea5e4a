#include "gee/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "gee/error.hpp"
#include "gee/gcl.hpp"
#include "gee/rng.hpp"

namespace gee {

std::pair<Graph, Partition> gen_sbm(const SbmParams& params, std::uint64_t seed) {
  const std::size_t n = params.n;
  if (params.blocks < 1 || params.blocks > n) throw Error("block count must lie in [1, n]");
  if (!(params.p_out >= 0.0 && params.p_out < params.p_in && params.p_in <= 1.0)) {
    throw Error("SBM needs 0 <= p_out < p_in <= 1");
  }
  std::vector<std::int64_t> block(n);
  for (std::size_t i = 0; i < n; ++i) block[i] = static_cast<std::int64_t>(i * params.blocks / n);

  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = params.directed ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      const double p = block[i] == block[j] ? params.p_in : params.p_out;
      if (unif(rng) < p) edges.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), 1.0});
    }
  }
  Graph graph = Graph::from_edges(n, std::move(edges), params.directed);
  return {std::move(graph), Partition::from_labels(block)};
}

Embedding gen_embedding(const Partition& partition, std::size_t k, double spread, double noise, std::uint64_t seed) {
  if (k < 2) throw Error("embedding dimension must be at least 2");
  if (!(spread > 0.0)) throw Error("spread must be positive");
  if (!(noise >= 0.0)) throw Error("noise must be non-negative");
  const std::size_t l = partition.count();
  Rng rng(seed);

  // Rejection-sample centers in a cube; the cube grows when placement keeps failing.
  std::vector<std::vector<double>> centers;
  double side = 2.0 * spread * std::ceil(std::pow(static_cast<double>(l), 1.0 / static_cast<double>(k)));
  std::size_t failures = 0;
  while (centers.size() < l) {
    std::uniform_real_distribution<double> coord(0.0, side);
    std::vector<double> c(k);
    for (double& x : c) x = coord(rng);
    const bool ok = std::all_of(centers.begin(), centers.end(),
                                [&](const std::vector<double>& other) { return distance(c, other) >= spread; });
    if (ok) {
      centers.push_back(std::move(c));
      failures = 0;
    } else if (++failures > 200) {
      side *= 1.5;
      failures = 0;
    }
  }

  std::normal_distribution<double> gauss(0.0, noise * spread);
  std::vector<double> coords(partition.n() * k);
  for (std::size_t i = 0; i < partition.n(); ++i) {
    const auto& c = centers[partition[i]];
    for (std::size_t d = 0; d < k; ++d) coords[i * k + d] = c[d] + (noise > 0.0 ? gauss(rng) : 0.0);
  }
  return Embedding(partition.n(), k, std::move(coords));
}

RewireResult rewire_within(const Graph& graph, const Partition& partition, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error("rewiring fraction must lie in [0, 1]");
  if (partition.n() != graph.n()) throw Error("partition size does not match the graph");
  Rng rng(seed);
  const std::size_t l = partition.count();
  const auto members = partition.members();

  std::vector<std::vector<std::size_t>> internal(l);
  for (std::size_t e = 0; e < graph.edges().size(); ++e) {
    const Edge& edge = graph.edges()[e];
    if (partition[edge.src] == partition[edge.dst]) internal[partition[edge.src]].push_back(e);
  }

  std::vector<Edge> edges(graph.edges().begin(), graph.edges().end());
  RewireResult result{graph, 0, 0};
  for (std::size_t c = 0; c < l; ++c) {
    const std::size_t want = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(internal[c].size())));
    result.requested += want;
    if (want == 0) continue;

    std::vector<std::pair<NodeIndex, NodeIndex>> free_pairs;
    const auto& mem = members[c];
    for (std::size_t a = 0; a < mem.size(); ++a) {
      for (std::size_t b = graph.directed() ? 0 : a + 1; b < mem.size(); ++b) {
        if (a == b || graph.has_edge(mem[a], mem[b])) continue;
        free_pairs.emplace_back(mem[a], mem[b]);
      }
    }
    std::shuffle(free_pairs.begin(), free_pairs.end(), rng);
    std::vector<std::size_t> victims = internal[c];
    std::shuffle(victims.begin(), victims.end(), rng);
    const std::size_t moves = std::min(want, free_pairs.size());
    for (std::size_t i = 0; i < moves; ++i) {
      Edge& e = edges[victims[i]];
      e.src = free_pairs[i].first;
      e.dst = free_pairs[i].second;
    }
    result.rewired += moves;
  }
  result.graph = Graph(graph.ids(), std::move(edges), graph.directed(), graph.weighted());
  return result;
}

Embedding rescale_communities(const Embedding& embedding, const Partition& partition, double factor) {
  if (!(factor >= 1.0)) throw Error("rescaling factor must be at least 1");
  if (partition.n() != embedding.n()) throw Error("partition size does not match the embedding");
  const std::size_t k = embedding.k();
  const std::size_t l = partition.count();
  std::vector<double> centroid(l * k, 0.0);
  std::vector<std::size_t> size(l, 0);
  for (std::size_t i = 0; i < embedding.n(); ++i) {
    const auto row = embedding.row(i);
    ++size[partition[i]];
    for (std::size_t d = 0; d < k; ++d) centroid[partition[i] * k + d] += row[d];
  }
  for (std::size_t c = 0; c < l; ++c) {
    for (std::size_t d = 0; d < k; ++d) centroid[c * k + d] /= static_cast<double>(size[c]);
  }
  std::vector<double> coords(embedding.coords().begin(), embedding.coords().end());
  if (factor == 1.0) return Embedding(embedding.n(), k, std::move(coords));
  for (std::size_t i = 0; i < embedding.n(); ++i) {
    const double* c = &centroid[partition[i] * k];
    for (std::size_t d = 0; d < k; ++d) coords[i * k + d] = c[d] + factor * (coords[i * k + d] - c[d]);
  }
  return Embedding(embedding.n(), k, std::move(coords));
}

}  // namespace gee
