#include "gee/scoring_global.hpp"

#include <algorithm>
#include <cmath>

#include "gee/error.hpp"
#include "gee/scoring.hpp"

namespace gee {

DensityVector flatten_blocks(const BlockMatrix& blocks, bool directed) {
  const std::size_t l = blocks.communities;
  DensityVector v;
  v.communities = l;
  v.directed = directed;
  v.entries.reserve(directed ? l * l : l * (l - 1) / 2 + l);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = i + 1; j < l; ++j) {
      v.entries.push_back(blocks(i, j));
      if (directed) v.entries.push_back(blocks(j, i));
    }
  }
  for (std::size_t i = 0; i < l; ++i) v.entries.push_back(blocks(i, i));
  return v;
}

DensityVector graph_density_vector(const Graph& graph, const Partition& partition) {
  if (partition.n() != graph.n()) throw Error("partition size does not match the graph");
  const std::size_t l = partition.count();
  BlockMatrix blocks{l, std::vector<double>(l * l, 0.0)};
  for (const Edge& e : graph.edges()) {
    std::size_t a = partition[e.src];
    std::size_t b = partition[e.dst];
    if (!graph.directed() && b < a) std::swap(a, b);
    blocks.mass[a * l + b] += e.weight;
  }
  for (double& m : blocks.mass) m /= graph.total_weight();
  return flatten_blocks(blocks, graph.directed());
}

DensityVector model_density_vector(const GclModel& model, const Graph& graph, const Partition& partition) {
  return flatten_blocks(expected_block_mass(model, graph, partition), graph.directed());
}

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error("jsd: vectors differ in length");
  // Sum of the per-entry terms of KL(p || m) + KL(q || m), m = (p + q) / 2.
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) acc += p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) acc += q[i] * std::log2(q[i] / m);
  }
  return std::clamp(0.5 * acc, 0.0, 1.0);
}

namespace {

// JSD of two sub-vectors after renormalizing each to unit mass. An all-zero side matches only
// another all-zero side.
double renormalized_jsd(std::span<const double> p, std::span<const double> q) {
  double sp = 0.0;
  double sq = 0.0;
  for (double v : p) sp += v;
  for (double v : q) sq += v;
  if (sp <= 0.0 || sq <= 0.0) return (sp <= 0.0 && sq <= 0.0) ? 0.0 : 1.0;
  std::vector<double> pn(p.begin(), p.end());
  std::vector<double> qn(q.begin(), q.end());
  for (double& v : pn) v /= sp;
  for (double& v : qn) v /= sq;
  return jsd(pn, qn);
}

}  // namespace

double split_jsd(const DensityVector& c, const DensityVector& b) {
  if (c.entries.size() != b.entries.size() || c.communities != b.communities) {
    throw Error("split_jsd: vectors differ in shape");
  }
  return 0.5 * (renormalized_jsd(c.external(), b.external()) + renormalized_jsd(c.internal(), b.internal()));
}

double density_divergence(const DensityVector& c, const DensityVector& b, bool split) {
  return split ? split_jsd(c, b) : jsd(c.entries, b.entries);
}

GlobalScoreResult global_score(const Graph& graph, const Embedding& embedding, const Partition& partition,
                               const SearchOptions& options) {
  auto scores = score_exact(graph, embedding, &partition, options, ScoreSelection{true, false});
  return std::move(*scores.global);
}

}  // namespace gee
