#pragma once

// Global (density based) score: JSD between the observed community-block edge distribution and
// the one expected under the fitted null model, minimized over alpha.

#include <cstddef>
#include <span>
#include <vector>

#include "gee/gcl.hpp"
#include "gee/graph.hpp"
#include "gee/search.hpp"

namespace gee {

/// Block distribution flattened as (c_12, c_21, c_13, c_31, ..., c_{l-1,l}, c_{l,l-1}, c_1, ..., c_l).
/// Undirected vectors carry one entry per unordered pair: (c_12, c_13, ..., c_{l-1,l}, c_1, ..., c_l).
struct DensityVector {
  std::vector<double> entries;
  std::size_t communities = 0;
  bool directed = true;

  std::size_t external_size() const noexcept { return entries.size() - communities; }
  std::span<const double> external() const { return {entries.data(), external_size()}; }
  std::span<const double> internal() const { return {entries.data() + external_size(), communities}; }
};

/// Flattens a block matrix into the canonical order.
DensityVector flatten_blocks(const BlockMatrix& blocks, bool directed);

/// Observed edge-weight proportions per block; does not depend on any embedding.
DensityVector graph_density_vector(const Graph& graph, const Partition& partition);

/// Expected proportions under the fitted model.
DensityVector model_density_vector(const GclModel& model, const Graph& graph, const Partition& partition);

/// Jensen-Shannon divergence in bits, with 0 log 0 = 0. Result lies in [0, 1].
double jsd(std::span<const double> p, std::span<const double> q);

/// Mean of the JSDs of the renormalized external and internal sub-vectors.
double split_jsd(const DensityVector& c, const DensityVector& b);

/// JSD of the full vectors or the split variant.
double density_divergence(const DensityVector& c, const DensityVector& b, bool split);

struct GlobalScoreResult {
  double score = 0.0;
  double best_alpha = 0.0;
  std::vector<CurvePoint> curve;
  std::vector<double> failed_alphas;
  /// Pairs with p > 1 in the model at best_alpha.
  std::size_t clamped_pairs = 0;
};

GlobalScoreResult global_score(const Graph& graph, const Embedding& embedding, const Partition& partition,
                               const SearchOptions& options = {});

}  // namespace gee
