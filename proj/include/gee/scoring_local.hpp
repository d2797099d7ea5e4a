#pragma once

// Local (link based) score: one minus the best AUC of null-model edge probabilities as a link
// predictor, estimated on a sample of edges and non-edges.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "gee/gcl.hpp"
#include "gee/graph.hpp"
#include "gee/search.hpp"

namespace gee {

using NodePair = std::pair<NodeIndex, NodeIndex>;

struct PairSample {
  std::vector<NodePair> positives;
  std::vector<double> positive_weights;
  std::vector<NodePair> negatives;
  std::uint64_t seed = 0;

  std::size_t k() const noexcept { return positives.size(); }
};

/// k edges uniformly with replacement and k ordered non-adjacent pairs (u != v) by rejection
/// sampling, giving up after 100 k attempts. Undirected edges get a random orientation.
PairSample sample_pairs(const Graph& graph, std::size_t k, std::uint64_t seed);

struct AucEstimate {
  double p_hat = 0.0;
  double ci_halfwidth = 0.0;
};

/// Relative gap below which two probabilities compare as tied.
inline constexpr double kTieTolerance = 1e-9;

/// 1, 0.5 or 0 for p_pos >, ~=, < p_neg.
double compare_probabilities(double p_pos, double p_neg);

/// Fraction of (positive_i, negative_i) pairs ranked correctly, ties counting one half. The
/// weighted variant scales each indicator by the positive's weight over the sample mean weight.
AucEstimate auc_estimate(const GclModel& model, const PairSample& sample, bool weighted);

/// 1.96 sqrt(p (1 - p) / k)
double auc_ci_halfwidth(double p_hat, std::size_t k);

struct LocalScoreResult {
  double score = 0.0;
  double best_alpha = 0.0;
  double ci_halfwidth = 0.0;
  /// (alpha, p_hat) per evaluated alpha.
  std::vector<CurvePoint> curve;
  std::vector<double> failed_alphas;
};

/// Draws one sample and reuses it across the alpha grid.
LocalScoreResult local_score(const Graph& graph, const Embedding& embedding, const SearchOptions& options = {});

}  // namespace gee
