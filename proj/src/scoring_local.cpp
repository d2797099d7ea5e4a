#include "gee/scoring_local.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gee/error.hpp"
#include "gee/rng.hpp"
#include "gee/scoring.hpp"

namespace gee {

PairSample sample_pairs(const Graph& graph, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw Error("sample size must be positive");
  const std::size_t n = graph.n();
  const std::size_t m = graph.edges().size();
  if (m == 0) throw Error("graph has no edges to sample");
  const std::size_t ordered_edges = graph.directed() ? m : 2 * m;
  if (ordered_edges >= n * (n - 1)) throw Error("graph is complete: no non-adjacent pairs to sample");

  PairSample s;
  s.seed = seed;
  s.positives.reserve(k);
  s.positive_weights.reserve(k);
  s.negatives.reserve(k);

  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick_edge(0, m - 1);
  std::uniform_int_distribution<NodeIndex> pick_node(0, static_cast<NodeIndex>(n - 1));
  std::bernoulli_distribution flip(0.5);
  for (std::size_t i = 0; i < k; ++i) {
    const Edge& e = graph.edges()[pick_edge(rng)];
    if (!graph.directed() && flip(rng)) {
      s.positives.emplace_back(e.dst, e.src);
    } else {
      s.positives.emplace_back(e.src, e.dst);
    }
    s.positive_weights.push_back(e.weight);
  }

  const std::size_t max_attempts = 100 * k;
  std::size_t attempts = 0;
  while (s.negatives.size() < k) {
    if (attempts++ >= max_attempts) {
      throw Error("negative sampling gave up after " + std::to_string(max_attempts) + " attempts");
    }
    const NodeIndex u = pick_node(rng);
    const NodeIndex v = pick_node(rng);
    if (u == v || graph.has_edge(u, v)) continue;
    s.negatives.emplace_back(u, v);
  }
  return s;
}

double compare_probabilities(double p_pos, double p_neg) {
  const double scale = std::max(std::abs(p_pos), std::abs(p_neg));
  if (std::abs(p_pos - p_neg) <= kTieTolerance * scale) return 0.5;
  return p_pos > p_neg ? 1.0 : 0.0;
}

double auc_ci_halfwidth(double p_hat, std::size_t k) {
  const double var = std::max(0.0, p_hat * (1.0 - p_hat));
  return 1.96 * std::sqrt(var / static_cast<double>(k));
}

AucEstimate auc_estimate(const GclModel& model, const PairSample& sample, bool weighted) {
  const std::size_t k = sample.k();
  if (k == 0 || sample.negatives.size() != k) throw Error("pair sample is empty or unbalanced");
  double mean_weight = 1.0;
  if (weighted) {
    double sum = 0.0;
    for (double w : sample.positive_weights) sum += w;
    mean_weight = sum / static_cast<double>(k);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto [s, t] = sample.positives[i];
    const auto [u, v] = sample.negatives[i];
    const double indicator = compare_probabilities(model.probability(s, t), model.probability(u, v));
    acc += weighted ? indicator * sample.positive_weights[i] / mean_weight : indicator;
  }
  AucEstimate est;
  est.p_hat = std::clamp(acc / static_cast<double>(k), 0.0, 1.0);
  est.ci_halfwidth = auc_ci_halfwidth(est.p_hat, k);
  return est;
}

LocalScoreResult local_score(const Graph& graph, const Embedding& embedding, const SearchOptions& options) {
  auto scores = score_exact(graph, embedding, nullptr, options, ScoreSelection{false, true});
  return std::move(*scores.local);
}

}  // namespace gee
