#include "gee/scoring.hpp"

#include <memory>

#include "gee/error.hpp"
#include "search_driver.hpp"

namespace gee {

EmbeddingScores score_exact(const Graph& graph, const Embedding& embedding, const Partition* partition,
                            const SearchOptions& options, ScoreSelection which) {
  if (embedding.n() != graph.n()) throw Error("embedding size does not match the graph");
  if (which.global) {
    if (!partition) throw Error("the global score needs a partition");
    if (partition->n() != graph.n()) throw Error("partition size does not match the graph");
    partition->require_scorable();
  }

  const auto geometry = std::make_shared<const Geometry>(embedding, options.fit.metric);
  const DistanceRange range = distance_extremes(embedding, options.fit.metric);
  std::optional<DensityVector> observed;
  if (which.global) observed = graph_density_vector(graph, *partition);
  std::optional<PairSample> sample;
  if (which.local) sample = sample_pairs(graph, options.auc_samples, options.seed);
  const bool weighted_auc = options.weighted_auc.value_or(graph.weighted());

  std::optional<WeightGuess> previous;
  return detail::run_alpha_search(options, which, [&](double alpha, bool want_global, bool want_local) {
    GclModel model = fit(graph, geometry, range, alpha, options.fit, previous ? &*previous : nullptr);
    if (!model.degenerate) previous = WeightGuess{model.x_out, model.x_in};
    detail::AlphaEvaluation eval;
    eval.clamped_pairs = model.overshoot_count;
    if (want_global) {
      eval.divergence = density_divergence(*observed, model_density_vector(model, graph, *partition), options.split_jsd);
    }
    if (want_local) eval.auc = auc_estimate(model, *sample, weighted_auc);
    return eval;
  });
}

}  // namespace gee
