#pragma once

#include <optional>

#include "gee/error.hpp"
#include "gee/scoring.hpp"

namespace gee::detail {

struct AlphaEvaluation {
  std::optional<double> divergence;
  std::optional<AucEstimate> auc;
  std::size_t clamped_pairs = 0;
};

/// Walks the alpha grid until both requested searches have run out of patience.
/// `evaluate(alpha, want_global, want_local)` fits one model and returns the requested
/// quantities; a FitError marks the alpha as failed for both.
template <typename Evaluate>
EmbeddingScores run_alpha_search(const SearchOptions& options, ScoreSelection which, Evaluate&& evaluate) {
  if (!(options.alpha_step > 0.0)) throw Error("alpha step must be positive");
  if (options.patience < 1) throw Error("patience must be at least 1");
  AlphaTracker global(options.patience);
  AlphaTracker local(options.patience);
  std::size_t clamped_at_best = 0;
  std::optional<double> ci_at_best;
  EmbeddingScores out;

  for (double alpha : alpha_grid(options)) {
    const bool want_global = which.global && global.active();
    const bool want_local = which.local && local.active();
    if (!want_global && !want_local) break;
    AlphaEvaluation eval;
    try {
      eval = evaluate(alpha, want_global, want_local);
      ++out.fits;
    } catch (const FitError&) {
      if (want_global) global.record_failure(alpha);
      if (want_local) local.record_failure(alpha);
      continue;
    }
    if (want_global && global.record(alpha, *eval.divergence, *eval.divergence)) clamped_at_best = eval.clamped_pairs;
    if (want_local && local.record(alpha, 1.0 - eval.auc->p_hat, eval.auc->p_hat)) ci_at_best = eval.auc->ci_halfwidth;
  }

  if (which.global) {
    if (!global.has_value()) throw Error("global score: every fit on the alpha grid failed");
    GlobalScoreResult r;
    r.score = global.best();
    r.best_alpha = global.best_alpha();
    r.curve = global.curve();
    r.failed_alphas = global.failures();
    r.clamped_pairs = clamped_at_best;
    out.global = std::move(r);
  }
  if (which.local) {
    if (!local.has_value()) throw Error("local score: every fit on the alpha grid failed");
    LocalScoreResult r;
    r.score = local.best();
    r.best_alpha = local.best_alpha();
    r.ci_halfwidth = ci_at_best.value_or(0.0);
    r.curve = local.curve();
    r.failed_alphas = local.failures();
    out.local = std::move(r);
  }
  return out;
}

}  // namespace gee::detail
