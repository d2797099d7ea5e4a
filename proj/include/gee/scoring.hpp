#pragma once

// Joint alpha search: one model fit per grid value serves both scores. Each score keeps its
// own stopping rule, so the results equal those of two separate searches.

#include <optional>

#include "gee/graph.hpp"
#include "gee/scoring_global.hpp"
#include "gee/scoring_local.hpp"
#include "gee/search.hpp"

namespace gee {

struct ScoreSelection {
  bool global = true;
  bool local = true;
};

struct EmbeddingScores {
  std::optional<GlobalScoreResult> global;
  std::optional<LocalScoreResult> local;
  std::size_t fits = 0;
};

/// Exact-mode scores. `partition` may be null when only the local score is requested.
/// Throws when every fit on the grid fails for a requested score.
EmbeddingScores score_exact(const Graph& graph, const Embedding& embedding, const Partition* partition,
                            const SearchOptions& options, ScoreSelection which = {});

}  // namespace gee
