#pragma once

// Landmark approximation for large graphs. The community partition is refined into n' groups
// of nearby nodes; each group becomes a landmark at its strength-weighted centroid carrying a
// self-loop whose distance sqrt(e_i / sum w_j) encodes the group's spread. The null model is
// fitted on landmarks only, and node weights are inherited proportionally to node strength.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "gee/gcl.hpp"
#include "gee/graph.hpp"
#include "gee/scoring.hpp"

namespace gee {

struct LandmarkSet {
  std::size_t n_prime = 0;
  std::size_t k = 0;
  /// n' x k, row-major.
  std::vector<double> positions;
  /// Strength-weighted sum of squared distances to the centroid.
  std::vector<double> spread;
  std::vector<double> self_distance;
  std::vector<std::uint32_t> member_of;
  std::vector<double> w_prime_out;
  std::vector<double> w_prime_in;
  std::vector<std::uint32_t> community_of;
};

/// max(ceil(4 sqrt(n)), 4 l), capped at n.
std::size_t default_landmark_count(std::size_t n, std::size_t communities);

/// Refines the partition by repeatedly 2-means splitting the part with the largest spread until
/// there are `n_prime_target` parts (or nothing is left to split). When the target is below
/// the community count, every community is instead split into up to `split_factor` parts.
/// Centroid weights are total strength (w_in + w_out for directed graphs).
LandmarkSet refine_partition(const Graph& graph, const Embedding& embedding, const Partition& partition,
                             std::size_t n_prime_target, std::uint64_t seed, std::size_t split_factor = 4,
                             Metric metric = Metric::euclidean);

struct LandmarkConfig {
  /// 0 selects default_landmark_count.
  std::size_t n_prime = 0;
  std::size_t split_factor = 4;
  bool loops = true;
};

/// Kernel range for landmark mode: extremes over landmark positions widened by the largest
/// self distance on both ends.
DistanceRange landmark_distance_range(const LandmarkSet& landmarks, Metric metric);

/// Loops-enabled fit on the landmark graph.
GclModel fit_landmarks(const LandmarkSet& landmarks, bool directed, double alpha, const FitOptions& options,
                       bool loops = true, const WeightGuess* guess = nullptr);

/// Node-level model with weights x_k = x'_i * w_k / sum_{j in part i} w_j (per side), the landmark
/// kernel, and true node distances.
GclModel inherit_model(const GclModel& landmark_model, const LandmarkSet& landmarks, const Graph& graph,
                       std::shared_ptr<const Geometry> node_geometry);

EmbeddingScores score_landmarks(const Graph& graph, const Embedding& embedding, const Partition& partition,
                                const SearchOptions& options, const LandmarkConfig& config,
                                ScoreSelection which = {});

GlobalScoreResult approx_global_score(const Graph& graph, const Embedding& embedding, const Partition& partition,
                                      const SearchOptions& options = {}, const LandmarkConfig& config = {});

LocalScoreResult approx_local_score(const Graph& graph, const Embedding& embedding, const Partition& partition,
                                    const SearchOptions& options = {}, const LandmarkConfig& config = {});

}  // namespace gee
