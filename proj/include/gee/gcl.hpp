#pragma once

// Geometric Chung-Lu null model.
//
// Each ordered pair (i, j), i != j, forms an edge with probability
//     p_ij = x_out[i] * x_in[j] * g(d_ij),   g(d) = ((d_max - d) / (d_max - d_min))^alpha,
// where the weights are tuned so that every node's expected out- and in-strength matches the
// graph. Undirected graphs use one weight per node (x_out == x_in). The loops variant adds
// p_ii = x_out[i] * x_in[i] * g(d_ii) for a per-node self distance; landmark graphs use it.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "gee/graph.hpp"

namespace gee {

enum class Metric { euclidean, manhattan };

double distance(std::span<const double> a, std::span<const double> b, Metric metric = Metric::euclidean);

struct DistanceRange {
  double min = 0.0;
  double max = 0.0;
};

/// Minimum over distinct node pairs and maximum over all pairs. O(n^2 k).
/// Throws when every point coincides. For equidistant points (max == min) the kernel is 1.
DistanceRange distance_extremes(const Embedding& embedding, Metric metric = Metric::euclidean);

/// Bounds applied to the normalized distance before exponentiation.
struct Clip {
  double lo = 0.001;
  double hi = 0.999;
};

class DistanceKernel {
 public:
  DistanceKernel(double alpha, double d_min, double d_max, std::optional<Clip> clip = std::nullopt);

  /// g(d); throws for d outside [d_min, d_max].
  double operator()(double d) const;
  /// g(d) with d first clamped into [d_min, d_max].
  double eval_clamped(double d) const;

  double alpha() const noexcept { return alpha_; }
  double d_min() const noexcept { return d_min_; }
  double d_max() const noexcept { return d_max_; }
  const std::optional<Clip>& clip() const noexcept { return clip_; }

 private:
  double normalized(double d) const;

  double alpha_;
  double d_min_;
  double d_max_;
  std::optional<Clip> clip_;
};

/// Point set the model measures distances on: node coordinates, or landmark positions with
/// per-landmark self distances.
class Geometry {
 public:
  Geometry(const Embedding& embedding, Metric metric = Metric::euclidean);
  Geometry(std::size_t n, std::size_t k, std::vector<double> coords, Metric metric,
           std::vector<double> self_distance = {});

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  Metric metric() const noexcept { return metric_; }
  std::span<const double> row(std::size_t i) const { return {coords_.data() + i * k_, k_}; }

  /// Pairwise distance; for i == j the self distance (0 when none was given).
  double distance(std::size_t i, std::size_t j) const;

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<double> coords_;
  Metric metric_;
  std::vector<double> self_distance_;
};

enum class Feasibility {
  feasible,
  star,       ///< one node is an endpoint of every edge
  two_nodes,  ///< the m = 2 case
};

const char* to_string(Feasibility f);

/// Checks, for every node j, that total in-strength and total out-strength both exceed
/// w_out[j] + w_in[j]. Failure means j touches every edge.
Feasibility check_feasibility(const Graph& graph);

/// Target strengths for the weight system.
struct DegreeTargets {
  std::vector<double> out;
  std::vector<double> in;
  bool directed = true;

  static DegreeTargets of(const Graph& graph);
};

struct FitOptions {
  double tol = 1e-8;
  int max_iter = 2000;
  double damping = 0.8;
  Metric metric = Metric::euclidean;
  std::optional<Clip> clip;
  /// Multipliers applied to the default starting weights.
  double init_scale_out = 1.0;
  double init_scale_in = 1.0;
};

/// Starting point for a fit, e.g. the solution at the previous alpha.
struct WeightGuess {
  std::vector<double> out;
  std::vector<double> in;
};

struct GclModel {
  DistanceKernel kernel{0.0, 0.0, 1.0};
  std::shared_ptr<const Geometry> geometry;
  std::vector<double> x_out;
  std::vector<double> x_in;
  bool directed = true;
  bool loops = false;
  /// Evaluate g on clamped distances; set for node-level models built from landmark kernels.
  bool clamp_distances = false;

  std::optional<Feasibility> degenerate;
  /// Exact edge probabilities for degenerate graphs, keyed by src * n + dst.
  std::unordered_map<std::uint64_t, double> deterministic_p;

  double fit_residual = 0.0;
  int iterations = 0;
  /// Ordered pairs with p_ij > 1.
  std::size_t overshoot_count = 0;

  std::size_t n() const noexcept;
  /// Raw p_ij (not clamped). For i == j: the loop term when loops are enabled, else 0.
  double probability(std::size_t i, std::size_t j) const;
};

/// Solves the weight system for the given geometry by damped alternating fixed-point sweeps.
/// Throws FitError when max_iter is reached or a node with positive target has no partner
/// with a positive kernel value.
GclModel fit_weights(const DegreeTargets& targets, std::shared_ptr<const Geometry> geometry,
                     const DistanceKernel& kernel, bool allow_loops, const FitOptions& options = {},
                     const WeightGuess* guess = nullptr);

/// Fits the model for a graph and embedding at one alpha. Degenerate graphs (star, two nodes)
/// get deterministic probabilities equal to the adjacency weights, with no iteration.
GclModel fit(const Graph& graph, const Embedding& embedding, double alpha, const FitOptions& options = {},
             const WeightGuess* guess = nullptr);

/// Same as above with a prebuilt geometry and distance range, shared across alphas.
GclModel fit(const Graph& graph, std::shared_ptr<const Geometry> geometry, DistanceRange range, double alpha,
             const FitOptions& options = {}, const WeightGuess* guess = nullptr);

/// Row-major l x l matrix.
struct BlockMatrix {
  std::size_t communities = 0;
  std::vector<double> mass;

  double operator()(std::size_t i, std::size_t j) const { return mass[i * communities + j]; }
};

/// Expected edge mass between and within groups, normalized to sum to 1. `labels[i]` is the
/// group of model node i. Directed: entry (a, b) sums p_uv over u in a, v in b. Undirected:
/// unordered pairs accumulate into the upper triangle. Loop terms count toward the diagonal.
/// `capped[i]` marks model nodes standing for a single graph node; p_uv is clamped at 1 when
/// both u and v are marked. Empty: no clamping.
BlockMatrix block_mass(const GclModel& model, std::span<const std::uint32_t> labels, std::size_t communities,
                       std::span<const char> capped = {});

/// Clamps every pair for unweighted graphs.
BlockMatrix expected_block_mass(const GclModel& model, const Graph& graph, const Partition& partition);

}  // namespace gee
