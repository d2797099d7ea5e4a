#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gee/gcl.hpp"

namespace gee {

/// Settings shared by the alpha grid searches of both scores.
struct SearchOptions {
  double alpha_step = 0.25;
  double alpha_max = 32.0;
  /// Stop after this many consecutive non-improving grid values.
  int patience = 5;
  bool split_jsd = false;
  std::size_t auc_samples = 10000;
  std::uint64_t seed = 0;
  /// Weighted AUC; unset means "when the graph is weighted".
  std::optional<bool> weighted_auc;
  FitOptions fit;
};

struct CurvePoint {
  double alpha = 0.0;
  double value = 0.0;
};

/// Tracks one grid search: the running minimum and the patience counter. A failed evaluation
/// counts as non-improving.
class AlphaTracker {
 public:
  explicit AlphaTracker(int patience) : patience_(patience) {}

  bool active() const noexcept { return stale_ < patience_; }
  bool has_value() const noexcept { return best_alpha_.has_value(); }
  double best() const noexcept { return best_; }
  double best_alpha() const noexcept { return best_alpha_.value_or(std::numeric_limits<double>::quiet_NaN()); }
  const std::vector<CurvePoint>& curve() const noexcept { return curve_; }
  const std::vector<double>& failures() const noexcept { return failures_; }

  /// Records value(alpha); `reported` is what goes in the curve. Returns true on improvement.
  bool record(double alpha, double value, double reported) {
    curve_.push_back({alpha, reported});
    if (!best_alpha_ || value < best_) {
      best_ = value;
      best_alpha_ = alpha;
      stale_ = 0;
      return true;
    }
    ++stale_;
    return false;
  }

  void record_failure(double alpha) {
    failures_.push_back(alpha);
    ++stale_;
  }

 private:
  int patience_;
  int stale_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  std::optional<double> best_alpha_;
  std::vector<CurvePoint> curve_;
  std::vector<double> failures_;
};

/// alpha_t = t * step for t = 0, 1, ... while alpha_t <= alpha_max.
inline std::vector<double> alpha_grid(const SearchOptions& options) {
  std::vector<double> grid;
  for (std::size_t t = 0;; ++t) {
    const double a = static_cast<double>(t) * options.alpha_step;
    if (a > options.alpha_max * (1.0 + 1e-12)) break;
    grid.push_back(a);
  }
  return grid;
}

}  // namespace gee
