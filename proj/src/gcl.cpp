#include "gee/gcl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gee/error.hpp"
#include "gee/parallel.hpp"

namespace gee {

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  double acc = 0.0;
  if (metric == Metric::manhattan) {
    for (std::size_t c = 0; c < a.size(); ++c) acc += std::abs(a[c] - b[c]);
    return acc;
  }
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double diff = a[c] - b[c];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

DistanceRange distance_extremes(const Embedding& embedding, Metric metric) {
  DistanceRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < embedding.n(); ++i) {
    for (std::size_t j = i + 1; j < embedding.n(); ++j) {
      const double d = distance(embedding.row(i), embedding.row(j), metric);
      r.min = std::min(r.min, d);
      r.max = std::max(r.max, d);
    }
  }
  if (!(r.max > 0.0)) throw Error("embedding has no spread: every point coincides");
  return r;
}

DistanceKernel::DistanceKernel(double alpha, double d_min, double d_max, std::optional<Clip> clip)
    : alpha_(alpha), d_min_(d_min), d_max_(d_max), clip_(clip) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error("alpha must be a finite non-negative number");
  if (!(d_min >= 0.0) || !(d_max >= d_min) || !(d_max > 0.0) || !std::isfinite(d_max)) {
    throw Error("distance range must satisfy 0 <= d_min <= d_max, d_max > 0");
  }
  if (clip_ && !(clip_->lo >= 0.0 && clip_->lo < clip_->hi && clip_->hi <= 1.0)) {
    throw Error("clip bounds must satisfy 0 <= lo < hi <= 1");
  }
}

double DistanceKernel::normalized(double d) const {
  // Equidistant point sets: every pair sits at d_min.
  if (d_max_ == d_min_) return 1.0;
  double t = (d_max_ - d) / (d_max_ - d_min_);
  if (clip_) t = std::clamp(t, clip_->lo, clip_->hi);
  return t;
}

double DistanceKernel::operator()(double d) const {
  if (d < d_min_ || d > d_max_) {
    throw Error("distance " + std::to_string(d) + " outside kernel range [" + std::to_string(d_min_) + ", " +
                std::to_string(d_max_) + "]");
  }
  return std::pow(normalized(d), alpha_);
}

double DistanceKernel::eval_clamped(double d) const {
  return std::pow(normalized(std::clamp(d, d_min_, d_max_)), alpha_);
}

Geometry::Geometry(const Embedding& embedding, Metric metric)
    : n_(embedding.n()),
      k_(embedding.k()),
      coords_(embedding.coords().begin(), embedding.coords().end()),
      metric_(metric) {}

Geometry::Geometry(std::size_t n, std::size_t k, std::vector<double> coords, Metric metric,
                   std::vector<double> self_distance)
    : n_(n), k_(k), coords_(std::move(coords)), metric_(metric), self_distance_(std::move(self_distance)) {
  if (coords_.size() != n_ * k_) throw Error("geometry coordinate count does not match n*k");
  if (!self_distance_.empty() && self_distance_.size() != n_) throw Error("self distance length does not match n");
}

double Geometry::distance(std::size_t i, std::size_t j) const {
  if (i == j) return self_distance_.empty() ? 0.0 : self_distance_[i];
  return gee::distance(row(i), row(j), metric_);
}

const char* to_string(Feasibility f) {
  switch (f) {
    case Feasibility::feasible:
      return "feasible";
    case Feasibility::star:
      return "star";
    case Feasibility::two_nodes:
      return "two_nodes";
  }
  return "unknown";
}

Feasibility check_feasibility(const Graph& graph) {
  if (graph.n() == 2) return Feasibility::two_nodes;
  double total_out = 0.0;
  double total_in = 0.0;
  for (std::size_t i = 0; i < graph.n(); ++i) {
    total_out += graph.w_out()[i];
    total_in += graph.w_in()[i];
  }
  // Undirected strengths count each edge at both ends, so a node touching every edge has
  // w_out + w_in equal to the (doubled) totals as well.
  const double slack = 1e-12 * std::max(total_out, total_in);
  for (std::size_t j = 0; j < graph.n(); ++j) {
    const double own = graph.w_out()[j] + graph.w_in()[j];
    if (!(total_in - own > slack) || !(total_out - own > slack)) return Feasibility::star;
  }
  return Feasibility::feasible;
}

DegreeTargets DegreeTargets::of(const Graph& graph) {
  return DegreeTargets{{graph.w_out().begin(), graph.w_out().end()},
                       {graph.w_in().begin(), graph.w_in().end()},
                       graph.directed()};
}

std::size_t GclModel::n() const noexcept {
  return geometry ? geometry->n() : x_out.size();
}

double GclModel::probability(std::size_t i, std::size_t j) const {
  if (degenerate) {
    auto it = deterministic_p.find(static_cast<std::uint64_t>(i) * n() + j);
    return it == deterministic_p.end() ? 0.0 : it->second;
  }
  if (i == j && !loops) return 0.0;
  const double d = geometry->distance(i, j);
  const double g = (clamp_distances || i == j) ? kernel.eval_clamped(d) : kernel(d);
  return x_out[i] * x_in[j] * g;
}

namespace {

constexpr std::size_t kDenseLimit = 4096;

// Below this size thread start-up costs more than a row sweep.
std::size_t row_threads(std::size_t n) { return n >= 1024 ? thread_count() : 1; }

// Symmetric kernel matrix G with G_ij = g(d_ij) and G_ii = loop kernel (or 0). Dense when it
// fits, otherwise evaluated on the fly.
class KernelOperator {
 public:
  KernelOperator(const Geometry& geometry, const DistanceKernel& kernel, bool loops)
      : geometry_(geometry), kernel_(kernel), loops_(loops), n_(geometry.n()) {
    if (n_ <= kDenseLimit) {
      dense_.assign(n_ * n_, 0.0);
      parallel_for(n_, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n_; ++j) dense_[i * n_ + j] = kernel_(geometry_.distance(i, j));
        if (loops_) dense_[i * n_ + i] = kernel_.eval_clamped(geometry_.distance(i, i));
      }, row_threads(n_));
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < i; ++j) dense_[i * n_ + j] = dense_[j * n_ + i];
      }
    }
  }

  double value(std::size_t i, std::size_t j) const {
    if (!dense_.empty()) return dense_[i * n_ + j];
    if (i == j) return loops_ ? kernel_.eval_clamped(geometry_.distance(i, i)) : 0.0;
    return kernel_(geometry_.distance(i, j));
  }

  /// y = G x
  void apply(std::span<const double> x, std::span<double> y) const {
    parallel_for(n_, [&](std::size_t i) {
      double acc = 0.0;
      if (!dense_.empty()) {
        const double* rowp = dense_.data() + i * n_;
        for (std::size_t j = 0; j < n_; ++j) acc += rowp[j] * x[j];
      } else {
        for (std::size_t j = 0; j < n_; ++j) {
          if (x[j] != 0.0) acc += value(i, j) * x[j];
        }
      }
      y[i] = acc;
    }, row_threads(n_));
  }

 private:
  const Geometry& geometry_;
  const DistanceKernel& kernel_;
  bool loops_;
  std::size_t n_;
  std::vector<double> dense_;
};

double residual(std::span<const double> x, std::span<const double> sums, std::span<const double> target) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(x[i] * sums[i] - target[i]) / std::max(target[i], 1.0));
  }
  return worst;
}

// One damped update x <- (1 - lambda) x + lambda * target / sums. Returns false when a node with
// positive target has no reachable mass.
bool damped_update(std::span<double> x, std::span<const double> sums, std::span<const double> target,
                   double lambda, std::size_t& bad_node) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (target[i] == 0.0) {
      x[i] = 0.0;
      continue;
    }
    if (!(sums[i] > 0.0)) {
      bad_node = i;
      return false;
    }
    x[i] = (1.0 - lambda) * x[i] + lambda * target[i] / sums[i];
  }
  return true;
}

std::vector<double> initial_weights(std::span<const double> target, double total, double scale) {
  std::vector<double> x(target.size());
  const double root = std::sqrt(total);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = scale * target[i] / root;
  return x;
}

}  // namespace

GclModel fit_weights(const DegreeTargets& targets, std::shared_ptr<const Geometry> geometry,
                     const DistanceKernel& kernel, bool allow_loops, const FitOptions& options,
                     const WeightGuess* guess) {
  const std::size_t n = geometry->n();
  if (targets.out.size() != n || targets.in.size() != n) throw Error("degree targets do not match the geometry");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw Error("damping must lie in (0, 1]");

  double total = 0.0;
  for (double w : targets.out) total += w;
  if (!(total > 0.0)) throw Error("degree targets are all zero");

  GclModel model;
  model.kernel = kernel;
  model.geometry = geometry;
  model.directed = targets.directed;
  model.loops = allow_loops;

  const bool warm = guess && guess->out.size() == n && guess->in.size() == n;
  model.x_out = warm ? guess->out : initial_weights(targets.out, total, 1.0);
  model.x_in = warm ? guess->in : initial_weights(targets.in, total, 1.0);
  for (auto& v : model.x_out) v *= options.init_scale_out;
  for (auto& v : model.x_in) v *= targets.directed ? options.init_scale_in : options.init_scale_out;

  const KernelOperator op(*geometry, kernel, allow_loops);
  std::vector<double> sums_out(n);  // G x_in
  std::vector<double> sums_in(n);   // G x_out
  std::size_t bad = 0;
  double res = std::numeric_limits<double>::infinity();
  int iter = 0;

  auto fail_unreachable = [&](std::size_t node) {
    throw FitError("node " + std::to_string(node) + " has positive strength but no partner with positive kernel value",
                   res, iter);
  };

  if (targets.directed) {
    op.apply(model.x_out, sums_in);
    for (;; ++iter) {
      op.apply(model.x_in, sums_out);
      res = std::max(residual(model.x_out, sums_out, targets.out), residual(model.x_in, sums_in, targets.in));
      if (res <= options.tol) break;
      if (iter >= options.max_iter) break;
      if (!damped_update(model.x_out, sums_out, targets.out, options.damping, bad)) fail_unreachable(bad);
      op.apply(model.x_out, sums_in);
      if (!damped_update(model.x_in, sums_in, targets.in, options.damping, bad)) fail_unreachable(bad);
    }
  } else {
    for (;; ++iter) {
      op.apply(model.x_out, sums_out);
      res = residual(model.x_out, sums_out, targets.out);
      if (res <= options.tol) break;
      if (iter >= options.max_iter) break;
      if (!damped_update(model.x_out, sums_out, targets.out, options.damping, bad)) fail_unreachable(bad);
    }
  }
  if (!(res <= options.tol)) {
    throw FitError("weight fit did not converge (residual " + std::to_string(res) + " after " +
                       std::to_string(iter) + " sweeps)",
                   res, iter);
  }

  if (targets.directed) {
    // Gauge: first strictly positive out-weight is 1.
    auto first = std::find_if(model.x_out.begin(), model.x_out.end(), [](double v) { return v > 0.0; });
    if (first != model.x_out.end()) {
      const double c = *first;
      for (auto& v : model.x_out) v /= c;
      for (auto& v : model.x_in) v *= c;
    }
  } else {
    model.x_in = model.x_out;
  }
  model.fit_residual = res;
  model.iterations = iter;

  std::size_t overshoot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (model.x_out[i] * model.x_in[j] * op.value(i, j) > 1.0) ++overshoot;
    }
  }
  model.overshoot_count = overshoot;
  return model;
}

namespace {

GclModel degenerate_model(const Graph& graph, Feasibility kind, std::shared_ptr<const Geometry> geometry,
                          const DistanceKernel& kernel) {
  GclModel model;
  model.kernel = kernel;
  model.geometry = std::move(geometry);
  model.directed = graph.directed();
  model.degenerate = kind;
  const std::uint64_t n = graph.n();
  for (const Edge& e : graph.edges()) {
    model.deterministic_p[e.src * n + e.dst] = e.weight;
    if (!graph.directed()) model.deterministic_p[e.dst * n + e.src] = e.weight;
  }
  return model;
}

}  // namespace

GclModel fit(const Graph& graph, std::shared_ptr<const Geometry> geometry, DistanceRange range, double alpha,
             const FitOptions& options, const WeightGuess* guess) {
  if (geometry->n() != graph.n()) throw Error("embedding size does not match the graph");
  const DistanceKernel kernel(alpha, range.min, range.max, options.clip);
  const Feasibility kind = check_feasibility(graph);
  if (kind != Feasibility::feasible) return degenerate_model(graph, kind, std::move(geometry), kernel);
  return fit_weights(DegreeTargets::of(graph), std::move(geometry), kernel, false, options, guess);
}

GclModel fit(const Graph& graph, const Embedding& embedding, double alpha, const FitOptions& options,
             const WeightGuess* guess) {
  if (embedding.n() != graph.n()) throw Error("embedding size does not match the graph");
  auto geometry = std::make_shared<const Geometry>(embedding, options.metric);
  return fit(graph, std::move(geometry), distance_extremes(embedding, options.metric), alpha, options, guess);
}

BlockMatrix block_mass(const GclModel& model, std::span<const std::uint32_t> labels, std::size_t communities,
                       std::span<const char> capped) {
  const std::size_t n = model.n();
  if (labels.size() != n) throw Error("labels do not match the model size");
  if (!capped.empty() && capped.size() != n) throw Error("cap mask does not match the model size");
  BlockMatrix out{communities, std::vector<double>(communities * communities, 0.0)};
  auto clampp = [&](std::size_t i, std::size_t j, double p) {
    return !capped.empty() && capped[i] && capped[j] ? std::min(p, 1.0) : p;
  };

  if (model.degenerate) {
    for (const auto& [key, p] : model.deterministic_p) {
      const std::size_t i = key / n;
      const std::size_t j = key % n;
      if (!model.directed && j < i) continue;
      std::size_t a = labels[i];
      std::size_t b = labels[j];
      if (!model.directed && b < a) std::swap(a, b);
      out.mass[a * communities + b] += clampp(i, j, p);
    }
  } else {
    // Row partials are accumulated per row and then merged in row order.
    std::vector<std::vector<double>> rows(n, std::vector<double>());
    parallel_for(n, [&](std::size_t i) {
      std::vector<double> acc(communities, 0.0);
      const std::size_t start = model.directed ? 0 : i + 1;
      for (std::size_t j = start; j < n; ++j) {
        if (j == i) continue;
        acc[labels[j]] += clampp(i, j, model.probability(i, j));
      }
      rows[i] = std::move(acc);
    }, row_threads(n));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = labels[i];
      for (std::size_t b = 0; b < communities; ++b) {
        if (model.directed || a <= b) {
          out.mass[a * communities + b] += rows[i][b];
        } else {
          out.mass[b * communities + a] += rows[i][b];
        }
      }
      if (model.loops) {
        // An undirected loop stands for both orientations of the internal pairs it replaces.
        const double loop = clampp(i, i, model.probability(i, i));
        out.mass[a * communities + a] += model.directed ? loop : 0.5 * loop;
      }
    }
  }

  double total = 0.0;
  for (double v : out.mass) total += v;
  if (!(total > 0.0)) throw Error("model has zero expected edge mass");
  for (double& v : out.mass) v /= total;
  return out;
}

BlockMatrix expected_block_mass(const GclModel& model, const Graph& graph, const Partition& partition) {
  if (partition.n() != graph.n()) throw Error("partition size does not match the graph");
  if (graph.weighted()) return block_mass(model, partition.assignment(), partition.count());
  const std::vector<char> capped(graph.n(), 1);
  return block_mass(model, partition.assignment(), partition.count(), capped);
}

}  // namespace gee
