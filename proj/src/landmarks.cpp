#include "gee/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <tuple>

#include "gee/error.hpp"
#include "gee/rng.hpp"
#include "search_driver.hpp"

namespace gee {

namespace {

struct Part {
  std::vector<NodeIndex> members;
  std::uint32_t community = 0;
  std::vector<double> centroid;
  double spread = 0.0;
};

class Refiner {
 public:
  Refiner(const Graph& graph, const Embedding& embedding, Metric metric, std::uint64_t seed)
      : embedding_(embedding), metric_(metric), rng_(seed), weight_(graph.n()) {
    for (std::size_t i = 0; i < graph.n(); ++i) {
      weight_[i] = graph.directed() ? graph.w_out()[i] + graph.w_in()[i] : graph.w_out()[i];
    }
  }

  double weight(NodeIndex v) const { return weight_[v]; }

  // Weighted centroid (plain mean when every member has zero strength) and spread.
  void update_stats(Part& part) const {
    if (part.members.size() == 1) {
      const auto row = embedding_.row(part.members.front());
      part.centroid.assign(row.begin(), row.end());
      part.spread = 0.0;
      return;
    }
    part.centroid = centroid(part.members);
    double e = 0.0;
    const bool uniform = total_weight(part.members) <= 0.0;
    for (NodeIndex v : part.members) {
      const double d = distance(part.centroid, embedding_.row(v), metric_);
      e += (uniform ? 1.0 : weight_[v]) * d * d;
    }
    part.spread = e;
  }

  /// Strength-weighted 2-means. Empty optional when the members cannot be separated.
  std::optional<std::pair<Part, Part>> split(const Part& part) {
    const auto& members = part.members;
    if (members.size() < 2) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    const NodeIndex probe = members[pick(rng_)];
    const NodeIndex a = farthest_from(members, embedding_.row(probe));
    const NodeIndex b = farthest_from(members, embedding_.row(a));
    if (!(distance(embedding_.row(a), embedding_.row(b), metric_) > 0.0)) return std::nullopt;

    std::vector<double> ca(embedding_.row(a).begin(), embedding_.row(a).end());
    std::vector<double> cb(embedding_.row(b).begin(), embedding_.row(b).end());
    std::vector<char> side(members.size(), 0);
    for (int iter = 0; iter < 100; ++iter) {
      std::vector<char> next(members.size());
      std::vector<NodeIndex> left, right;
      for (std::size_t m = 0; m < members.size(); ++m) {
        const auto row = embedding_.row(members[m]);
        next[m] = distance(row, cb, metric_) < distance(row, ca, metric_) ? 1 : 0;
        (next[m] ? right : left).push_back(members[m]);
      }
      if (left.empty() || right.empty()) break;
      const bool changed = next != side || iter == 0;
      side = std::move(next);
      if (!changed) break;
      ca = centroid(left);
      cb = centroid(right);
    }

    Part lhs, rhs;
    lhs.community = rhs.community = part.community;
    for (std::size_t m = 0; m < members.size(); ++m) (side[m] ? rhs : lhs).members.push_back(members[m]);
    if (lhs.members.empty() || rhs.members.empty()) return std::nullopt;
    update_stats(lhs);
    update_stats(rhs);
    return std::make_pair(std::move(lhs), std::move(rhs));
  }

 private:
  double total_weight(const std::vector<NodeIndex>& members) const {
    double t = 0.0;
    for (NodeIndex v : members) t += weight_[v];
    return t;
  }

  std::vector<double> centroid(const std::vector<NodeIndex>& members) const {
    const std::size_t k = embedding_.k();
    std::vector<double> c(k, 0.0);
    const double total = total_weight(members);
    const bool uniform = total <= 0.0;
    for (NodeIndex v : members) {
      const double w = uniform ? 1.0 : weight_[v];
      const auto row = embedding_.row(v);
      for (std::size_t d = 0; d < k; ++d) c[d] += w * row[d];
    }
    const double denom = uniform ? static_cast<double>(members.size()) : total;
    for (double& x : c) x /= denom;
    return c;
  }

  NodeIndex farthest_from(const std::vector<NodeIndex>& members, std::span<const double> from) const {
    NodeIndex best = members.front();
    double best_d = -1.0;
    for (NodeIndex v : members) {
      const double d = distance(embedding_.row(v), from, metric_);
      if (d > best_d) {
        best_d = d;
        best = v;
      }
    }
    return best;
  }

  const Embedding& embedding_;
  Metric metric_;
  Rng rng_;
  std::vector<double> weight_;
};

// Max-heap on spread; ties resolved by lower creation id.
struct HeapEntry {
  double spread;
  std::size_t id;
  bool operator<(const HeapEntry& o) const { return spread < o.spread || (spread == o.spread && id > o.id); }
};

// Splits until `parts` reaches `target` entries. Only indices listed in `active` are candidates.
void split_until(Refiner& refiner, std::vector<Part>& parts, std::vector<std::size_t> active, std::size_t target,
                 std::size_t& count) {
  std::priority_queue<HeapEntry> heap;
  for (std::size_t id : active) {
    if (parts[id].members.size() > 1 && parts[id].spread > 0.0) heap.push({parts[id].spread, id});
  }
  while (count < target && !heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    auto halves = refiner.split(parts[top.id]);
    if (!halves) continue;
    parts[top.id] = std::move(halves->first);
    parts.push_back(std::move(halves->second));
    ++count;
    for (std::size_t id : {top.id, parts.size() - 1}) {
      if (parts[id].members.size() > 1 && parts[id].spread > 0.0) heap.push({parts[id].spread, id});
    }
  }
}

}  // namespace

std::size_t default_landmark_count(std::size_t n, std::size_t communities) {
  const auto by_size = static_cast<std::size_t>(std::ceil(4.0 * std::sqrt(static_cast<double>(n))));
  return std::min(n, std::max(by_size, 4 * communities));
}

LandmarkSet refine_partition(const Graph& graph, const Embedding& embedding, const Partition& partition,
                             std::size_t n_prime_target, std::uint64_t seed, std::size_t split_factor,
                             Metric metric) {
  const std::size_t n = graph.n();
  if (embedding.n() != n || partition.n() != n) throw Error("graph, embedding and partition sizes differ");
  if (n_prime_target > n) throw Error("landmark count exceeds the number of nodes");
  if (split_factor < 1) throw Error("split factor must be positive");

  Refiner refiner(graph, embedding, metric, seed);
  std::vector<Part> parts(partition.count());
  {
    auto members = partition.members();
    for (std::size_t c = 0; c < members.size(); ++c) {
      parts[c].members = std::move(members[c]);
      parts[c].community = static_cast<std::uint32_t>(c);
      refiner.update_stats(parts[c]);
    }
  }

  std::size_t count = parts.size();
  if (n_prime_target < partition.count()) {
    const std::size_t communities = parts.size();
    for (std::size_t c = 0; c < communities; ++c) {
      // Each community grows from 1 to split_factor parts; `local` counts only its own parts.
      std::size_t local = 1;
      std::vector<std::size_t> own{c};
      const std::size_t before = parts.size();
      split_until(refiner, parts, own, split_factor, local);
      count += parts.size() - before;
    }
  } else {
    std::vector<std::size_t> all(parts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    split_until(refiner, parts, all, n_prime_target, count);
  }

  for (auto& p : parts) std::sort(p.members.begin(), p.members.end());
  std::sort(parts.begin(), parts.end(),
            [](const Part& a, const Part& b) { return a.members.front() < b.members.front(); });

  LandmarkSet set;
  set.n_prime = parts.size();
  set.k = embedding.k();
  set.positions.reserve(set.n_prime * set.k);
  set.member_of.assign(n, 0);
  set.w_prime_out.assign(set.n_prime, 0.0);
  set.w_prime_in.assign(set.n_prime, 0.0);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Part& p = parts[i];
    set.positions.insert(set.positions.end(), p.centroid.begin(), p.centroid.end());
    set.spread.push_back(p.spread);
    set.community_of.push_back(p.community);
    double mass = 0.0;
    for (NodeIndex v : p.members) {
      set.member_of[v] = static_cast<std::uint32_t>(i);
      set.w_prime_out[i] += graph.w_out()[v];
      set.w_prime_in[i] += graph.w_in()[v];
      mass += refiner.weight(v);
    }
    const double denom = mass > 0.0 ? mass : static_cast<double>(p.members.size());
    set.self_distance.push_back(std::sqrt(p.spread / denom));
  }
  return set;
}

DistanceRange landmark_distance_range(const LandmarkSet& landmarks, Metric metric) {
  if (landmarks.n_prime < 2) throw Error("need at least two landmarks");
  const std::size_t k = landmarks.k;
  DistanceRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < landmarks.n_prime; ++i) {
    for (std::size_t j = i + 1; j < landmarks.n_prime; ++j) {
      const double d = distance({landmarks.positions.data() + i * k, k}, {landmarks.positions.data() + j * k, k}, metric);
      r.min = std::min(r.min, d);
      r.max = std::max(r.max, d);
    }
  }
  const double pad = *std::max_element(landmarks.self_distance.begin(), landmarks.self_distance.end());
  r.min = std::max(0.0, r.min - pad);
  r.max += pad;
  if (!(r.max > 0.0)) throw Error("landmark positions have no spread");
  return r;
}

GclModel fit_landmarks(const LandmarkSet& landmarks, bool directed, double alpha, const FitOptions& options,
                       bool loops, const WeightGuess* guess) {
  auto geometry = std::make_shared<const Geometry>(landmarks.n_prime, landmarks.k, landmarks.positions,
                                                   options.metric, landmarks.self_distance);
  const DistanceRange range = landmark_distance_range(landmarks, options.metric);
  const DistanceKernel kernel(alpha, range.min, range.max, options.clip);
  DegreeTargets targets{landmarks.w_prime_out, landmarks.w_prime_in, directed};
  return fit_weights(targets, std::move(geometry), kernel, loops, options, guess);
}

GclModel inherit_model(const GclModel& landmark_model, const LandmarkSet& landmarks, const Graph& graph,
                       std::shared_ptr<const Geometry> node_geometry) {
  const std::size_t n = graph.n();
  GclModel model;
  model.kernel = landmark_model.kernel;
  model.geometry = std::move(node_geometry);
  model.directed = graph.directed();
  model.clamp_distances = true;
  model.x_out.assign(n, 0.0);
  model.x_in.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    const std::uint32_t i = landmarks.member_of[v];
    if (landmarks.w_prime_out[i] > 0.0) {
      model.x_out[v] = landmark_model.x_out[i] * graph.w_out()[v] / landmarks.w_prime_out[i];
    }
    if (landmarks.w_prime_in[i] > 0.0) {
      model.x_in[v] = landmark_model.x_in[i] * graph.w_in()[v] / landmarks.w_prime_in[i];
    }
  }
  return model;
}

EmbeddingScores score_landmarks(const Graph& graph, const Embedding& embedding, const Partition& partition,
                                const SearchOptions& options, const LandmarkConfig& config, ScoreSelection which) {
  if (embedding.n() != graph.n() || partition.n() != graph.n()) {
    throw Error("graph, embedding and partition sizes differ");
  }
  partition.require_scorable();
  const std::size_t target =
      config.n_prime == 0 ? default_landmark_count(graph.n(), partition.count()) : config.n_prime;
  const LandmarkSet landmarks = refine_partition(graph, embedding, partition, target,
                                                 derive_seed(options.seed, 0x4c4d), config.split_factor,
                                                 options.fit.metric);

  std::optional<DensityVector> observed;
  if (which.global) observed = graph_density_vector(graph, partition);
  // Only a landmark standing for one node carries a single-pair probability.
  std::vector<char> capped;
  if (!graph.weighted()) {
    std::vector<std::size_t> size(landmarks.n_prime, 0);
    for (std::uint32_t i : landmarks.member_of) ++size[i];
    capped.resize(landmarks.n_prime);
    for (std::size_t i = 0; i < landmarks.n_prime; ++i) capped[i] = size[i] == 1 ? 1 : 0;
  }
  std::optional<PairSample> sample;
  std::shared_ptr<const Geometry> node_geometry;
  if (which.local) {
    sample = sample_pairs(graph, options.auc_samples, options.seed);
    node_geometry = std::make_shared<const Geometry>(embedding, options.fit.metric);
  }
  const bool weighted_auc = options.weighted_auc.value_or(graph.weighted());

  std::optional<WeightGuess> previous;
  return detail::run_alpha_search(options, which, [&](double alpha, bool want_global, bool want_local) {
    GclModel model =
        fit_landmarks(landmarks, graph.directed(), alpha, options.fit, config.loops, previous ? &*previous : nullptr);
    previous = WeightGuess{model.x_out, model.x_in};
    detail::AlphaEvaluation eval;
    eval.clamped_pairs = model.overshoot_count;
    if (want_global) {
      const BlockMatrix blocks = block_mass(model, landmarks.community_of, partition.count(), capped);
      eval.divergence = density_divergence(*observed, flatten_blocks(blocks, graph.directed()), options.split_jsd);
    }
    if (want_local) {
      const GclModel nodes = inherit_model(model, landmarks, graph, node_geometry);
      eval.auc = auc_estimate(nodes, *sample, weighted_auc);
    }
    return eval;
  });
}

GlobalScoreResult approx_global_score(const Graph& graph, const Embedding& embedding, const Partition& partition,
                                      const SearchOptions& options, const LandmarkConfig& config) {
  return std::move(*score_landmarks(graph, embedding, partition, options, config, {true, false}).global);
}

LocalScoreResult approx_local_score(const Graph& graph, const Embedding& embedding, const Partition& partition,
                                    const SearchOptions& options, const LandmarkConfig& config) {
  return std::move(*score_landmarks(graph, embedding, partition, options, config, {false, true}).local);
}

}  // namespace gee
