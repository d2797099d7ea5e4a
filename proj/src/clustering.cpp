#include "gee/clustering.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "gee/error.hpp"
#include "gee/parallel.hpp"
#include "gee/rng.hpp"

namespace gee {

namespace {

// Symmetric weighted adjacency in CSR form with separate self-loop mass. Strength k_i sums the
// full row including the loop, so aggregation preserves strengths.
struct SymGraph {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> nbr;
  std::vector<double> wgt;
  std::vector<double> loop;
  std::vector<double> strength;
  double total = 0.0;  // sum of strengths

  static SymGraph build(std::size_t n, const std::vector<EcgWeight>& edges) {
    SymGraph g;
    g.n = n;
    g.loop.assign(n, 0.0);
    std::vector<std::size_t> deg(n, 0);
    for (const auto& e : edges) {
      ++deg[e.u];
      ++deg[e.v];
    }
    g.offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.offsets[i + 1] = g.offsets[i] + deg[i];
    g.nbr.resize(g.offsets[n]);
    g.wgt.resize(g.offsets[n]);
    std::vector<std::size_t> fill(g.offsets.begin(), g.offsets.end() - 1);
    for (const auto& e : edges) {
      g.nbr[fill[e.u]] = e.v;
      g.wgt[fill[e.u]++] = e.weight;
      g.nbr[fill[e.v]] = e.u;
      g.wgt[fill[e.v]++] = e.weight;
    }
    g.finish();
    return g;
  }

  void finish() {
    strength.assign(n, 0.0);
    total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = loop[i];
      for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) s += wgt[p];
      strength[i] = s;
      total += s;
    }
  }
};

std::vector<EcgWeight> symmetrized_edges(const Graph& graph) {
  if (!graph.directed()) {
    std::vector<EcgWeight> out;
    out.reserve(graph.edges().size());
    for (const Edge& e : graph.edges()) out.push_back({e.src, e.dst, e.weight});
    return out;
  }
  std::map<std::pair<NodeIndex, NodeIndex>, double> merged;
  for (const Edge& e : graph.edges()) {
    merged[{std::min(e.src, e.dst), std::max(e.src, e.dst)}] += e.weight;
  }
  std::vector<EcgWeight> out;
  out.reserve(merged.size());
  for (const auto& [key, w] : merged) out.push_back({key.first, key.second, w});
  return out;
}

// Local moving phase. Returns community labels (not necessarily contiguous) and whether any
// node moved.
bool local_moving(const SymGraph& g, std::vector<std::uint32_t>& comm, Rng& rng) {
  const std::size_t n = g.n;
  comm.resize(n);
  std::iota(comm.begin(), comm.end(), 0u);
  std::vector<double> tot(g.strength);
  std::vector<double> link(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> touched;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);

  const double m2 = g.total;
  constexpr double kMinGain = 1e-12;
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::uint32_t i : order) {
      const std::uint32_t own = comm[i];
      const double ki = g.strength[i];
      touched.clear();
      touched.push_back(own);
      seen[own] = 1;
      for (std::size_t p = g.offsets[i]; p < g.offsets[i + 1]; ++p) {
        const std::uint32_t c = comm[g.nbr[p]];
        if (!seen[c]) {
          seen[c] = 1;
          touched.push_back(c);
        }
        link[c] += g.wgt[p];
      }
      tot[own] -= ki;
      std::uint32_t best = own;
      double best_gain = link[own] - tot[own] * ki / m2;
      std::sort(touched.begin(), touched.end());
      for (std::uint32_t c : touched) {
        if (c == own) continue;
        const double gain = link[c] - tot[c] * ki / m2;
        if (gain > best_gain + kMinGain) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += ki;
      if (best != own) {
        comm[i] = best;
        moved = true;
        any_move = true;
      }
      for (std::uint32_t c : touched) {
        link[c] = 0.0;
        seen[c] = 0;
      }
    }
  }
  return any_move;
}

// Contiguous relabeling in first-appearance order; returns community count.
std::size_t compact(std::vector<std::uint32_t>& comm) {
  std::vector<std::int64_t> map(comm.size(), -1);
  std::uint32_t next = 0;
  for (auto& c : comm) {
    if (map[c] < 0) map[c] = next++;
    c = static_cast<std::uint32_t>(map[c]);
  }
  return next;
}

SymGraph aggregate(const SymGraph& g, const std::vector<std::uint32_t>& comm, std::size_t count) {
  SymGraph out;
  out.n = count;
  out.loop.assign(count, 0.0);
  std::vector<std::map<std::uint32_t, double>> rows(count);
  for (std::size_t i = 0; i < g.n; ++i) {
    const std::uint32_t a = comm[i];
    out.loop[a] += g.loop[i];
    for (std::size_t p = g.offsets[i]; p < g.offsets[i + 1]; ++p) {
      const std::uint32_t b = comm[g.nbr[p]];
      if (a == b) {
        out.loop[a] += g.wgt[p];
      } else {
        rows[a][b] += g.wgt[p];
      }
    }
  }
  out.offsets.assign(count + 1, 0);
  for (std::size_t a = 0; a < count; ++a) out.offsets[a + 1] = out.offsets[a] + rows[a].size();
  for (std::size_t a = 0; a < count; ++a) {
    for (const auto& [b, w] : rows[a]) {
      out.nbr.push_back(b);
      out.wgt.push_back(w);
    }
  }
  out.finish();
  return out;
}

Partition to_partition(const std::vector<std::uint32_t>& comm) {
  std::vector<std::int64_t> labels(comm.begin(), comm.end());
  return Partition::from_labels(labels);
}

Partition run_louvain(const SymGraph& base, std::uint64_t seed) {
  std::vector<std::uint32_t> node_comm(base.n);
  std::iota(node_comm.begin(), node_comm.end(), 0u);
  SymGraph g = base;
  for (std::uint64_t level = 0;; ++level) {
    Rng rng(derive_seed(seed, level));
    std::vector<std::uint32_t> comm;
    const bool moved = local_moving(g, comm, rng);
    const std::size_t count = compact(comm);
    for (auto& c : node_comm) c = comm[c];
    if (!moved || count == g.n) break;
    g = aggregate(g, comm, count);
  }
  return to_partition(node_comm);
}

}  // namespace

double modularity(const Graph& graph, const Partition& partition) {
  if (partition.n() != graph.n()) throw Error("partition size does not match the graph");
  const SymGraph g = SymGraph::build(graph.n(), symmetrized_edges(graph));
  std::vector<double> internal(partition.count(), 0.0);
  std::vector<double> tot(partition.count(), 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    tot[partition[i]] += g.strength[i];
    for (std::size_t p = g.offsets[i]; p < g.offsets[i + 1]; ++p) {
      if (partition[g.nbr[p]] == partition[i]) internal[partition[i]] += g.wgt[p];
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < partition.count(); ++c) {
    q += internal[c] / g.total - (tot[c] / g.total) * (tot[c] / g.total);
  }
  return q;
}

Partition louvain(const Graph& graph, std::uint64_t seed) {
  return run_louvain(SymGraph::build(graph.n(), symmetrized_edges(graph)), seed);
}

Partition louvain_level1(const Graph& graph, std::uint64_t seed) {
  const SymGraph g = SymGraph::build(graph.n(), symmetrized_edges(graph));
  Rng rng(derive_seed(seed, 0));
  std::vector<std::uint32_t> comm;
  local_moving(g, comm, rng);
  compact(comm);
  return to_partition(comm);
}

std::vector<EcgWeight> ecg_weights(const Graph& graph, const EcgOptions& options, std::uint64_t seed) {
  if (options.ensemble_size < 2) throw Error("ECG ensemble size must be at least 2");
  if (!(options.min_weight > 0.0 && options.min_weight <= 1.0)) throw Error("ECG minimum weight must lie in (0, 1]");
  auto edges = symmetrized_edges(graph);
  const SymGraph g = SymGraph::build(graph.n(), edges);

  std::vector<std::vector<std::uint32_t>> passes(options.ensemble_size);
  parallel_for(options.ensemble_size, [&](std::size_t p) {
    Rng rng(derive_seed(seed, 1000 + p));
    local_moving(g, passes[p], rng);
  });

  for (auto& e : edges) {
    std::size_t together = 0;
    for (const auto& comm : passes) together += comm[e.u] == comm[e.v];
    const double frac = static_cast<double>(together) / static_cast<double>(options.ensemble_size);
    e.weight = std::max(frac, options.min_weight);
  }
  return edges;
}

Partition ecg(const Graph& graph, const EcgOptions& options, std::uint64_t seed) {
  const auto weights = ecg_weights(graph, options, seed);
  return run_louvain(SymGraph::build(graph.n(), weights), derive_seed(seed, 7));
}

}  // namespace gee
