#pragma once

// Graph, embedding and partition types plus their text formats.
//
// Edge lists are "src dst [weight]" per line, embeddings "id x1 ... xk", partitions "id label".
// Blank lines and lines starting with '#' are ignored. Node ids are arbitrary whitespace-free
// tokens; they are re-indexed to 0..n-1 in order of first appearance in the edge list.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gee {

using NodeIndex = std::uint32_t;

struct Edge {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  double weight = 1.0;
};

/// Immutable graph with per-node strengths.
///
/// Undirected graphs store each edge once; `w_out()` and `w_in()` both return the total
/// strength of each node.
class Graph {
 public:
  /// Validates the edge set: no self-loops, no duplicate pairs, strictly positive finite
  /// weights, at least one edge and two nodes. Throws gee::Error otherwise.
  Graph(std::vector<std::string> ids, std::vector<Edge> edges, bool directed, bool weighted = false);

  /// Graph over nodes named "0".."n-1".
  static Graph from_edges(std::size_t n, std::vector<Edge> edges, bool directed, bool weighted = false);

  std::size_t n() const noexcept { return ids_.size(); }
  bool directed() const noexcept { return directed_; }
  bool weighted() const noexcept { return weighted_; }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const double> w_out() const noexcept { return w_out_; }
  std::span<const double> w_in() const noexcept { return w_in_; }

  /// Sum of edge weights (each undirected edge counted once).
  double total_weight() const noexcept { return total_weight_; }

  /// Directed: the ordered pair (src, dst). Undirected: either orientation.
  bool has_edge(NodeIndex src, NodeIndex dst) const;
  /// Weight of the pair, 0 when absent.
  double edge_weight(NodeIndex src, NodeIndex dst) const;

  const std::string& id(NodeIndex i) const { return ids_.at(i); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::optional<NodeIndex> index_of(const std::string& id) const;

 private:
  std::uint64_t key(NodeIndex src, NodeIndex dst) const noexcept {
    return static_cast<std::uint64_t>(src) * ids_.size() + dst;
  }

  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, double> lookup_;
  std::vector<double> w_out_;
  std::vector<double> w_in_;
  double total_weight_ = 0.0;
  bool directed_ = false;
  bool weighted_ = false;
};

/// n x k coordinates, row-major, aligned with a graph's node indexing.
class Embedding {
 public:
  /// Requires n >= 2, k >= 1, finite coordinates and at least two distinct rows.
  Embedding(std::size_t n, std::size_t k, std::vector<double> coords);

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::span<const double> row(std::size_t i) const { return {coords_.data() + i * k_, k_}; }
  std::span<const double> coords() const noexcept { return coords_; }

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<double> coords_;
};

/// Node -> community assignment with contiguous labels 0..count-1.
///
/// The type itself admits a single community (a clustering may legitimately return one);
/// scoring entry points call `require_scorable()`.
class Partition {
 public:
  /// Relabels arbitrary labels to 0..l-1 by first appearance in node order.
  static Partition from_labels(std::span<const std::int64_t> labels);

  std::size_t n() const noexcept { return assign_.size(); }
  std::size_t count() const noexcept { return count_; }
  std::uint32_t operator[](std::size_t node) const { return assign_[node]; }
  std::span<const std::uint32_t> assignment() const noexcept { return assign_; }
  std::vector<std::vector<NodeIndex>> members() const;

  /// Throws unless there are at least two communities.
  void require_scorable() const;

 private:
  std::vector<std::uint32_t> assign_;
  std::size_t count_ = 0;
};

struct GraphLoadOptions {
  bool directed = false;
  /// Unset: weighted iff any line carries a third column. false: weights are ignored.
  std::optional<bool> weighted;
};

Graph load_graph(const std::filesystem::path& path, const GraphLoadOptions& options = {});
Graph read_graph(std::istream& in, const GraphLoadOptions& options = {});
Embedding load_embedding(const std::filesystem::path& path, const Graph& graph);
Embedding read_embedding(std::istream& in, const Graph& graph);
Partition load_partition(const std::filesystem::path& path, const Graph& graph);
Partition read_partition(std::istream& in, const Graph& graph);

void write_graph(std::ostream& out, const Graph& graph);
void write_embedding(std::ostream& out, const Graph& graph, const Embedding& embedding);
void write_partition(std::ostream& out, const Graph& graph, const Partition& partition);
void save_graph(const std::filesystem::path& path, const Graph& graph);
void save_embedding(const std::filesystem::path& path, const Graph& graph, const Embedding& embedding);
void save_partition(const std::filesystem::path& path, const Graph& graph, const Partition& partition);

}  // namespace gee
