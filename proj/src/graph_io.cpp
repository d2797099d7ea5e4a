#include "gee/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "gee/error.hpp"

namespace gee {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool skip_line(const std::vector<std::string_view>& tokens) {
  return tokens.empty() || tokens.front().front() == '#';
}

double parse_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    // from_chars does not accept a leading '+'.
    try {
      std::size_t used = 0;
      v = std::stod(std::string(tok), &used);
      if (used != tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("not a number: '" + std::string(tok) + "'", line);
    }
  }
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

Graph::Graph(std::vector<std::string> ids, std::vector<Edge> edges, bool directed, bool weighted)
    : ids_(std::move(ids)), edges_(std::move(edges)), directed_(directed), weighted_(weighted) {
  const std::size_t n = ids_.size();
  if (n < 2) throw Error("graph needs at least two nodes");
  if (edges_.empty()) throw Error("graph has no edges");
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(ids_[i], static_cast<NodeIndex>(i)).second) {
      throw Error("duplicate node id '" + ids_[i] + "'");
    }
  }
  w_out_.assign(n, 0.0);
  w_in_.assign(n, 0.0);
  lookup_.reserve(edges_.size() * (directed_ ? 1 : 2));
  for (const Edge& e : edges_) {
    if (e.src >= n || e.dst >= n) throw Error("edge endpoint out of range");
    if (e.src == e.dst) throw Error("self-loop at node '" + ids_[e.src] + "'");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw Error("non-positive weight on edge " + ids_[e.src] + " " + ids_[e.dst]);
    }
    const bool fresh = lookup_.emplace(key(e.src, e.dst), e.weight).second &&
                       (directed_ || lookup_.emplace(key(e.dst, e.src), e.weight).second);
    if (!fresh) throw Error("duplicate edge " + ids_[e.src] + " " + ids_[e.dst]);
    total_weight_ += e.weight;
    if (directed_) {
      w_out_[e.src] += e.weight;
      w_in_[e.dst] += e.weight;
    } else {
      w_out_[e.src] += e.weight;
      w_out_[e.dst] += e.weight;
    }
  }
  if (!directed_) w_in_ = w_out_;
}

Graph Graph::from_edges(std::size_t n, std::vector<Edge> edges, bool directed, bool weighted) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return Graph(std::move(ids), std::move(edges), directed, weighted);
}

bool Graph::has_edge(NodeIndex src, NodeIndex dst) const {
  return lookup_.count(key(src, dst)) != 0;
}

double Graph::edge_weight(NodeIndex src, NodeIndex dst) const {
  auto it = lookup_.find(key(src, dst));
  return it == lookup_.end() ? 0.0 : it->second;
}

std::optional<NodeIndex> Graph::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Embedding::Embedding(std::size_t n, std::size_t k, std::vector<double> coords)
    : n_(n), k_(k), coords_(std::move(coords)) {
  if (n_ < 2) throw Error("embedding needs at least two nodes");
  if (k_ < 1) throw Error("embedding dimension must be positive");
  if (coords_.size() != n_ * k_) throw Error("embedding coordinate count does not match n*k");
  for (double v : coords_) {
    if (!std::isfinite(v)) throw Error("embedding has a non-finite coordinate");
  }
  const auto first = row(0);
  bool distinct = false;
  for (std::size_t i = 1; i < n_ && !distinct; ++i) {
    distinct = !std::equal(first.begin(), first.end(), row(i).begin());
  }
  if (!distinct) throw Error("all embedding points coincide");
}

Partition Partition::from_labels(std::span<const std::int64_t> labels) {
  Partition p;
  std::unordered_map<std::int64_t, std::uint32_t> relabel;
  p.assign_.reserve(labels.size());
  for (std::int64_t label : labels) {
    auto [it, inserted] = relabel.emplace(label, static_cast<std::uint32_t>(relabel.size()));
    p.assign_.push_back(it->second);
  }
  p.count_ = relabel.size();
  return p;
}

std::vector<std::vector<NodeIndex>> Partition::members() const {
  std::vector<std::vector<NodeIndex>> out(count_);
  for (std::size_t i = 0; i < assign_.size(); ++i) out[assign_[i]].push_back(static_cast<NodeIndex>(i));
  return out;
}

void Partition::require_scorable() const {
  if (count_ < 2) throw Error("partition has a single community; the global score is undefined");
}

Graph read_graph(std::istream& in, const GraphLoadOptions& options) {
  std::vector<std::string> ids;
  std::unordered_map<std::string, NodeIndex> index;
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  bool saw_weight = false;
  const bool ignore_weights = options.weighted.has_value() && !*options.weighted;

  auto intern = [&](std::string_view tok) {
    auto [it, inserted] = index.emplace(std::string(tok), static_cast<NodeIndex>(ids.size()));
    if (inserted) ids.emplace_back(tok);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_ws(line);
    if (skip_line(tokens)) continue;
    if (tokens.size() != 2 && tokens.size() != 3) {
      throw ParseError("expected 'src dst [weight]'", lineno);
    }
    if (tokens[0] == tokens[1]) throw ParseError("self-loop at node '" + std::string(tokens[0]) + "'", lineno);
    Edge e;
    e.src = intern(tokens[0]);
    e.dst = intern(tokens[1]);
    if (tokens.size() == 3) {
      saw_weight = true;
      const double w = parse_double(tokens[2], lineno);
      if (!(w > 0.0) || !std::isfinite(w)) throw ParseError("non-positive weight", lineno);
      if (!ignore_weights) e.weight = w;
    }
    const auto pair_key = [](NodeIndex a, NodeIndex b) { return (static_cast<std::uint64_t>(a) << 32) | b; };
    const bool dup = seen.count(pair_key(e.src, e.dst)) || (!options.directed && seen.count(pair_key(e.dst, e.src)));
    if (dup) {
      throw ParseError("duplicate edge " + std::string(tokens[0]) + " " + std::string(tokens[1]), lineno);
    }
    seen.insert(pair_key(e.src, e.dst));
    edges.push_back(e);
  }
  if (edges.empty()) throw ParseError("graph has no edges");
  const bool weighted = options.weighted.value_or(saw_weight);
  return Graph(std::move(ids), std::move(edges), options.directed, weighted);
}

Graph load_graph(const std::filesystem::path& path, const GraphLoadOptions& options) {
  auto in = open_input(path);
  return read_graph(in, options);
}

Embedding read_embedding(std::istream& in, const Graph& graph) {
  const std::size_t n = graph.n();
  std::size_t k = 0;
  std::vector<double> coords;
  std::vector<bool> present(n, false);

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_ws(line);
    if (skip_line(tokens)) continue;
    if (tokens.size() < 2) throw ParseError("expected 'node-id x1 ... xk'", lineno);
    const std::string id(tokens[0]);
    const auto node = graph.index_of(id);
    if (!node) throw ParseError("unknown node '" + id + "'", lineno);
    if (k == 0) {
      k = tokens.size() - 1;
      coords.assign(n * k, 0.0);
    } else if (tokens.size() - 1 != k) {
      throw ParseError("inconsistent dimension: expected " + std::to_string(k) + ", got " +
                           std::to_string(tokens.size() - 1),
                       lineno);
    }
    if (present[*node]) throw ParseError("duplicate row for node '" + id + "'", lineno);
    present[*node] = true;
    for (std::size_t c = 0; c < k; ++c) {
      const double v = parse_double(tokens[c + 1], lineno);
      if (!std::isfinite(v)) throw ParseError("non-finite value for node '" + id + "'", lineno);
      coords[*node * k + c] = v;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!present[i]) throw ParseError("missing node '" + graph.id(static_cast<NodeIndex>(i)) + "'");
  }
  return Embedding(n, k, std::move(coords));
}

Embedding load_embedding(const std::filesystem::path& path, const Graph& graph) {
  auto in = open_input(path);
  return read_embedding(in, graph);
}

Partition read_partition(std::istream& in, const Graph& graph) {
  const std::size_t n = graph.n();
  std::vector<std::string> raw(n);
  std::vector<bool> present(n, false);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_ws(line);
    if (skip_line(tokens)) continue;
    if (tokens.size() != 2) throw ParseError("expected 'node-id label'", lineno);
    const std::string id(tokens[0]);
    const auto node = graph.index_of(id);
    if (!node) throw ParseError("unknown node '" + id + "'", lineno);
    if (present[*node]) throw ParseError("duplicate label for node '" + id + "'", lineno);
    present[*node] = true;
    raw[*node] = std::string(tokens[1]);
  }
  std::unordered_map<std::string, std::int64_t> codes;
  std::vector<std::int64_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!present[i]) throw ParseError("missing node '" + graph.id(static_cast<NodeIndex>(i)) + "'");
    labels[i] = codes.emplace(raw[i], static_cast<std::int64_t>(codes.size())).first->second;
  }
  Partition p = Partition::from_labels(labels);
  p.require_scorable();
  return p;
}

Partition load_partition(const std::filesystem::path& path, const Graph& graph) {
  auto in = open_input(path);
  return read_partition(in, graph);
}

void write_graph(std::ostream& out, const Graph& graph) {
  const auto old = out.precision(17);
  for (const Edge& e : graph.edges()) {
    out << graph.id(e.src) << ' ' << graph.id(e.dst);
    if (graph.weighted()) out << ' ' << e.weight;
    out << '\n';
  }
  out.precision(old);
}

void write_embedding(std::ostream& out, const Graph& graph, const Embedding& embedding) {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < embedding.n(); ++i) {
    out << graph.id(static_cast<NodeIndex>(i));
    for (double v : embedding.row(i)) out << ' ' << v;
    out << '\n';
  }
  out.precision(old);
}

void write_partition(std::ostream& out, const Graph& graph, const Partition& partition) {
  for (std::size_t i = 0; i < partition.n(); ++i) {
    out << graph.id(static_cast<NodeIndex>(i)) << ' ' << partition[i] << '\n';
  }
}

void save_graph(const std::filesystem::path& path, const Graph& graph) {
  auto out = open_output(path);
  write_graph(out, graph);
}

void save_embedding(const std::filesystem::path& path, const Graph& graph, const Embedding& embedding) {
  auto out = open_output(path);
  write_embedding(out, graph, embedding);
}

void save_partition(const std::filesystem::path& path, const Graph& graph, const Partition& partition) {
  auto out = open_output(path);
  write_partition(out, graph, partition);
}

}  // namespace gee
