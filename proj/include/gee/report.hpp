#pragma once

// Batch evaluation of several embeddings of one graph and the combined ranking.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gee/graph.hpp"
#include "gee/landmarks.hpp"
#include "gee/scoring.hpp"

namespace gee {

inline constexpr int kReportSchema = 1;

/// q * (g_i + eps) / min_j (g_j + eps) + (1 - q) * (l_i + eps) / min_j (l_j + eps)
std::vector<double> combine(std::span<const double> globals, std::span<const double> locals, double q = 0.5,
                            double eps = 0.01);

enum class Clusterer { automatic, louvain, ecg };

const char* to_string(Clusterer c);
Clusterer clusterer_from_string(const std::string& name);

struct EvaluateOptions {
  bool directed = false;
  std::optional<bool> weighted;
  std::optional<std::filesystem::path> communities;
  /// automatic: ECG for unweighted graphs, Louvain for weighted ones.
  Clusterer clusterer = Clusterer::automatic;
  std::size_t ecg_ensemble = 16;
  double q = 0.5;
  double eps = 0.01;
  std::uint64_t seed = 0;
  /// Landmark mode is used when set, or when n >= landmark_threshold and not force_exact.
  std::optional<std::size_t> landmarks;
  bool force_exact = false;
  std::size_t landmark_threshold = 10000;
  std::size_t split_factor = 4;
  SearchOptions search;
  /// 0: GEE_THREADS or hardware concurrency.
  std::size_t threads = 0;
};

struct Diagnostics {
  std::size_t fit_failures = 0;
  std::size_t clamped_pairs = 0;
  bool landmark_mode = false;
  std::size_t landmarks = 0;
  std::uint64_t seed = 0;
  int jsd_base = 2;
  double alpha_step = 0.25;
};

struct EmbeddingRecord {
  std::string name;
  bool ok = false;
  std::string error;
  GlobalScoreResult global;
  LocalScoreResult local;
  double normalized_global = 0.0;
  double normalized_local = 0.0;
  double combined = 0.0;
  Diagnostics diagnostics;
};

struct GraphSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  bool directed = false;
  bool weighted = false;
  std::size_t communities = 0;
  std::string partition_source;
};

struct ScoreReport {
  int schema = kReportSchema;
  GraphSummary graph;
  double q = 0.5;
  double eps = 0.01;
  double alpha_max = 32.0;
  int patience = 5;
  std::size_t auc_samples = 10000;
  bool split_jsd = false;
  std::vector<EmbeddingRecord> records;
  std::string winner;
};

struct NamedEmbedding {
  std::string name;
  Embedding embedding;
};

/// Scores every embedding against one shared partition and fills the combined ranking.
/// Failed embeddings keep ok = false and an error message; they do not enter the ranking.
ScoreReport evaluate(const Graph& graph, const Partition& partition, std::string partition_source,
                     std::span<const NamedEmbedding> embeddings, const EvaluateOptions& options);

/// File-based entry point: loads the graph, clusters it unless communities are given, then
/// loads and scores each embedding. Embedding load errors are recorded per record.
ScoreReport evaluate(const std::filesystem::path& graph_path, std::span<const std::filesystem::path> embedding_paths,
                     const EvaluateOptions& options);

/// Partition used by `evaluate` when no community file is given.
Partition cluster(const Graph& graph, const EvaluateOptions& options);

void to_json(nlohmann::json& j, const ScoreReport& report);
void from_json(const nlohmann::json& j, ScoreReport& report);
std::string to_csv(const ScoreReport& report);

}  // namespace gee
