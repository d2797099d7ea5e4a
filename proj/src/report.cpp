#include "gee/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "gee/clustering.hpp"
#include "gee/error.hpp"
#include "gee/parallel.hpp"
#include "gee/rng.hpp"

namespace gee {

std::vector<double> combine(std::span<const double> globals, std::span<const double> locals, double q, double eps) {
  if (globals.size() != locals.size()) throw Error("combine: score vectors differ in length");
  if (globals.empty()) throw Error("combine: no scores");
  if (!(eps > 0.0)) throw Error("combine: eps must be positive");
  if (!(q >= 0.0 && q <= 1.0)) throw Error("combine: q must lie in [0, 1]");
  const double min_g = *std::min_element(globals.begin(), globals.end()) + eps;
  const double min_l = *std::min_element(locals.begin(), locals.end()) + eps;
  std::vector<double> out(globals.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    // lerp stays inside its endpoints, so the result never rounds below 1.
    out[i] = std::lerp((locals[i] + eps) / min_l, (globals[i] + eps) / min_g, q);
  }
  return out;
}

const char* to_string(Clusterer c) {
  switch (c) {
    case Clusterer::automatic:
      return "auto";
    case Clusterer::louvain:
      return "louvain";
    case Clusterer::ecg:
      return "ecg";
  }
  return "auto";
}

Clusterer clusterer_from_string(const std::string& name) {
  if (name == "auto") return Clusterer::automatic;
  if (name == "louvain") return Clusterer::louvain;
  if (name == "ecg") return Clusterer::ecg;
  throw Error("unknown clusterer '" + name + "'");
}

Partition cluster(const Graph& graph, const EvaluateOptions& options) {
  Clusterer which = options.clusterer;
  if (which == Clusterer::automatic) which = graph.weighted() ? Clusterer::louvain : Clusterer::ecg;
  const std::uint64_t seed = derive_seed(options.seed, 0xC1);
  if (which == Clusterer::louvain) return louvain(graph, seed);
  return ecg(graph, EcgOptions{options.ecg_ensemble, 0.05}, seed);
}

namespace {

void score_record(const Graph& graph, const Partition& partition, const Embedding& embedding,
                  const EvaluateOptions& options, EmbeddingRecord& rec) {
  const bool landmark_mode =
      options.landmarks.has_value() || (!options.force_exact && graph.n() >= options.landmark_threshold);
  EmbeddingScores scores;
  if (landmark_mode) {
    LandmarkConfig config;
    config.n_prime = options.landmarks.value_or(0);
    config.split_factor = options.split_factor;
    scores = score_landmarks(graph, embedding, partition, options.search, config);
    rec.diagnostics.landmarks =
        config.n_prime == 0 ? default_landmark_count(graph.n(), partition.count()) : config.n_prime;
  } else {
    scores = score_exact(graph, embedding, &partition, options.search);
  }
  rec.global = std::move(*scores.global);
  rec.local = std::move(*scores.local);
  std::set<double> failed(rec.global.failed_alphas.begin(), rec.global.failed_alphas.end());
  failed.insert(rec.local.failed_alphas.begin(), rec.local.failed_alphas.end());
  rec.diagnostics.fit_failures = failed.size();
  rec.diagnostics.clamped_pairs = rec.global.clamped_pairs;
  rec.diagnostics.landmark_mode = landmark_mode;
  rec.ok = true;
}

void rank(ScoreReport& report, double q, double eps) {
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    if (report.records[i].ok) ok.push_back(i);
  }
  if (ok.empty()) return;
  std::vector<double> g, l;
  for (std::size_t i : ok) {
    g.push_back(report.records[i].global.score);
    l.push_back(report.records[i].local.score);
  }
  const double min_g = *std::min_element(g.begin(), g.end()) + eps;
  const double min_l = *std::min_element(l.begin(), l.end()) + eps;
  const auto combined = combine(g, l, q, eps);
  std::size_t best = ok.front();
  for (std::size_t t = 0; t < ok.size(); ++t) {
    EmbeddingRecord& rec = report.records[ok[t]];
    rec.normalized_global = (rec.global.score + eps) / min_g;
    rec.normalized_local = (rec.local.score + eps) / min_l;
    rec.combined = combined[t];
    const EmbeddingRecord& cur = report.records[best];
    if (rec.combined < cur.combined || (rec.combined == cur.combined && rec.name < cur.name)) best = ok[t];
  }
  report.winner = report.records[best].name;
}

}  // namespace

ScoreReport evaluate(const Graph& graph, const Partition& partition, std::string partition_source,
                     std::span<const NamedEmbedding> embeddings, const EvaluateOptions& options) {
  partition.require_scorable();
  ScoreReport report;
  report.graph = {graph.n(), graph.edges().size(), graph.directed(), graph.weighted(), partition.count(),
                  std::move(partition_source)};
  report.q = options.q;
  report.eps = options.eps;
  report.alpha_max = options.search.alpha_max;
  report.patience = options.search.patience;
  report.auc_samples = options.search.auc_samples;
  report.split_jsd = options.search.split_jsd;
  report.records.resize(embeddings.size());

  const std::size_t threads = options.threads == 0 ? thread_count() : options.threads;
  parallel_for(
      embeddings.size(),
      [&](std::size_t i) {
        EmbeddingRecord& rec = report.records[i];
        rec.name = embeddings[i].name;
        rec.diagnostics.seed = options.search.seed;
        rec.diagnostics.alpha_step = options.search.alpha_step;
        try {
          score_record(graph, partition, embeddings[i].embedding, options, rec);
        } catch (const std::exception& e) {
          rec.ok = false;
          rec.error = e.what();
        }
      },
      threads);
  rank(report, options.q, options.eps);
  return report;
}

ScoreReport evaluate(const std::filesystem::path& graph_path, std::span<const std::filesystem::path> embedding_paths,
                     const EvaluateOptions& options) {
  const Graph graph = load_graph(graph_path, GraphLoadOptions{options.directed, options.weighted});
  Partition partition = options.communities ? load_partition(*options.communities, graph) : cluster(graph, options);
  const std::string source = options.communities ? options.communities->string() : to_string(
      options.clusterer == Clusterer::automatic ? (graph.weighted() ? Clusterer::louvain : Clusterer::ecg)
                                                : options.clusterer);

  std::vector<NamedEmbedding> loaded;
  std::vector<std::pair<std::size_t, std::string>> load_errors;
  std::vector<std::size_t> slot;
  for (std::size_t i = 0; i < embedding_paths.size(); ++i) {
    try {
      loaded.push_back({embedding_paths[i].string(), load_embedding(embedding_paths[i], graph)});
      slot.push_back(i);
    } catch (const std::exception& e) {
      load_errors.emplace_back(i, e.what());
    }
  }
  ScoreReport scored = evaluate(graph, partition, source, loaded, options);

  // Restore command-line order with load failures in place.
  ScoreReport report = scored;
  report.records.assign(embedding_paths.size(), EmbeddingRecord{});
  for (std::size_t t = 0; t < slot.size(); ++t) report.records[slot[t]] = std::move(scored.records[t]);
  for (auto& [i, msg] : load_errors) {
    report.records[i].name = embedding_paths[i].string();
    report.records[i].error = msg;
    report.records[i].diagnostics.seed = options.search.seed;
    report.records[i].diagnostics.alpha_step = options.search.alpha_step;
  }
  return report;
}

namespace {

nlohmann::json curve_json(const std::vector<CurvePoint>& curve) {
  auto arr = nlohmann::json::array();
  for (const auto& p : curve) arr.push_back({p.alpha, p.value});
  return arr;
}

std::vector<CurvePoint> curve_from(const nlohmann::json& arr) {
  std::vector<CurvePoint> out;
  for (const auto& p : arr) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const ScoreReport& report) {
  j = nlohmann::json::object();
  j["schema"] = report.schema;
  j["graph"] = {{"nodes", report.graph.nodes},
                {"edges", report.graph.edges},
                {"directed", report.graph.directed},
                {"weighted", report.graph.weighted},
                {"communities", report.graph.communities},
                {"partition_source", report.graph.partition_source}};
  j["settings"] = {{"q", report.q},
                   {"eps", report.eps},
                   {"jsd_base", 2},
                   {"alpha_max", report.alpha_max},
                   {"patience", report.patience},
                   {"auc_samples", report.auc_samples},
                   {"auc_sample", "shared across alpha grid and embeddings"},
                   {"auc_ties", "count one half"},
                   {"split_jsd", report.split_jsd}};
  auto records = nlohmann::json::array();
  for (const auto& r : report.records) {
    nlohmann::json rec = {{"name", r.name}, {"ok", r.ok}};
    if (!r.ok) rec["error"] = r.error;
    if (r.ok) {
      rec["global"] = {{"score", r.global.score},
                       {"best_alpha", r.global.best_alpha},
                       {"curve", curve_json(r.global.curve)},
                       {"failed_alphas", r.global.failed_alphas}};
      rec["local"] = {{"score", r.local.score},
                      {"best_alpha", r.local.best_alpha},
                      {"ci_halfwidth", r.local.ci_halfwidth},
                      {"curve", curve_json(r.local.curve)},
                      {"failed_alphas", r.local.failed_alphas}};
      rec["normalized_global"] = r.normalized_global;
      rec["normalized_local"] = r.normalized_local;
      rec["combined"] = r.combined;
    }
    rec["diagnostics"] = {{"fit_failures", r.diagnostics.fit_failures},
                          {"clamped_pairs", r.diagnostics.clamped_pairs},
                          {"landmark_mode", r.diagnostics.landmark_mode},
                          {"landmarks", r.diagnostics.landmarks},
                          {"seed", r.diagnostics.seed},
                          {"jsd_base", r.diagnostics.jsd_base},
                          {"alpha_step", r.diagnostics.alpha_step}};
    records.push_back(std::move(rec));
  }
  j["embeddings"] = std::move(records);
  j["winner"] = report.winner.empty() ? nlohmann::json(nullptr) : nlohmann::json(report.winner);
}

void from_json(const nlohmann::json& j, ScoreReport& report) {
  report.schema = j.at("schema").get<int>();
  if (report.schema != kReportSchema) throw Error("unsupported report schema " + std::to_string(report.schema));
  const auto& g = j.at("graph");
  report.graph = {g.at("nodes").get<std::size_t>(), g.at("edges").get<std::size_t>(), g.at("directed").get<bool>(),
                  g.at("weighted").get<bool>(), g.at("communities").get<std::size_t>(),
                  g.at("partition_source").get<std::string>()};
  const auto& s = j.at("settings");
  report.q = s.at("q").get<double>();
  report.eps = s.at("eps").get<double>();
  report.alpha_max = s.at("alpha_max").get<double>();
  report.patience = s.at("patience").get<int>();
  report.auc_samples = s.at("auc_samples").get<std::size_t>();
  report.split_jsd = s.at("split_jsd").get<bool>();
  report.records.clear();
  for (const auto& rec : j.at("embeddings")) {
    EmbeddingRecord r;
    r.name = rec.at("name").get<std::string>();
    r.ok = rec.at("ok").get<bool>();
    if (!r.ok) r.error = rec.value("error", "");
    if (r.ok) {
      const auto& gl = rec.at("global");
      r.global.score = gl.at("score").get<double>();
      r.global.best_alpha = gl.at("best_alpha").get<double>();
      r.global.curve = curve_from(gl.at("curve"));
      r.global.failed_alphas = gl.at("failed_alphas").get<std::vector<double>>();
      const auto& lo = rec.at("local");
      r.local.score = lo.at("score").get<double>();
      r.local.best_alpha = lo.at("best_alpha").get<double>();
      r.local.ci_halfwidth = lo.at("ci_halfwidth").get<double>();
      r.local.curve = curve_from(lo.at("curve"));
      r.local.failed_alphas = lo.at("failed_alphas").get<std::vector<double>>();
      r.normalized_global = rec.at("normalized_global").get<double>();
      r.normalized_local = rec.at("normalized_local").get<double>();
      r.combined = rec.at("combined").get<double>();
    }
    const auto& d = rec.at("diagnostics");
    r.diagnostics.fit_failures = d.at("fit_failures").get<std::size_t>();
    r.diagnostics.clamped_pairs = d.at("clamped_pairs").get<std::size_t>();
    r.diagnostics.landmark_mode = d.at("landmark_mode").get<bool>();
    r.diagnostics.landmarks = d.at("landmarks").get<std::size_t>();
    r.diagnostics.seed = d.at("seed").get<std::uint64_t>();
    r.diagnostics.jsd_base = d.at("jsd_base").get<int>();
    r.diagnostics.alpha_step = d.at("alpha_step").get<double>();
    report.records.push_back(std::move(r));
  }
  report.winner = j.at("winner").is_null() ? std::string() : j.at("winner").get<std::string>();
}

std::string to_csv(const ScoreReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "name,global,local,combined\n";
  for (const auto& r : report.records) {
    if (!r.ok) continue;
    out << r.name << ',' << r.global.score << ',' << r.local.score << ',' << r.combined << '\n';
  }
  return out.str();
}

}  // namespace gee
