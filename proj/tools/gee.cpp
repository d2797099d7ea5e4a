// gee: score graph embeddings and generate synthetic fixtures.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gee/error.hpp"
#include "gee/graph.hpp"
#include "gee/report.hpp"
#include "gee/synth.hpp"

namespace {

struct ScoreArgs {
  std::string graph;
  std::vector<std::string> embeddings;
  std::string communities;
  bool directed = false;
  bool weighted = false;
  std::uint64_t seed = 0;
  double q = 0.5;
  double eps = 0.01;
  std::size_t landmarks = 0;
  bool force_exact = false;
  double alpha_step = 0.25;
  std::size_t auc_samples = 10000;
  bool split_jsd = false;
  std::string clusterer = "auto";
  std::string metric = "euclidean";
  bool clip = false;
  double fit_tol = 1e-8;
  int fit_max_iter = 2000;
  std::size_t split_factor = 4;
  std::string output;
  std::string csv;
};

int run_score(const ScoreArgs& a) {
  gee::EvaluateOptions opts;
  opts.directed = a.directed;
  if (a.weighted) opts.weighted = true;
  if (!a.communities.empty()) opts.communities = a.communities;
  opts.clusterer = gee::clusterer_from_string(a.clusterer);
  opts.q = a.q;
  opts.eps = a.eps;
  opts.seed = a.seed;
  if (a.landmarks > 0) opts.landmarks = a.landmarks;
  opts.force_exact = a.force_exact;
  opts.split_factor = a.split_factor;
  opts.search.alpha_step = a.alpha_step;
  opts.search.auc_samples = a.auc_samples;
  opts.search.split_jsd = a.split_jsd;
  opts.search.seed = a.seed;
  opts.search.fit.tol = a.fit_tol;
  opts.search.fit.max_iter = a.fit_max_iter;
  opts.search.fit.metric = a.metric == "manhattan" ? gee::Metric::manhattan : gee::Metric::euclidean;
  if (a.clip) opts.search.fit.clip = gee::Clip{};

  std::vector<std::filesystem::path> paths(a.embeddings.begin(), a.embeddings.end());
  const gee::ScoreReport report = gee::evaluate(a.graph, paths, opts);

  const std::string doc = nlohmann::json(report).dump(2);
  if (a.output.empty() || a.output == "-") {
    std::cout << doc << '\n';
  } else {
    std::ofstream out(a.output);
    if (!out) throw gee::Error("cannot write " + a.output);
    out << doc << '\n';
  }
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) throw gee::Error("cannot write " + a.csv);
    out << gee::to_csv(report);
  }

  std::size_t ok = 0;
  for (const auto& r : report.records) {
    if (r.ok) {
      ++ok;
    } else {
      std::cerr << "gee: " << r.name << ": " << r.error << '\n';
    }
  }
  return ok > 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised quality scores for graph embeddings"};
  app.require_subcommand(1);

  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "Score one or more embeddings of a graph");
  score->add_option("-g,--graph", sa.graph, "Edge list: src dst [weight]")->required();
  score->add_option("-e,--embedding", sa.embeddings, "Embedding file: id x1 ... xk (repeatable)")->required();
  score->add_option("-c,--communities", sa.communities, "Partition file: id label (skips clustering)");
  score->add_flag("-d,--directed", sa.directed, "Treat edges as directed");
  score->add_flag("-w,--weighted", sa.weighted, "Force weighted mode (default: detected from a third column)");
  score->add_option("--seed", sa.seed, "Random seed");
  score->add_option("-q", sa.q, "Weight of the global score in the combined score")->check(CLI::Range(0.0, 1.0));
  score->add_option("--eps", sa.eps, "Offset in the combined score")->check(CLI::PositiveNumber);
  score->add_option("--landmarks", sa.landmarks, "Use landmark mode with this many landmarks");
  score->add_flag("--force-exact", sa.force_exact, "Exact mode regardless of graph size");
  score->add_option("--alpha-step", sa.alpha_step, "Kernel exponent grid step")->check(CLI::PositiveNumber);
  score->add_option("--auc-samples", sa.auc_samples, "Positive and negative pairs sampled for the AUC");
  score->add_flag("--split-jsd", sa.split_jsd, "Average of internal and external divergences");
  score->add_option("--clusterer", sa.clusterer, "auto, louvain or ecg")
      ->check(CLI::IsMember({"auto", "louvain", "ecg"}));
  score->add_option("--metric", sa.metric, "euclidean or manhattan")->check(CLI::IsMember({"euclidean", "manhattan"}));
  score->add_flag("--clip", sa.clip, "Clip normalized distances to [0.001, 0.999]");
  score->add_option("--fit-tol", sa.fit_tol, "Weight fit tolerance")->check(CLI::PositiveNumber);
  score->add_option("--fit-max-iter", sa.fit_max_iter, "Weight fit iteration cap")->check(CLI::PositiveNumber);
  score->add_option("--split-factor", sa.split_factor, "Landmarks per community when n' < communities");
  score->add_option("-o,--output", sa.output, "JSON report path (default: stdout)");
  score->add_option("--csv", sa.csv, "Also write name,global,local,combined");

  auto* synth = app.add_subcommand("synth", "Generate synthetic graphs and embeddings");
  synth->require_subcommand(1);

  gee::SbmParams sbm;
  std::uint64_t sbm_seed = 0;
  std::string sbm_graph, sbm_part;
  auto* s_sbm = synth->add_subcommand("sbm", "Planted-partition graph");
  s_sbm->add_option("-n", sbm.n, "Nodes")->required();
  s_sbm->add_option("-b,--blocks", sbm.blocks, "Blocks")->required();
  s_sbm->add_option("--p-in", sbm.p_in, "Intra-block edge probability")->required();
  s_sbm->add_option("--p-out", sbm.p_out, "Inter-block edge probability")->required();
  s_sbm->add_flag("-d,--directed", sbm.directed, "Directed graph");
  s_sbm->add_option("--seed", sbm_seed, "Random seed");
  s_sbm->add_option("-g,--graph", sbm_graph, "Output edge list")->required();
  s_sbm->add_option("-c,--communities", sbm_part, "Output partition")->required();

  std::string e_graph, e_part, e_out;
  std::size_t e_dim = 2;
  double e_spread = 1.0, e_noise = 0.1;
  std::uint64_t e_seed = 0;
  bool e_directed = false;
  auto* s_embed = synth->add_subcommand("embed", "Community centers plus Gaussian noise");
  s_embed->add_option("-g,--graph", e_graph, "Edge list")->required();
  s_embed->add_option("-c,--communities", e_part, "Partition")->required();
  s_embed->add_flag("-d,--directed", e_directed, "Directed graph");
  s_embed->add_option("-k,--dim", e_dim, "Dimension");
  s_embed->add_option("--spread", e_spread, "Minimum center separation");
  s_embed->add_option("--noise", e_noise, "Noise relative to spread");
  s_embed->add_option("--seed", e_seed, "Random seed");
  s_embed->add_option("-o,--output", e_out, "Output embedding")->required();

  std::string r_graph, r_part, r_out;
  double r_fraction = 0.0;
  std::uint64_t r_seed = 0;
  bool r_directed = false;
  auto* s_rewire = synth->add_subcommand("rewire", "Rewire edges inside communities");
  s_rewire->add_option("-g,--graph", r_graph, "Edge list")->required();
  s_rewire->add_option("-c,--communities", r_part, "Partition")->required();
  s_rewire->add_flag("-d,--directed", r_directed, "Directed graph");
  s_rewire->add_option("-f,--fraction", r_fraction, "Fraction of internal edges")->required();
  s_rewire->add_option("--seed", r_seed, "Random seed");
  s_rewire->add_option("-o,--output", r_out, "Output edge list")->required();

  std::string x_graph, x_part, x_emb, x_out;
  double x_factor = 1.0;
  bool x_directed = false;
  auto* s_rescale = synth->add_subcommand("rescale", "Push nodes away from their community centroid");
  s_rescale->add_option("-g,--graph", x_graph, "Edge list")->required();
  s_rescale->add_option("-c,--communities", x_part, "Partition")->required();
  s_rescale->add_option("-e,--embedding", x_emb, "Input embedding")->required();
  s_rescale->add_flag("-d,--directed", x_directed, "Directed graph");
  s_rescale->add_option("-f,--factor", x_factor, "Scale factor (>= 1)")->required();
  s_rescale->add_option("-o,--output", x_out, "Output embedding")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (score->parsed()) return run_score(sa);
    if (s_sbm->parsed()) {
      auto [graph, partition] = gee::gen_sbm(sbm, sbm_seed);
      gee::save_graph(sbm_graph, graph);
      gee::save_partition(sbm_part, graph, partition);
    } else if (s_embed->parsed()) {
      const gee::Graph graph = gee::load_graph(e_graph, {e_directed, std::nullopt});
      const gee::Partition partition = gee::load_partition(e_part, graph);
      gee::save_embedding(e_out, graph, gee::gen_embedding(partition, e_dim, e_spread, e_noise, e_seed));
    } else if (s_rewire->parsed()) {
      const gee::Graph graph = gee::load_graph(r_graph, {r_directed, std::nullopt});
      const gee::Partition partition = gee::load_partition(r_part, graph);
      const auto result = gee::rewire_within(graph, partition, r_fraction, r_seed);
      gee::save_graph(r_out, result.graph);
      std::cerr << "rewired " << result.rewired << " of " << result.requested << " edges\n";
    } else if (s_rescale->parsed()) {
      const gee::Graph graph = gee::load_graph(x_graph, {x_directed, std::nullopt});
      const gee::Partition partition = gee::load_partition(x_part, graph);
      const gee::Embedding emb = gee::load_embedding(x_emb, graph);
      gee::save_embedding(x_out, graph, gee::rescale_communities(emb, partition, x_factor));
    }
  } catch (const std::exception& e) {
    std::cerr << "gee: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
