#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "gee/error.hpp"
#include "gee/report.hpp"
#include "gee/synth.hpp"

using namespace gee;

namespace {

EvaluateOptions quick_options() {
  EvaluateOptions o;
  o.search.auc_samples = 3000;
  o.seed = 5;
  o.search.seed = 5;
  return o;
}

Embedding shuffled(const Embedding& e, std::uint64_t seed) {
  std::vector<std::size_t> perm(e.n());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> coords;
  for (std::size_t i : perm) coords.insert(coords.end(), e.row(i).begin(), e.row(i).end());
  return Embedding(e.n(), e.k(), coords);
}

}  // namespace

TEST_CASE("combined score by hand") {
  const std::vector<double> g{0.1, 0.2}, l{0.3, 0.3};
  const auto c = combine(g, l);
  CHECK(std::abs(c[0] - 1.0) <= 1e-12);
  CHECK(std::abs(c[1] - (0.5 * 0.21 / 0.11 + 0.5)) <= 1e-12);
  CHECK(c[1] == doctest::Approx(1.4545).epsilon(1e-4));

  const std::vector<double> one{0.42};
  CHECK(combine(one, one)[0] == 1.0);

  const std::vector<double> g3{0.3, 0.1, 0.2}, l3{0.01, 0.5, 0.02};
  const auto q1 = combine(g3, l3, 1.0);
  CHECK(std::min_element(q1.begin(), q1.end()) - q1.begin() == 1);
  for (double v : combine(g3, l3, 0.3)) CHECK(v >= 1.0);

  CHECK_THROWS_AS(combine(g, one), Error);
  CHECK_THROWS_AS(combine(g, l, 0.5, 0.0), Error);
}

TEST_CASE("clusterer names") {
  CHECK(clusterer_from_string("ecg") == Clusterer::ecg);
  CHECK(std::string(to_string(Clusterer::louvain)) == "louvain");
  CHECK_THROWS_AS(clusterer_from_string("leiden"), Error);
}

TEST_CASE("batch of identical embeddings") {
  const auto [g, part] = gen_sbm({80, 3, 0.3, 0.03, false}, 1);
  const Embedding e = gen_embedding(part, 2, 1.0, 0.3, 2);
  const std::vector<NamedEmbedding> batch{{"a", e}, {"b", e}};
  const ScoreReport r = evaluate(g, part, "given", batch, quick_options());
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].ok);
  CHECK(r.records[0].global.score == r.records[1].global.score);
  CHECK(r.records[0].local.score == r.records[1].local.score);
  CHECK(r.records[0].combined == 1.0);
  CHECK(r.records[1].combined == 1.0);
  CHECK(r.winner == "a");
}

TEST_CASE("football-scale batch: clean beats shuffled") {
  const auto [g, part] = gen_sbm({115, 12, 0.8, 0.035, false}, 3);
  CHECK(g.edges().size() > 500);
  CHECK(g.edges().size() < 730);
  const Embedding clean = gen_embedding(part, 8, 1.0, 0.2, 4);
  const std::vector<NamedEmbedding> batch{{"shuffled", shuffled(clean, 5)}, {"clean", clean}};
  const ScoreReport r = evaluate(g, part, "given", batch, quick_options());
  CHECK(r.records[1].global.score < r.records[0].global.score);
  CHECK(r.records[1].local.score < r.records[0].local.score);
  CHECK(r.winner == "clean");
  CHECK(r.records[1].combined == 1.0);
  CHECK(r.records[0].combined > 1.0);

  SUBCASE("a strictly worse addition leaves the winner alone") {
    std::vector<NamedEmbedding> more = batch;
    more.push_back({"worse", shuffled(clean, 99)});
    const ScoreReport r2 = evaluate(g, part, "given", more, quick_options());
    CHECK(r2.winner == "clean");
    CHECK(r2.records[0].combined == r.records[0].combined);
  }
}

TEST_CASE("landmark mode in a batch") {
  const auto [g, part] = gen_sbm({150, 3, 0.2, 0.02, true}, 6);
  const std::vector<NamedEmbedding> batch{{"x", gen_embedding(part, 2, 1.0, 0.3, 7)}};
  EvaluateOptions o = quick_options();
  o.landmarks = 20;
  const ScoreReport a = evaluate(g, part, "given", batch, o);
  const ScoreReport b = evaluate(g, part, "given", batch, o);
  REQUIRE(a.records[0].ok);
  CHECK(a.records[0].diagnostics.landmark_mode);
  CHECK(a.records[0].diagnostics.landmarks == 20);
  CHECK(a.records[0].global.score == b.records[0].global.score);
  CHECK(a.records[0].local.score == b.records[0].local.score);
}

TEST_CASE("json round trip and csv") {
  const auto [g, part] = gen_sbm({60, 2, 0.3, 0.05, false}, 8);
  const std::vector<NamedEmbedding> batch{{"p", gen_embedding(part, 2, 1.0, 0.2, 9)},
                                          {"q", gen_embedding(part, 2, 1.0, 1.0, 10)}};
  const ScoreReport r = evaluate(g, part, "given", batch, quick_options());
  const nlohmann::json j = r;
  CHECK(j["schema"] == 1);
  CHECK(j["settings"]["jsd_base"] == 2);
  const ScoreReport back = j.get<ScoreReport>();
  CHECK(nlohmann::json(back) == j);
  CHECK(back.winner == r.winner);
  CHECK(back.records[1].local.curve.size() == r.records[1].local.curve.size());

  const std::string csv = to_csv(r);
  CHECK(csv.rfind("name,global,local,combined\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  nlohmann::json bad = j;
  bad["schema"] = 2;
  CHECK_THROWS_AS(bad.get<ScoreReport>(), Error);
}

TEST_CASE("file-based evaluation records per-embedding failures") {
  const std::filesystem::path dir = std::filesystem::path(GEE_TEST_TMP) / "report";
  std::filesystem::create_directories(dir);
  const auto [g, part] = gen_sbm({60, 3, 0.4, 0.03, false}, 11);
  save_graph(dir / "g.txt", g);
  save_embedding(dir / "good.txt", g, gen_embedding(part, 2, 1.0, 0.2, 12));
  {
    std::ofstream bad(dir / "bad.txt");
    bad << "0 1 2\n";
  }
  const std::vector<std::filesystem::path> paths{dir / "bad.txt", dir / "good.txt", dir / "missing.txt"};
  const ScoreReport r = evaluate(dir / "g.txt", paths, quick_options());
  REQUIRE(r.records.size() == 3);
  CHECK_FALSE(r.records[0].ok);
  CHECK_FALSE(r.records[0].error.empty());
  CHECK(r.records[1].ok);
  CHECK_FALSE(r.records[2].ok);
  CHECK(r.winner == (dir / "good.txt").string());
  CHECK(r.graph.partition_source == "ecg");
  CHECK(r.graph.communities >= 2);
  CHECK(r.records[1].combined == 1.0);

  save_partition(dir / "c.txt", g, part);
  EvaluateOptions o = quick_options();
  o.communities = dir / "c.txt";
  const ScoreReport given = evaluate(dir / "g.txt", paths, o);
  CHECK(given.graph.communities == 3);
}
