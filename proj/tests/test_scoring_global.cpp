#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gee/error.hpp"
#include "gee/scoring_global.hpp"
#include "gee/synth.hpp"

using namespace gee;

namespace {

// H(m) - (H(p) + H(q)) / 2 in bits, written out term by term.
double jsd_oracle(const std::vector<double>& p, const std::vector<double>& q) {
  auto h = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
      if (x > 0.0) s -= x * std::log2(x);
    }
    return s;
  };
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return h(m) - 0.5 * (h(p) + h(q));
}

std::vector<double> random_distribution(std::size_t len, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(len);
  double s = 0.0;
  for (double& x : v) {
    x = u(rng) < 0.2 ? 0.0 : u(rng);
    s += x;
  }
  if (s == 0.0) {
    v[0] = 1.0;
    s = 1.0;
  }
  for (double& x : v) x /= s;
  return v;
}

Partition labels_of(std::vector<std::int64_t> labels) { return Partition::from_labels(labels); }

}  // namespace

TEST_CASE("graph vector examples") {
  // Ten unit edges, all inside community 0.
  const Graph g10 = fixtures::graph_of(
      7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}, {1, 3}, {2, 4}, {3, 0}, {4, 1}}, true);
  const auto c = graph_density_vector(g10, labels_of({0, 0, 0, 0, 0, 1, 1}));
  CHECK(c.entries == std::vector<double>{0, 0, 1, 0});

  const Graph cycle = fixtures::graph_of(3, {{0, 1}, {1, 2}, {2, 0}}, true);
  const auto c3 = graph_density_vector(cycle, labels_of({0, 1, 1}));
  REQUIRE(c3.entries.size() == 4);
  CHECK(c3.entries[0] == doctest::Approx(1.0 / 3));
  CHECK(c3.entries[1] == doctest::Approx(1.0 / 3));
  CHECK(c3.entries[2] == 0.0);
  CHECK(c3.entries[3] == doctest::Approx(1.0 / 3));

  const Graph weighted = Graph::from_edges(3, {{0, 1, 9.0}, {1, 2, 1.0}}, true, true);
  const auto cw = graph_density_vector(weighted, labels_of({0, 0, 1}));
  CHECK(cw.internal()[0] == doctest::Approx(0.9));
}

TEST_CASE("canonical ordering") {
  BlockMatrix b{3, {0.0, 0.1, 0.2, 0.3, 0.05, 0.05, 0.1, 0.15, 0.05}};
  const auto d = flatten_blocks(b, true);
  // (c12, c21, c13, c31, c23, c32, c1, c2, c3)
  CHECK(d.entries == std::vector<double>{0.1, 0.3, 0.2, 0.1, 0.05, 0.15, 0.0, 0.05, 0.05});
  BlockMatrix u{3, {0.1, 0.2, 0.3, 0.0, 0.15, 0.05, 0.0, 0.0, 0.2}};
  const auto du = flatten_blocks(u, false);
  CHECK(du.entries == std::vector<double>{0.2, 0.3, 0.05, 0.1, 0.15, 0.2});
  CHECK(du.external().size() == 3);
}

TEST_CASE("jsd examples") {
  const std::vector<double> v{0.2, 0.3, 0.5};
  CHECK(jsd(v, v) == 0.0);
  CHECK(jsd(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(jsd(std::vector<double>{0.5, 0.5}, std::vector<double>{1, 0}) == doctest::Approx(0.311278124459).epsilon(1e-11));
  CHECK_THROWS_AS(jsd(std::vector<double>{1}, std::vector<double>{0.5, 0.5}), Error);
}

TEST_CASE("jsd agrees with the direct formula") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 300; ++t) {
    const std::size_t len = 1 + rng() % 12;
    const auto p = random_distribution(len, rng);
    const auto q = random_distribution(len, rng);
    const double v = jsd(p, q);
    CHECK(std::abs(v - jsd_oracle(p, q)) <= 1e-12);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == doctest::Approx(jsd(q, p)).epsilon(1e-14));
  }
}

TEST_CASE("split jsd") {
  DensityVector c{{0.1, 0.1, 0.4, 0.4}, 2, true};
  DensityVector b{{0.2, 0.0, 0.4, 0.4}, 2, true};
  const double expected = 0.5 * jsd_oracle({0.5, 0.5}, {1.0, 0.0});
  CHECK(split_jsd(c, b) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(density_divergence(c, b, false) == doctest::Approx(jsd_oracle(c.entries, b.entries)).epsilon(1e-12));

  DensityVector no_external{{0.0, 0.0, 0.5, 0.5}, 2, true};
  DensityVector some_external{{0.5, 0.0, 0.25, 0.25}, 2, true};
  CHECK(split_jsd(no_external, no_external) == 0.0);
  CHECK(split_jsd(no_external, some_external) == doctest::Approx(0.5));
}

TEST_CASE("exact fit on a complete digraph gives score 0") {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  const Graph g = fixtures::graph_of(4, pairs, true);
  std::mt19937_64 rng(2);
  const auto r = global_score(g, fixtures::random_embedding(4, 2, rng), labels_of({0, 0, 1, 1}));
  CHECK(r.score <= 1e-12);
  CHECK(r.best_alpha == 0.0);
}

TEST_CASE("model vector sums to 1 and is symmetric at alpha zero") {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 8; ++i) {
    pairs.emplace_back(i, (i + 1) % 8);
    pairs.emplace_back(i, (i + 3) % 8);
  }
  const Graph g = fixtures::graph_of(8, pairs, true);
  const Partition part = labels_of({0, 0, 0, 0, 1, 1, 1, 1});
  std::mt19937_64 rng(4);
  const auto b = model_density_vector(fit(g, fixtures::random_embedding(8, 2, rng), 0.0), g, part);
  double s = 0.0;
  for (double x : b.entries) s += x;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.entries[0] == doctest::Approx(b.entries[1]).epsilon(1e-12));
}

TEST_CASE("scores on an SBM") {
  const auto [g, part] = gen_sbm({60, 3, 0.4, 0.03, false}, 5);
  const Embedding good = gen_embedding(part, 2, 1.0, 0.1, 6);
  std::mt19937_64 rng(7);
  const Embedding random = fixtures::random_embedding(60, 2, rng);
  const auto rg = global_score(g, good, part);
  const auto rr = global_score(g, random, part);
  CHECK(rg.score < rr.score);
  for (const auto& r : {rg, rr}) {
    CHECK(r.score >= 0.0);
    CHECK(r.score <= 1.0);
    for (const auto& pt : r.curve) {
      CHECK(pt.value >= 0.0);
      CHECK(pt.value <= 1.0);
      CHECK(pt.value >= r.score);
    }
  }

  SUBCASE("stopping rule") {
    // Every curve ends with `patience` non-improving values unless the grid ran out.
    const auto& curve = rg.curve;
    REQUIRE(curve.size() >= 6);
    for (std::size_t t = curve.size() - 5; t < curve.size(); ++t) CHECK(curve[t].value >= rg.score);
    CHECK(curve[curve.size() - 6].alpha <= rg.best_alpha);
  }

  SUBCASE("determinism") {
    const auto again = global_score(g, good, part);
    CHECK(again.score == rg.score);
    CHECK(again.best_alpha == rg.best_alpha);
    CHECK(again.curve.size() == rg.curve.size());
  }

  SUBCASE("graph vector does not depend on the embedding") {
    CHECK(graph_density_vector(g, part).entries == graph_density_vector(g, part).entries);
  }
}

TEST_CASE("similarity transforms leave the curve unchanged") {
  const auto [g, part] = gen_sbm({50, 2, 0.3, 0.05, true}, 9);
  const Embedding e = gen_embedding(part, 2, 1.0, 0.4, 10);
  std::vector<double> moved(e.coords().begin(), e.coords().end());
  const double c = std::cos(0.7), s = std::sin(0.7);
  for (std::size_t i = 0; i < e.n(); ++i) {
    const double x = moved[2 * i], y = moved[2 * i + 1];
    moved[2 * i] = 3.5 * (c * x - s * y) + 10.0;
    moved[2 * i + 1] = 3.5 * (s * x + c * y) - 4.0;
  }
  const auto a = global_score(g, e, part);
  const auto b = global_score(g, Embedding(e.n(), 2, moved), part);
  REQUIRE(a.curve.size() == b.curve.size());
  for (std::size_t t = 0; t < a.curve.size(); ++t) CHECK(std::abs(a.curve[t].value - b.curve[t].value) <= 1e-9);
}

TEST_CASE("undirected graph scores like its doubled digraph") {
  const auto [g, part] = gen_sbm({40, 2, 0.3, 0.05, false}, 12);
  std::vector<Edge> doubled;
  for (const Edge& e : g.edges()) {
    doubled.push_back(e);
    doubled.push_back({e.dst, e.src, e.weight});
  }
  const Graph d = Graph::from_edges(g.n(), doubled, true);
  const Embedding emb = gen_embedding(part, 2, 1.0, 0.5, 13);
  const auto ru = global_score(g, emb, part);
  const auto rd = global_score(d, emb, part);
  REQUIRE(ru.curve.size() == rd.curve.size());
  for (std::size_t t = 0; t < ru.curve.size(); ++t) CHECK(ru.curve[t].value == doctest::Approx(rd.curve[t].value).epsilon(1e-7));
}

TEST_CASE("split mode runs the same search") {
  const auto [g, part] = gen_sbm({40, 2, 0.3, 0.05, true}, 14);
  SearchOptions opts;
  opts.split_jsd = true;
  const auto r = global_score(g, gen_embedding(part, 2, 1.0, 0.3, 15), part, opts);
  CHECK(r.score >= 0.0);
  CHECK(r.score <= 1.0);
  CHECK_THROWS_AS(global_score(g, gen_embedding(part, 2, 1.0, 0.3, 15), labels_of(std::vector<std::int64_t>(40, 0))),
                  Error);
}
