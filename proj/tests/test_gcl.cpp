#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gee/error.hpp"
#include "gee/gcl.hpp"

using namespace gee;

namespace {

// max_i |sum_j p_ij - w_out[i]| / max(w_out[i], 1), and the same for columns.
double degree_error(const GclModel& m, const Graph& g) {
  const auto p = fixtures::p_matrix(m);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < g.n(); ++j) {
      row += p[i][j];
      col += p[j][i];
    }
    worst = std::max(worst, std::abs(row - g.w_out()[i]) / std::max(g.w_out()[i], 1.0));
    worst = std::max(worst, std::abs(col - g.w_in()[i]) / std::max(g.w_in()[i], 1.0));
  }
  return worst;
}

Embedding points(std::vector<double> coords, std::size_t k = 2) {
  const std::size_t n = coords.size() / k;
  return Embedding(n, k, std::move(coords));
}

}  // namespace

TEST_CASE("kernel values") {
  const DistanceKernel g2(2.0, 1.0, 3.0);
  CHECK(g2(1.0) == 1.0);
  CHECK(g2(3.0) == 0.0);
  CHECK(DistanceKernel(0.0, 1.0, 3.0)(2.0) == 1.0);
  CHECK(DistanceKernel(0.0, 1.0, 3.0)(3.0) == 1.0);
  CHECK(DistanceKernel(1.0, 1.0, 3.0)(2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(g2(0.5), Error);
  CHECK_THROWS_AS(g2(3.5), Error);
  CHECK(g2.eval_clamped(3.5) == 0.0);
  CHECK_THROWS_AS(DistanceKernel(-1.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(DistanceKernel(1.0, 2.0, 1.0), Error);
  CHECK(DistanceKernel(3.0, 2.0, 2.0)(2.0) == 1.0);

  const DistanceKernel clipped(2.0, 0.0, 1.0, Clip{});
  CHECK(clipped(0.0) == doctest::Approx(0.999 * 0.999));
  CHECK(clipped(1.0) == doctest::Approx(0.001 * 0.001));
  CHECK_THROWS_AS(DistanceKernel(1.0, 0.0, 1.0, Clip{0.5, 0.5}), Error);
}

TEST_CASE("kernel is non-increasing") {
  for (double alpha : {0.0, 0.3, 1.0, 4.5}) {
    const DistanceKernel g(alpha, 0.2, 7.0);
    double prev = 2.0;
    for (int t = 0; t <= 100; ++t) {
      const double v = g(0.2 + 6.8 * t / 100.0);
      CHECK(v <= prev);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("distance extremes") {
  const auto r = distance_extremes(points({0, 0, 3, 0, 0, 4}));
  CHECK(r.min == 3.0);
  CHECK(r.max == 5.0);
  const auto z = distance_extremes(points({1, 1, 1, 1, 4, 5}));
  CHECK(z.min == 0.0);
  CHECK(z.max == 5.0);
  CHECK_THROWS_AS(Embedding(3, 2, {1, 1, 1, 1, 1, 1}), Error);
  const auto eq = distance_extremes(points({0, 0, 2, 0}));
  CHECK(eq.min == 2.0);
  CHECK(eq.max == 2.0);
  CHECK(distance_extremes(points({0, 0, 3, 0, 0, 4}), Metric::manhattan).max == 7.0);
}

TEST_CASE("feasibility classification") {
  CHECK(check_feasibility(fixtures::graph_of(3, {{0, 1}, {1, 2}, {2, 0}}, true)) == Feasibility::feasible);
  CHECK(check_feasibility(fixtures::graph_of(4, {{0, 1}, {0, 2}, {0, 3}}, true)) == Feasibility::star);
  CHECK(check_feasibility(fixtures::graph_of(4, {{0, 1}, {0, 2}, {0, 3}}, false)) == Feasibility::star);
  CHECK(check_feasibility(fixtures::graph_of(2, {{0, 1}, {1, 0}}, true)) == Feasibility::two_nodes);
  CHECK(check_feasibility(fixtures::graph_of(4, {{0, 1}, {1, 2}, {2, 3}}, false)) == Feasibility::feasible);
  CHECK(std::string(to_string(Feasibility::star)) == "star");
}

TEST_CASE("degenerate graphs reproduce their adjacency") {
  const Graph star = fixtures::graph_of(4, {{0, 1}, {0, 2}, {0, 3}}, true);
  const auto m = fit(star, points({0, 0, 1, 0, 0, 1, 1, 1}), 1.0);
  REQUIRE(m.degenerate == Feasibility::star);
  CHECK(m.iterations == 0);
  for (NodeIndex i = 0; i < 4; ++i) {
    for (NodeIndex j = 0; j < 4; ++j) CHECK(m.probability(i, j) == (star.has_edge(i, j) ? 1.0 : 0.0));
  }
  const Graph pair = fixtures::graph_of(2, {{0, 1}, {1, 0}}, true);
  const auto m2 = fit(pair, points({0, 0, 1, 0}), 3.0);
  REQUIRE(m2.degenerate == Feasibility::two_nodes);
  CHECK(m2.probability(0, 1) == 1.0);
  CHECK(m2.probability(1, 0) == 1.0);
  CHECK(m2.probability(0, 0) == 0.0);
}

TEST_CASE("equilateral 3-cycle has uniform weights") {
  const Graph g = fixtures::graph_of(3, {{0, 1}, {1, 2}, {2, 0}}, true);
  const auto m = fit(g, points({1, 0, 0, 0, 1, 0, 0, 0, 1}, 3), 1.0);
  // All distances are exactly sqrt(2), so the kernel is 1 everywhere.
  CHECK(m.x_out[0] == 1.0);
  for (int i = 1; i < 3; ++i) {
    CHECK(m.x_out[i] == doctest::Approx(m.x_out[0]).epsilon(1e-8));
    CHECK(m.x_in[i] == doctest::Approx(m.x_in[0]).epsilon(1e-8));
  }
  CHECK(degree_error(m, g) <= 1e-8);
}

TEST_CASE("degree systems hold on a random 20-node digraph") {
  std::mt19937_64 rng(20);
  const Graph g = fixtures::random_digraph(20, 0.2, rng);
  const Embedding e = fixtures::random_embedding(20, 3, rng);
  const auto m = fit(g, e, 1.5);
  CHECK(m.fit_residual <= 1e-8);
  CHECK(degree_error(m, g) <= 1e-8);
}

TEST_CASE("weighted and undirected fits") {
  std::mt19937_64 rng(21);
  const Graph w = fixtures::random_digraph(25, 0.2, rng, true);
  CHECK(degree_error(fit(w, fixtures::random_embedding(25, 2, rng), 2.0), w) <= 1e-8);

  std::vector<Edge> edges;
  std::bernoulli_distribution coin(0.25);
  for (NodeIndex i = 0; i < 30; ++i) {
    for (NodeIndex j = i + 1; j < 30; ++j) {
      if (coin(rng)) edges.push_back({i, j, 1.0});
    }
  }
  const Graph u = Graph::from_edges(30, edges, false);
  const auto m = fit(u, fixtures::random_embedding(30, 2, rng), 1.0);
  CHECK(m.x_out == m.x_in);
  CHECK(degree_error(m, u) <= 1e-8);
}

TEST_CASE("alpha zero is Chung-Lu up to the excluded diagonal") {
  std::mt19937_64 rng(5);
  const Graph g = fixtures::random_digraph(30, 0.15, rng);
  const auto m = fit(g, fixtures::random_embedding(30, 2, rng), 0.0);
  // With g == 1 the fixed point is x_out[i] * (S_in - x_in[i]) = w_out[i].
  double s_in = 0.0, s_out = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    s_in += m.x_in[j];
    s_out += m.x_out[j];
  }
  for (std::size_t i = 0; i < g.n(); ++i) {
    CHECK(m.x_out[i] * (s_in - m.x_in[i]) == doctest::Approx(g.w_out()[i]).epsilon(1e-8));
    CHECK(m.x_in[i] * (s_out - m.x_out[i]) == doctest::Approx(g.w_in()[i]).epsilon(1e-8));
  }
  // The ratio to w_out w_in is constant only up to the diagonal correction, of order max w / W.
  double lo = 1e300, hi = 0.0, wmax = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    wmax = std::max({wmax, g.w_out()[i], g.w_in()[i]});
    for (std::size_t j = 0; j < g.n(); ++j) {
      if (i == j || g.w_out()[i] == 0.0 || g.w_in()[j] == 0.0) continue;
      const double c = m.probability(i, j) / (g.w_out()[i] * g.w_in()[j]);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  CHECK(hi / lo - 1.0 <= 4.0 * wmax / g.total_weight());
}

TEST_CASE("loops variant at alpha zero is exactly Chung-Lu") {
  std::mt19937_64 rng(6);
  const Graph g = fixtures::random_digraph(30, 0.15, rng);
  const Embedding e = fixtures::random_embedding(30, 2, rng);
  const auto range = distance_extremes(e);
  auto geo = std::make_shared<const Geometry>(e);
  const auto m = fit_weights(DegreeTargets::of(g), geo, DistanceKernel(0.0, range.min, range.max), true);
  const double w = g.total_weight();
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = 0; j < g.n(); ++j) {
      CHECK(m.probability(i, j) == doctest::Approx(g.w_out()[i] * g.w_in()[j] / w).epsilon(1e-10));
    }
  }
}

TEST_CASE("gauge, zero-degree nodes and monotonicity") {
  // Node 4 has no out-edges and node 0 no in-edges.
  const Graph g = fixtures::graph_of(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 1}, {1, 4}, {3, 4}, {2, 1}}, true);
  std::mt19937_64 rng(9);
  const auto m = fit(g, fixtures::random_embedding(5, 2, rng), 1.0);
  CHECK(m.x_out[0] == 1.0);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK((m.x_out[i] == 0.0) == (g.w_out()[i] == 0.0));
    CHECK((m.x_in[i] == 0.0) == (g.w_in()[i] == 0.0));
  }
  // For fixed weights p_ij follows the kernel.
  const double w = m.x_out[1] * m.x_in[2];
  double prev = 2.0;
  for (int t = 0; t <= 10; ++t) {
    const double d = m.kernel.d_min() + (m.kernel.d_max() - m.kernel.d_min()) * t / 10.0;
    CHECK(w * m.kernel(d) <= prev);
    prev = w * m.kernel(d);
  }
}

TEST_CASE("fits from perturbed starts agree") {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 3; ++t) {
    const Graph g = fixtures::random_digraph(15, 0.25, rng);
    const Embedding e = fixtures::random_embedding(15, 2, rng);
    FitOptions a, b;
    a.init_scale_out = a.init_scale_in = 2.0;
    b.init_scale_out = b.init_scale_in = 0.5;
    const auto pa = fixtures::p_matrix(fit(g, e, 2.0, a));
    const auto pb = fixtures::p_matrix(fit(g, e, 2.0, b));
    for (std::size_t i = 0; i < 15; ++i) {
      for (std::size_t j = 0; j < 15; ++j) CHECK(std::abs(pa[i][j] - pb[i][j]) <= 1e-7);
    }
  }
}

TEST_CASE("non-convergence reports a residual") {
  std::mt19937_64 rng(4);
  const Graph g = fixtures::random_digraph(20, 0.2, rng);
  FitOptions opts;
  opts.max_iter = 2;
  try {
    (void)fit(g, fixtures::random_embedding(20, 2, rng), 3.0, opts);
    FAIL("expected a FitError");
  } catch (const FitError& e) {
    CHECK(e.residual() > opts.tol);
    CHECK(e.iterations() == 2);
  }
}

TEST_CASE("block mass matches a brute-force sum") {
  std::mt19937_64 rng(30);
  const Graph g = fixtures::random_digraph(30, 0.15, rng);
  std::vector<std::int64_t> labels(30);
  for (std::size_t i = 0; i < 30; ++i) labels[i] = static_cast<std::int64_t>(i % 3);
  const Partition part = Partition::from_labels(labels);
  const auto m = fit(g, fixtures::random_embedding(30, 2, rng), 1.25);
  const auto blocks = expected_block_mass(m, g, part);

  std::vector<double> brute(9, 0.0);
  double total = 0.0;
  for (std::size_t u = 0; u < 30; ++u) {
    for (std::size_t v = 0; v < 30; ++v) {
      if (u == v) continue;
      const double p = std::min(1.0, m.probability(u, v));
      brute[part[u] * 3 + part[v]] += p;
      total += p;
    }
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < 9; ++c) {
    CHECK(blocks.mass[c] == doctest::Approx(brute[c] / total).epsilon(1e-12));
    sum += blocks.mass[c];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("alpha zero block mass is symmetric for regular degrees") {
  // Directed 8-cycle plus chords i -> i+3: every node has out- and in-degree 2.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 8; ++i) {
    pairs.emplace_back(i, (i + 1) % 8);
    pairs.emplace_back(i, (i + 3) % 8);
  }
  const Graph g = fixtures::graph_of(8, pairs, true);
  const std::vector<std::int64_t> labels{0, 0, 0, 0, 1, 1, 1, 1};
  const Partition part = Partition::from_labels(labels);
  std::mt19937_64 rng(1);
  const auto blocks = expected_block_mass(fit(g, fixtures::random_embedding(8, 2, rng), 0.0), g, part);
  CHECK(blocks(0, 1) == doctest::Approx(blocks(1, 0)).epsilon(1e-12));
}

TEST_CASE("loops variant satisfies the degree system with loop terms") {
  std::mt19937_64 rng(12);
  const std::size_t n = 12;
  std::vector<double> coords(n * 2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& x : coords) x = gauss(rng);
  std::vector<double> self(n);
  std::uniform_real_distribution<double> sd(0.1, 0.5);
  for (double& s : self) s = sd(rng);
  auto geo = std::make_shared<const Geometry>(n, 2, coords, Metric::euclidean, self);
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      lo = std::min(lo, geo->distance(i, j));
      hi = std::max(hi, geo->distance(i, j));
    }
  }
  DegreeTargets t;
  std::uniform_real_distribution<double> wd(1.0, 5.0);
  for (std::size_t i = 0; i < n; ++i) {
    t.out.push_back(wd(rng));
    t.in.push_back(wd(rng));
  }
  double so = 0.0, si = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    so += t.out[i];
    si += t.in[i];
  }
  for (double& w : t.in) w *= so / si;
  const DistanceKernel kernel(1.0, std::max(0.0, lo - 0.5), hi + 0.5);
  const auto m = fit_weights(t, geo, kernel, true);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += m.probability(i, j);
      col += m.probability(j, i);
    }
    CHECK(row == doctest::Approx(t.out[i]).epsilon(1e-8));
    CHECK(col == doctest::Approx(t.in[i]).epsilon(1e-8));
  }
  CHECK(m.probability(3, 3) > 0.0);
}
