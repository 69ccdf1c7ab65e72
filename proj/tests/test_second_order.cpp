#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "segpoint/error.hpp"
#include "segpoint/nn_graph.hpp"
#include "segpoint/patterns.hpp"
#include "segpoint/second_order.hpp"

using namespace segpoint;
using std::numbers::pi;

TEST_CASE("edge weight examples") {
  const RectWindow u = RectWindow::unit();
  CHECK(edge_weight({0.5, 0.5}, 0.25, u) == doctest::Approx(1.0));
  CHECK(edge_weight({0.0, 0.0}, 0.1, u) == doctest::Approx(0.25));
  CHECK(edge_weight({0.5, 0.0}, 0.2, u) == doctest::Approx(0.5));
  CHECK(edge_weight({0.5, 0.5}, 2.0, u) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(edge_weight({0.5, 0.5}, 0.0, u), InputError);
  CHECK_THROWS_AS(edge_weight({1.5, 0.5}, 0.1, u), InputError);
}

TEST_CASE("edge weight against angular sampling") {
  const RectWindow w{0, 2, 0, 1};
  Rng rng(31);
  for (int k = 0; k < 60; ++k) {
    const Point2 c{rng.uniform(0, 2), rng.uniform(0, 1)};
    const double r = rng.uniform(0.01, 1.2);
    CHECK(edge_weight(c, r, w) == doctest::Approx(oracle::sampled_edge_weight(c, r, w)).epsilon(2e-4));
  }
}

TEST_CASE("edge weight is continuous in the radius") {
  const RectWindow u = RectWindow::unit();
  const Point2 c{0.3, 0.2};
  for (double r0 : {0.2, 0.3, std::hypot(0.3, 0.2), 0.7, 0.8}) {
    CHECK(std::abs(edge_weight(c, r0 - 1e-9, u) - edge_weight(c, r0 + 1e-9, u)) < 1e-4);
  }
}

TEST_CASE("K for two points") {
  const std::vector<Point2> p{{0.5, 0.5}, {0.75, 0.5}};
  const DistanceGrid g{{0.1, 0.25, 0.2500001, 0.3}};
  const auto k = ripley_k_uni(p, RectWindow::unit(), g);
  CHECK(k[0] == 0.0);
  CHECK(k[1] == 0.0);
  CHECK(k[2] == doctest::Approx(0.5));
  CHECK(k[3] == doctest::Approx(0.5));
  CHECK_THROWS_AS(ripley_k_uni(std::vector<Point2>{{0.5, 0.5}}, RectWindow::unit(), g), InputError);
  CHECK_THROWS_AS((DistanceGrid{{0.2, 0.1}}).validate(), InputError);
}

TEST_CASE("K is nondecreasing and the bivariate form is symmetric") {
  Rng rng(4);
  const auto s = gen_csr({60, 40}, RectWindow::unit(), rng);
  const auto grid = default_grid(s.window(), 128);
  CHECK(grid.t.back() == doctest::Approx(0.25));
  const auto k = ripley_k_uni(s.points(), s.window(), grid);
  for (std::size_t i = 1; i < k.size(); ++i) CHECK(k[i] >= k[i - 1]);

  const auto k01 = ripley_k_biv(s, 0, 1, grid);
  const auto k10 = ripley_k_biv(s, 1, 0, grid);
  for (std::size_t i = 0; i < k01.size(); ++i) CHECK(std::abs(k01[i] - k10[i]) < 1e-9);

  const auto k00 = ripley_k_biv(s, 0, 0, grid);
  const auto u0 = ripley_k_uni(s.class_points(0), s.window(), grid);
  for (std::size_t i = 0; i < k00.size(); ++i) CHECK(k00[i] == doctest::Approx(u0[i]));
}

TEST_CASE("L transforms") {
  const DistanceGrid g = DistanceGrid::uniform(1.0, 4);
  std::vector<double> k;
  for (double t : g.t) k.push_back(pi * t * t);
  const auto l = l_from_k(k);
  const auto d = l_minus_t(k, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(l[i] == doctest::Approx(g.t[i]));
    CHECK(std::abs(d[i]) < 1e-12);
  }
}

TEST_CASE("pair correlation of a Poisson K is one") {
  const DistanceGrid g = DistanceGrid::uniform(0.25, 256);
  std::vector<double> k;
  for (double t : g.t) k.push_back(pi * t * t);
  const auto pcf = pair_correlation(k, g, 0.02, 0.03);
  for (std::size_t i = 0; i < pcf.g.size(); ++i) {
    if (pcf.t[i] > 0.03) CHECK(pcf.g[i] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(pcf.reliable[i] == (pcf.t[i] >= 0.03));
  }
  CHECK_THROWS_AS(pair_correlation(k, g, 1e-6), NumericalError);
  CHECK(default_pcf_bandwidth(100, RectWindow::unit()) == doctest::Approx(0.015));
}

TEST_CASE("hard-core pattern has g below one at short range") {
  std::vector<Point2> p;
  Rng rng(2);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      p.push_back({(i + 0.5) / 20 + rng.uniform(-0.005, 0.005), (j + 0.5) / 20 + rng.uniform(-0.005, 0.005)});
  const auto grid = default_grid(RectWindow::unit(), 256);
  const auto k = ripley_k_uni(p, RectWindow::unit(), grid);
  const auto pcf = pair_correlation(k, grid, default_pcf_bandwidth(p.size(), RectWindow::unit()));
  for (std::size_t i = 0; i < pcf.t.size(); ++i)
    if (pcf.t[i] > 0.01 && pcf.t[i] < 0.03) CHECK(pcf.g[i] < 0.5);
}

TEST_CASE("Diggle D vanishes for identical classes") {
  Rng rng(3);
  std::vector<Point2> p;
  std::vector<int> lab;
  for (int i = 0; i < 40; ++i) {
    const Point2 a{rng.uniform(), rng.uniform()};
    p.push_back(a);
    lab.push_back(0);
    p.push_back(a);
    lab.push_back(1);
  }
  const MarkedPointSet s(p, lab, RectWindow::unit(), 2);
  McConfig c;
  c.replicates = 19;
  const auto d = diggle_d(s, 0, 1, DistanceGrid::uniform(0.25, 32), c);
  for (double x : d.estimate) CHECK(x == doctest::Approx(0.0));
  for (std::size_t i = 0; i < d.t.size(); ++i) CHECK(d.lower[i] <= d.upper[i]);
  CHECK(d.n_sim == 19);
}

namespace {

CurveWithEnvelope csr_envelope(long n, std::size_t sims, std::uint64_t seed) {
  const auto grid = DistanceGrid::uniform(0.25, 25);
  Rng rng(seed);
  const auto obs = gen_csr({n, 0}, RectWindow::unit(), rng);
  McConfig c;
  c.replicates = sims;
  c.master_seed = seed;
  return envelope(grid, ripley_k_uni(obs.points(), obs.window(), grid),
                  [&](Rng& r) {
                    const auto s = gen_csr({n, 0}, RectWindow::unit(), r);
                    return ripley_k_uni(s.points(), s.window(), grid);
                  },
                  c);
}

}  // namespace

TEST_CASE("envelopes") {
  const auto one = csr_envelope(30, 1, 1);
  for (std::size_t i = 0; i < one.t.size(); ++i) CHECK(one.lower[i] == one.upper[i]);

  const auto small = csr_envelope(50, 99, 2);
  const auto big = csr_envelope(500, 99, 2);
  CHECK(small.upper[12] - small.lower[12] > big.upper[12] - big.lower[12]);

  // the simulated mean sits near pi t^2
  for (std::size_t i = 5; i < big.t.size(); ++i)
    CHECK(big.sim_mean[i] == doctest::Approx(pi * big.t[i] * big.t[i]).epsilon(0.05));
}

TEST_CASE("association pushes the cross K above its relabeling envelope") {
  const auto spec = PatternSpec::from_scenario("assoc:0.03", {60, 60}, RectWindow::unit(), 5);
  auto s = generate(spec, 0);
  // keep offspring inside the window so edge weights are defined
  std::vector<Point2> p(s.points().begin(), s.points().end());
  for (auto& a : p) {
    a.x = std::clamp(a.x, 0.0, 1.0);
    a.y = std::clamp(a.y, 0.0, 1.0);
  }
  const MarkedPointSet m(p, std::vector<int>(s.labels().begin(), s.labels().end()), RectWindow::unit(), 2);
  const auto grid = DistanceGrid::uniform(0.1, 10);
  McConfig c;
  c.replicates = 99;
  const auto env = envelope(grid, ripley_k_biv(m, 0, 1, grid),
                            [&](Rng& r) { return ripley_k_biv(relabel(m, r), 0, 1, grid); }, c);
  CHECK(env.estimate[2] > env.upper[2]);
}
