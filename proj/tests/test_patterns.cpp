#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "segpoint/error.hpp"
#include "segpoint/moments.hpp"
#include "segpoint/nn_graph.hpp"
#include "segpoint/nnct.hpp"
#include "segpoint/patterns.hpp"

using namespace segpoint;

TEST_CASE("substreams are reproducible and distinct") {
  Rng a(42, 1, 7);
  Rng b(42, 1, 7);
  Rng c(42, 1, 8);
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  Rng d(3);
  for (int k = 0; k < 1000; ++k) {
    const double u = d.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(d.below(7) < 7);
  }
}

TEST_CASE("CSR stays in the window and is deterministic") {
  const RectWindow w{-2, 5, 1, 1.5};
  Rng r1(11);
  Rng r2(11);
  const auto s = gen_csr({40, 0, 25}, w, r1);
  const auto t = gen_csr({40, 0, 25}, w, r2);
  CHECK(s.size() == 65);
  CHECK(s.class_sizes()[1] == 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(w.contains(s.points()[i]));
    CHECK(s.points()[i] == t.points()[i]);
  }
  Rng r3(11);
  CHECK_THROWS_AS(gen_csr({5}, w, r3), InputError);
  CHECK_THROWS_AS(gen_csr({5, -1}, w, r3), InputError);
}

TEST_CASE("RL layouts") {
  Rng rng(5);
  const auto l3 = gen_rl_layout(3, {30, 20}, rng);
  CHECK(l3.window() == RectWindow{0, 3, 0, 1});
  for (std::size_t i = 0; i < l3.size(); ++i) {
    const auto& p = l3.points()[i];
    if (l3.labels()[i] == 0) {
      CHECK(p.x <= 1.0);
    } else {
      CHECK(p.x >= 2.0);
    }
  }
  const auto l2 = gen_rl_layout(2, {30, 20}, rng);
  for (std::size_t i = 0; i < l2.size(); ++i) {
    const auto& p = l2.points()[i];
    if (l2.labels()[i] == 0) {
      CHECK(std::max(p.x, p.y) <= 2.0 / 3.0);
    } else {
      CHECK(std::min(p.x, p.y) >= 1.0 / 3.0);
    }
  }
  CHECK_THROWS_AS(gen_rl_layout(4, {3, 3}, rng), InputError);
  CHECK_THROWS_AS(gen_rl_layout(3, {3, 3, 3}, rng), InputError);

  // fixed locations across replicates, fresh ones when asked
  auto spec = PatternSpec::from_scenario("rl:2", {10, 10}, RectWindow::unit(), 9);
  const auto a = generate(spec, 0);
  const auto b = generate(spec, 1);
  std::vector<Point2> pa(a.points().begin(), a.points().end());
  std::vector<Point2> pb(b.points().begin(), b.points().end());
  CHECK(pa == pb);
  CHECK(std::vector<int>(a.labels().begin(), a.labels().end()) !=
        std::vector<int>(b.labels().begin(), b.labels().end()));
  spec.regenerate_locations = true;
  CHECK(generate(spec, 0).points()[0] != generate(spec, 1).points()[0]);
}

TEST_CASE("segregation with s = 0 is CSR in the unit square") {
  auto spec = PatternSpec::from_scenario("seg:0", {15, 25}, RectWindow::unit(), 1);
  Rng r1(77);
  Rng r2(77);
  const auto s = gen_segregation(spec, r1);
  const auto c = gen_csr({15, 25}, RectWindow::unit(), r2);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.points()[i].x == c.points()[i].x);
    CHECK(s.points()[i].y == c.points()[i].y);
  }
}

TEST_CASE("segregation supports") {
  auto two = PatternSpec::from_scenario("seg:1/3", {50, 50}, RectWindow::unit(), 1);
  CHECK(two.s == doctest::Approx(1.0 / 3.0));
  const auto s = generate(two, 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& p = s.points()[i];
    if (s.labels()[i] == 0) {
      CHECK(std::max(p.x, p.y) <= 2.0 / 3.0);
    } else {
      CHECK(std::min(p.x, p.y) >= 1.0 / 3.0);
    }
  }
  auto three = PatternSpec::from_scenario("seg:1/8", {20, 20, 20}, RectWindow::unit(), 1);
  CHECK(three.kind == PatternKind::segregation3);
  const auto t = generate(three, 3);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& p = t.points()[i];
    switch (t.labels()[i]) {
      case 0: CHECK(std::max(p.x, p.y) <= 0.75); break;
      case 1: CHECK(std::min(p.x, p.y) >= 0.25); break;
      default:
        CHECK(std::min(p.x, p.y) >= 0.125);
        CHECK(std::max(p.x, p.y) <= 0.875);
    }
  }
}

TEST_CASE("association offspring sit near a parent") {
  const auto spec = PatternSpec::from_scenario("assoc:1/7,1/10", {30, 20, 25}, RectWindow::unit(), 4);
  CHECK(spec.kind == PatternKind::association3);
  const auto s = generate(spec, 2);
  const auto parents = s.class_points(0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int l = s.labels()[i];
    if (l == 0) continue;
    double best = INFINITY;
    for (const auto& p : parents) best = std::min(best, distance(p, s.points()[i]));
    CHECK(best <= (l == 1 ? 1.0 / 7.0 : 0.1) + 1e-12);
  }
}

TEST_CASE("scenario strings") {
  CHECK(parse_number("1/6") == doctest::Approx(1.0 / 6.0));
  CHECK(parse_number("0.25") == 0.25);
  CHECK_THROWS_AS(parse_number("1/0"), InputError);
  CHECK_THROWS_AS(parse_number("abc"), InputError);
  const std::vector<long> s2{10, 10};
  CHECK(PatternSpec::from_scenario("csr", s2, RectWindow::unit(), 0).kind == PatternKind::csr);
  CHECK(PatternSpec::from_scenario("assoc:1/4", s2, RectWindow::unit(), 0).r == doctest::Approx(0.25));
  CHECK(PatternSpec::from_scenario("rl:3", s2, RectWindow::unit(), 0).scenario() == "rl:3");
  CHECK_THROWS_AS(PatternSpec::from_scenario("seg:1.2", s2, RectWindow::unit(), 0), InputError);
  CHECK_THROWS_AS(PatternSpec::from_scenario("assoc:-1", s2, RectWindow::unit(), 0), InputError);
  CHECK_THROWS_AS(PatternSpec::from_scenario("assoc:0.1,0.2", s2, RectWindow::unit(), 0), InputError);
  CHECK_THROWS_AS(PatternSpec::from_scenario("cluster", s2, RectWindow::unit(), 0), InputError);
}

TEST_CASE("mean NNCT under CSR matches the expected counts") {
  const std::vector<long> sizes{30, 30};
  double n00 = 0;
  double n01 = 0;
  const int M = 4000;
  auto spec = PatternSpec::from_scenario("csr", sizes, RectWindow::unit(), 21);
  for (int r = 0; r < M; ++r) {
    const auto s = generate(spec, static_cast<std::uint64_t>(r));
    const Nnct t = build_nnct(s, build_nn_graph(s));
    n00 += static_cast<double>(t(0, 0));
    n01 += static_cast<double>(t(0, 1));
  }
  const auto e = expected_counts(sizes);
  CHECK(n00 / M == doctest::Approx(e(0, 0)).epsilon(0.02));
  CHECK(n01 / M == doctest::Approx(e(0, 1)).epsilon(0.02));
}

TEST_CASE("CSR coordinates are uniform (KS)") {
  Rng rng(8);
  const auto s = gen_csr({1000, 1000}, RectWindow::unit(), rng);
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : s.points()) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  for (auto* v : {&xs, &ys}) {
    std::sort(v->begin(), v->end());
    double d = 0;
    const double n = static_cast<double>(v->size());
    for (std::size_t i = 0; i < v->size(); ++i) {
      d = std::max(d, std::abs((static_cast<double>(i) + 1) / n - (*v)[i]));
      d = std::max(d, std::abs((*v)[i] - static_cast<double>(i) / n));
    }
    CHECK(d < 1.63 / std::sqrt(n));  // 1% level
  }
}
