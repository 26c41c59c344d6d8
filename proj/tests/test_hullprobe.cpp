#include <doctest.h>

#include <cmath>
#include <numbers>

#include "prc/hullprobe.hpp"
#include "support.hpp"

using namespace prc;
using namespace prc::testing;

namespace {

SampleCloud circle(int count, double radius = 1.0) {
  SampleCloud c;
  for (int t = 0; t < count; ++t)
    c.points.push_back({std::polar(radius, 2 * std::numbers::pi * t / count)});
  return c;
}

const SampleCloud& wermer_cloud() {
  static const SampleCloud c =
      sample_compact(wermer_system(), CompactSpec::graph_polydisc({0.0}, {1.0}), 40);
  return c;
}

// Brute force: best feasible vertex among all square subsystems.
double vertex_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(n));
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      Eigen::MatrixXd s(n, n);
      Eigen::VectorXd r(n);
      for (int k = 0; k < n; ++k) {
        s.row(k) = a.row(pick[static_cast<std::size_t>(k)]);
        r(k) = b(pick[static_cast<std::size_t>(k)]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(r);
      if (((a * x - b).array() <= 1e-9).all()) best = std::max(best, c.dot(x));
      return;
    }
    for (int i = start; i < m; ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("maximize small LPs") {
  Eigen::MatrixXd a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  Eigen::VectorXd b(3), c(2);
  b << 2, 3, 4;
  c << 1, 1;
  const LpResult r = maximize(a, b, c);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(4.0));
  CHECK(((a * r.x - b).array() <= 1e-9).all());

  Eigen::MatrixXd u(1, 2);
  u << 0, 1;
  Eigen::VectorXd ub(1), uc(2);
  ub << 1;
  uc << 1, 0;
  const LpResult ray = maximize(u, ub, uc);
  REQUIRE(ray.status == LpStatus::Unbounded);
  CHECK(uc.dot(ray.x) > 0);
  CHECK((u * ray.x)(0) <= 1e-12);

  Eigen::MatrixXd inf(2, 1);
  inf << 1, -1;
  Eigen::VectorXd ib(2), ic(1);
  ib << -1, -1;
  ic << 1;
  CHECK(maximize(inf, ib, ic).status == LpStatus::Infeasible);
  CHECK_THROWS_AS(maximize(a, ub, c), std::invalid_argument);
}

TEST_CASE("maximize matches vertex enumeration") {
  Rng rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = uniform_int(rng, 2, 3), m = uniform_int(rng, n + 2, 9);
    Eigen::MatrixXd a(m + 2 * n, n);
    Eigen::VectorXd b(m + 2 * n), c(n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = uniform(rng, -1, 1);
      b(i) = uniform(rng, 0.1, 2);
    }
    // Bounding box keeps the LP bounded.
    for (int j = 0; j < n; ++j) {
      a.row(m + 2 * j).setZero();
      a.row(m + 2 * j + 1).setZero();
      a(m + 2 * j, j) = 1;
      a(m + 2 * j + 1, j) = -1;
      b(m + 2 * j) = b(m + 2 * j + 1) = 5;
    }
    for (int j = 0; j < n; ++j) c(j) = uniform(rng, -1, 1);
    const LpResult r = maximize(a, b, c);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(vertex_max(a, b, c)).epsilon(1e-9));
    CHECK(((a * r.x - b).array() <= 1e-9).all());
  }
}

TEST_CASE("monomial exponents") {
  const auto e = monomial_exponents(2, 3);
  CHECK(e.size() == 10);
  CHECK(e.front() == std::vector<int>{0, 0});
  CHECK(e[1] == std::vector<int>{1, 0});
  CHECK(e[2] == std::vector<int>{0, 1});
  CHECK(monomial_exponents(3, 6).size() == 84);
  CHECK(monomial_exponents(1, 8).size() == 9);
  CHECK_THROWS_AS(monomial_exponents(0, 2), std::invalid_argument);
}

TEST_CASE("sample_compact graph") {
  const auto sys = wermer_system();
  const SampleCloud& c = wermer_cloud();
  CHECK(c.points.size() >= 1000);
  CHECK(c.dimension() == 2);
  for (const auto& p : c.points) {
    CHECK(std::abs(p[0]) <= 1.0 + 1e-12);
    const cplx z[] = {p[0]};
    CHECK(std::abs(p[1] - eval_point(wermer_f(), z)) <= 1e-9);
  }
  const auto again = sample_compact(sys, CompactSpec::graph_polydisc({0.0}, {1.0}), 40);
  CHECK(again.points == c.points);

  const auto single = sample_compact(sys, CompactSpec::graph_polydisc({cplx(0.2, 0.1)}, {0.0}), 40);
  CHECK(single.points.size() == 1);

  ParamBox box;
  box.z = {Interval(0, 1), Interval(0, 0.5)};
  const auto grid = sample_compact(sys, CompactSpec::graph_box(box), 5);
  CHECK(grid.points.size() == 25);
  CHECK_THROWS_AS(sample_compact(sys, CompactSpec::graph_box(box), 1), InputError);
  CHECK_THROWS_AS(sample_compact(example2_system(), CompactSpec::graph_box(box), 5), InputError);
}

TEST_CASE("sample_compact submersion") {
  const auto sys = example2_system();
  const auto cap = CompactSpec::submersion_cap({0.0, 0.0}, {1.0, 1.0});
  const auto c = sample_compact(sys, cap, 40, 9);
  CHECK(c.points.size() > 800);
  CHECK(c.max_defect <= 1e-9);
  for (const auto& p : c.points) {
    CHECK(residual(sys, p) <= 2e-9);
    CHECK(std::abs(p[0]) <= 1.0 + 1e-12);
    CHECK(std::abs(p[1]) <= 1.0 + 1e-12);
  }
  CHECK(sample_compact(sys, cap, 40, 9).points == c.points);
  CHECK(sample_compact(sys, cap, 40, 10).points != c.points);

  const auto circ = ProblemSystem::submersion({parse("Re(z1)^2 + Im(z1)^2 - 1", 1)}, 1, 1);
  const auto cc = sample_compact(circ, CompactSpec::submersion_cap({0.0}, {2.0}), 50);
  CHECK(cc.points.size() >= 40);
  for (const auto& p : cc.points) CHECK(std::abs(p[0]) == doctest::Approx(1.0).epsilon(1e-9));

  const auto none = ProblemSystem::submersion({parse("Re(z1)^2 + Im(z1)^2 + 1", 1)}, 1, 1);
  CHECK_THROWS_AS(sample_compact(none, CompactSpec::submersion_cap({0.0}, {1.0}), 20),
                  SamplingError);
}

TEST_CASE("probe unit circle") {
  const SampleCloud c = circle(360);
  const std::vector<cplx> zero{0.0}, far{1.5};
  for (int d = 1; d <= 8; ++d) {
    const auto r = probe(c, zero, {d, 16, 0.05});
    CHECK_FALSE(r.separated);
    CHECK(r.ratio <= 1.0 + 1e-9);
  }
  const auto s = probe(c, far, {1, 16, 0.05});
  CHECK(s.separated);
  CHECK(s.ratio == doctest::Approx(1.5).epsilon(1e-3));
  // The optimum is a multiple of z.
  CHECK(std::abs(s.coefficients[0]) <= 1e-6 * std::abs(s.coefficients[1]));
  CHECK(s.threshold == doctest::Approx(1.05 / std::cos(std::numbers::pi / 16)));
}

TEST_CASE("probe Wermer disc") {
  const SampleCloud& c = wermer_cloud();
  const std::vector<cplx> origin{0.0, 0.0}, high{0.0, 2.0};
  for (int d : {1, 2, 4}) {
    const auto r = probe(c, origin, {d, 16, 0.05});
    CHECK_FALSE(r.separated);
  }
  const auto s = probe(c, high, {2, 16, 0.05});
  CHECK(s.separated);
  CHECK(s.ratio >= 1.5);

  // Fresh evaluation of the returned polynomial reproduces the report.
  double cm = 0.0;
  for (const auto& p : c.points) cm = std::max(cm, std::abs(eval_polynomial(s.exponents, s.coefficients, p)));
  CHECK(cm == doctest::Approx(s.cloud_max).epsilon(1e-9));
  CHECK(std::abs(eval_polynomial(s.exponents, s.coefficients, high)) / cm ==
        doctest::Approx(s.ratio).epsilon(1e-9));

  SeparationResult dense = s;
  check_fragility(dense, sample_compact(wermer_system(), CompactSpec::graph_polydisc({0.0}, {1.0}), 126), high);
  REQUIRE(dense.fragile.has_value());
  CHECK_FALSE(*dense.fragile);
  CHECK(*dense.dense_ratio > 1.0);
}

TEST_CASE("probe properties") {
  Rng rng(21);
  const SampleCloud c = circle(120, 0.8);
  const std::vector<cplx> q{cplx(0.3, 0.9)};
  double prev = 0.0;
  for (int d = 1; d <= 6; ++d) {
    const auto r = probe(c, q, {d, 12, 0.05});
    CHECK(r.objective >= prev * (1 - 1e-7));
    prev = r.objective;
  }
  const SampleCloud& w = wermer_cloud();
  for (int i = 0; i < 5; ++i) {
    const auto& p = w.points[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(w.points.size()) - 1))];
    const auto r = probe(w, p, {2, 16, 0.05});
    CHECK_FALSE(r.separated);
    CHECK(r.ratio <= 1.0 + 1e-9);
  }
}

TEST_CASE("probe degenerate cloud and errors") {
  SampleCloud one;
  one.points = {{cplx(0.5, 0.0)}};
  const auto r = probe(one, std::vector<cplx>{cplx(0.0)}, {1, 8, 0.05});
  CHECK(r.unbounded);
  CHECK(r.separated);
  CHECK(std::isinf(r.ratio));
  const auto same = probe(one, std::vector<cplx>{cplx(0.5)}, {1, 8, 0.05});
  CHECK_FALSE(same.separated);

  const SampleCloud c = circle(50);
  CHECK_THROWS_AS(probe(c, std::vector<cplx>{0.0}, {0, 16, 0.05}), std::invalid_argument);
  CHECK_THROWS_AS(probe(c, std::vector<cplx>{0.0}, {2, 7, 0.05}), std::invalid_argument);
  CHECK_THROWS_AS(probe(c, std::vector<cplx>{0.0, 0.0}, {2, 16, 0.05}), std::invalid_argument);
  CHECK_THROWS_AS(probe(SampleCloud{}, std::vector<cplx>{0.0}, {2, 16, 0.05}), std::invalid_argument);

  const Json j = to_json(probe(c, std::vector<cplx>{1.5}, {1, 16, 0.05}));
  CHECK(j["label"] == "EVIDENCE");
  CHECK(j["separated"] == true);
  CHECK(j["polynomial"].size() >= 1);
}
