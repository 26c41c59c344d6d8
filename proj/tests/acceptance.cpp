// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "prc/certify.hpp"
#include "prc/cli.hpp"
#include "prc/hullprobe.hpp"
#include "prc/rigor.hpp"
#include "prc/wirtinger.hpp"
#include "support.hpp"

using namespace prc;
using namespace prc::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- criterion 1: symbolic derivatives against finite differences ----

// Real axis a of z: a = 2j is Re z_j, a = 2j+1 is Im z_j.
std::vector<cplx> shifted(std::span<const cplx> z, int a, double t) {
  std::vector<cplx> p(z.begin(), z.end());
  p[static_cast<std::size_t>(a / 2)] += a % 2 == 0 ? cplx(t, 0) : cplx(0, t);
  return p;
}

using Field = std::function<cplx(std::span<const cplx>)>;

// Fourth-order central difference along real axis a.
cplx diff(const Field& f, std::span<const cplx> z, int a, double h) {
  return (-f(shifted(z, a, 2 * h)) + 8.0 * f(shifted(z, a, h)) -
          8.0 * f(shifted(z, a, -h)) + f(shifted(z, a, -2 * h))) /
         (12 * h);
}

Outcome criterion_derivatives() {
  const auto t0 = Clock::now();
  Rng rng(101);
  const double h = 1e-3;
  double worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    const int n = uniform_int(rng, 1, 3);
    const Expr e = random_poly(rng, n, 5);
    const WirtingerTable table(normalize(e), n);
    const auto z = random_point(rng, n);
    const WirtingerFrame fr = table.frame(z);
    const Field f = [&](std::span<const cplx> p) { return eval_point(e, p); };
    for (int j = 0; j < n; ++j) {
      const cplx fx = diff(f, z, 2 * j, h), fy = diff(f, z, 2 * j + 1, h);
      worst = std::max(worst, rel_err(fr.grad_z(j), 0.5 * (fx - cplx(0, 1) * fy)));
      worst = std::max(worst, rel_err(fr.grad_zbar(j), 0.5 * (fx + cplx(0, 1) * fy)));
    }
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // ∂²/∂z_j∂z̄_k = ¼(∂x_j − i∂y_j)(∂x_k + i∂y_k), nested stencils.
        auto second = [&](int a, int b) {
          const Field inner = [&](std::span<const cplx> p) { return diff(f, p, b, h); };
          return diff(inner, z, a, h);
        };
        const cplx oracle = 0.25 * (second(2 * j, 2 * k) + cplx(0, 1) * second(2 * j, 2 * k + 1) -
                                    cplx(0, 1) * second(2 * j + 1, 2 * k) +
                                    second(2 * j + 1, 2 * k + 1));
        worst = std::max(worst, rel_err(fr.levi(j, k), oracle));
      }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t <= 10.0,
          fmt("200 random polynomials, max rel err %.3g (tol 1e-6), %.2f s (limit 10 s)", worst, t)};
}

// ---- criterion 2: Wermer closed forms ----

Outcome criterion_wermer_closed_forms() {
  const ProblemSystem sys = wermer_system();
  Rng rng(102);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const cplx z = std::polar(std::sqrt(uniform(rng, 0, 1)), uniform(rng, 0, 2 * std::numbers::pi));
    const double r = std::abs(z), r2 = r * r;
    const cplx p[] = {z};
    const WirtingerFrame fr = sys.table(0).frame(p);
    const cplx dbar = -cplx(1, 1) + cplx(0, 2) * r2 + 3 * r2 * r2;
    const cplx levi = 2.0 * std::conj(z) * (cplx(0, 1) + 3 * r2);
    worst = std::max({worst, rel_err(fr.grad_zbar(0), dbar), rel_err(fr.levi(0, 0), levi),
                      rel_err(m_value(sys, p), wermer_m(r)),
                      rel_err(big_l_value(sys, p), wermer_l(r))});
  }
  return {worst <= 1e-10, fmt("1000 points |z| <= 1, max rel err %.3g (tol 1e-10)", worst)};
}

// ---- criterion 3: Levi identity for u ----

Outcome criterion_levi_identity() {
  Rng rng(103);
  double gap = 0.0, below = 0.0;
  auto record = [&](const LeviIdentity& li) {
    gap = std::max(gap, std::fabs(li.direct - li.expanded) / (1 + std::fabs(li.direct)));
    below = std::max(below, li.lower_bound - li.direct);
  };
  const ProblemSystem w = wermer_system(), ex2 = example2_system();
  for (int s = 0; s < 1000; ++s) {
    const bool random = s % 2 == 1;
    const ProblemSystem sys = random ? random_graph(rng, 2) : w;
    const int n = sys.n();
    const auto z = random_point(rng, n), ww = random_point(rng, n);
    const CVector v = random_unit(rng, n) * uniform(rng, 0.1, 2.0);
    const CVector t = random_unit(rng, n) * uniform(rng, 0.0, 2.0);
    record(levi_u_graph(sys, z, ww, v, t));
  }
  for (int s = 0; s < 1000; ++s) {
    const bool random = s % 2 == 1;
    const ProblemSystem sys = random ? random_submersion(rng, 2, 2) : ex2;
    const auto z = random_point(rng, 2, 2.0);
    const CVector v = random_unit(rng, 2) * uniform(rng, 0.1, 2.0);
    record(levi_u_submersion(sys, z, v));
  }
  return {gap <= 1e-8 && below <= 1e-9,
          fmt("2000 cases, max |direct-expanded|/(1+|direct|) %.3g (tol 1e-8), "
              "max lower_bound-direct %.3g (tol 1e-9)",
              gap, below)};
}

// ---- criterion 4: m against derivative-free minimization ----

Outcome criterion_m_brute_force() {
  Rng rng(104);
  double worst = 0.0, undershoot = 0.0;
  for (int s = 0; s < 50; ++s) {
    const int n = uniform_int(rng, 1, 3);
    const ProblemSystem sys = s % 2 == 0 ? random_graph(rng, n) : random_submersion(rng, n, n);
    const auto z = random_point(rng, n);
    const double m = m_value(sys, z);
    const double brute = brute_force_m(bbar_matrix(sys, z), 10000, rng);
    worst = std::max(worst, std::fabs(brute - m) / std::max(1.0, m));
    undershoot = std::max(undershoot, m - brute);
  }
  return {worst <= 1e-3 && undershoot <= 1e-9,
          fmt("50 systems n <= 3, max rel diff %.3g (tol 1e-3), max m-brute %.3g (tol 1e-9)", worst,
              undershoot)};
}

// ---- criterion 5: numerical radius ----

Outcome criterion_numerical_radius() {
  CMatrix jordan(2, 2);
  jordan << 0, 1, 0, 0;
  const double wj = numerical_radius(jordan);
  bool ok = std::fabs(wj - 0.5) <= 1e-9;
  Rng rng(105);
  double herm_err = 0.0, bracket_violation = 0.0;
  for (int s = 0; s < 100; ++s) {
    const int n = uniform_int(rng, 1, 4);
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = random_cplx(rng, 2.0);
    const CMatrix herm = 0.5 * (a + a.adjoint());
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
    herm_err = std::max(herm_err, std::fabs(numerical_radius(herm) - es.eigenvalues().cwiseAbs().maxCoeff()));
    const double norm2 = Eigen::JacobiSVD<CMatrix>(a).singularValues()(0);
    const double w = numerical_radius(a);
    bracket_violation = std::max({bracket_violation, norm2 / 2 - w, w - norm2});
  }
  ok = ok && herm_err <= 1e-8 && bracket_violation <= 1e-8;
  return {ok, fmt("w([[0,1],[0,0]]) = %.12g, Hermitian max err %.3g (tol 1e-8), "
                  "||M||/2 <= w <= ||M|| worst violation %.3g over 100 matrices",
                  wj, herm_err, bracket_violation)};
}

// ---- criterion 6: Wermer certificates and report ----

Outcome criterion_wermer_certify() {
  const ProblemSystem sys = wermer_example();
  const auto t0 = Clock::now();
  const CompactSpec k03 = CompactSpec::graph_polydisc({0.0}, {0.3});
  const Certificate c03 = certify(sys, k03, suggest_omega(sys, k03, 0.05));
  const double t = seconds_since(t0);
  bool ok = c03.verdict == Verdict::Pass && t <= 60.0 && replay(sys, c03);

  const CompactSpec k1 = CompactSpec::graph_polydisc({0.0}, {1.0});
  const Certificate c1 = certify(sys, k1, suggest_omega(sys, k1, 0.05));
  bool witness_ok = false;
  if (c1.verdict == Verdict::Fail && c1.witness) {
    const Witness& wt = *c1.witness;
    // Independent re-check: the witness point lies outside the tube.
    const cplx z[] = {wt.z[0]};
    const double dist = std::abs(wt.w[0] - eval_point(wermer_f(), z));
    witness_ok = c1.failed_check != "omega_in_tube" || dist >= tube_radius(sys, z) * (1 - 1e-9);
  }
  ok = ok && witness_ok;

  const Json a = reproduce_example("wermer");
  const Json b = reproduce_example("wermer");
  const double inf_m = parse_double(a["disc_bounds"]["inf_m_sampled"]);
  const double sup_l = parse_double(a["disc_bounds"]["sup_L_sampled"]);
  const double published_m = parse_double(a["published_constants"]["inf_m"]);
  const double published_l = parse_double(a["published_constants"]["sup_L"]);
  const double rmax = parse_double(a["max_certifiable_r"]["value"]);
  const bool stable = a["max_certifiable_r"] == b["max_certifiable_r"];
  ok = ok && std::fabs(inf_m - 5.0 / 9.0) <= 1e-9 && published_m == 1.0 &&
       std::fabs(sup_l - 2 * std::sqrt(2.0) / std::sqrt(3.0)) <= 1e-9 && rmax >= 0.3 && stable;
  return {ok, fmt("r=0.3 %s in %.2f s (limit 60 s), r=1 %s (%s, witness %s); "
                  "inf m %.6g vs published %.6g, sup L %.6g vs published %.6g; max r %.6g (stable: %s)",
                  to_string(c03.verdict).c_str(), t, to_string(c1.verdict).c_str(),
                  c1.failed_check.c_str(), witness_ok ? "verified" : "missing", inf_m, published_m,
                  sup_l, published_l, rmax, stable ? "yes" : "no")};
}

// ---- criterion 7: graph over R^2 ----

Outcome criterion_graph_over_r2() {
  const auto t0 = Clock::now();
  const ProblemSystem sys = graph_over_r2_example(0.05, 0.05);
  const CompactSpec cap = CompactSpec::submersion_cap({0.0, 0.0}, {1.0, 1.0});
  const Certificate cert = certify(sys, cap, suggest_omega(sys, cap, 0.04));
  ParamBox unit;
  unit.z.assign(4, Interval(-1.0, 1.0));
  const BoundReport s = survey_bounds(sys, unit, 3);
  const double t = seconds_since(t0);
  const bool ok = cert.verdict == Verdict::Pass && replay(sys, cert) && s.big_l_upper <= 0.2 &&
                  s.m_lower >= 0.2 && t <= 120.0;
  return {ok, fmt("c=d=0.05 epsilon=0.04 %s; unit box depth 3: L_upper %.4g (<= 0.2), "
                  "m_lower %.4g (>= 0.2); %.2f s (limit 120 s)",
                  to_string(cert.verdict).c_str(), s.big_l_upper, s.m_lower, t)};
}

// ---- criterion 8: hull probe ----

SampleCloud circle_cloud(int count) {
  SampleCloud c;
  for (int t = 0; t < count; ++t) c.points.push_back({std::polar(1.0, 2 * std::numbers::pi * t / count)});
  return c;
}

Outcome criterion_hull_probe() {
  const SampleCloud cloud =
      sample_compact(wermer_system(), CompactSpec::graph_polydisc({0.0}, {1.0}), 40);
  bool ok = cloud.points.size() >= 1000;
  const std::vector<cplx> origin{0.0, 0.0}, high{0.0, 2.0};
  double worst_origin = 0.0;
  for (int d = 1; d <= 6; ++d) {
    const auto r = probe(cloud, origin, {d, 16, 0.05});
    ok = ok && !r.separated;
    worst_origin = std::max(worst_origin, r.ratio);
  }
  double best_high = 0.0;
  int sep_degree = 0;
  for (int d = 1; d <= 2 && sep_degree == 0; ++d) {
    const auto r = probe(cloud, high, {d, 16, 0.05});
    best_high = std::max(best_high, r.ratio);
    if (r.separated && r.ratio >= 1.5) sep_degree = d;
  }
  ok = ok && sep_degree > 0;
  const SampleCloud circ = circle_cloud(360);
  bool circle_ok = true;
  for (int d = 1; d <= 8; ++d) circle_ok = circle_ok && !probe(circ, std::vector<cplx>{0.0}, {d, 16, 0.05}).separated;
  ok = ok && circle_ok;
  return {ok, fmt("cloud %zu points; (0,0) degrees 1-6 max ratio %.4g, not separated; "
                  "(0,2) separated at degree %d ratio %.4g; circle q=0 degrees 1-8 %s",
                  cloud.points.size(), worst_origin, sep_degree, best_high,
                  circle_ok ? "not separated" : "separated")};
}

// ---- criterion 9: soundness of interval bounds and replay ----

std::vector<cplx> sample_in(Rng& rng, const std::vector<Interval>& v) {
  std::vector<cplx> p(v.size() / 2);
  for (std::size_t j = 0; j < p.size(); ++j)
    p[j] = cplx(uniform(rng, v[2 * j].lo, v[2 * j].hi), uniform(rng, v[2 * j + 1].lo, v[2 * j + 1].hi));
  return p;
}

Outcome criterion_soundness() {
  Rng rng(109);
  long violations = 0, samples = 0;
  for (int s = 0; s < 100; ++s) {
    const int n = uniform_int(rng, 1, 2);
    const ProblemSystem sys = s % 2 == 0 ? random_graph(rng, n) : random_submersion(rng, n, n);
    ParamBox box;
    for (int a = 0; a < 2 * n; ++a) {
      const double c = uniform(rng, -1, 1), h = uniform(rng, 0, 0.3);
      box.z.emplace_back(c - h, c + h);
    }
    if (sys.kind() == ProblemKind::Graph)
      for (int a = 0; a < 2 * n; ++a) box.w.emplace_back(uniform(rng, -1, 0), uniform(rng, 0, 1));
    const BoundReport b = bound_box(sys, box);
    for (int k = 0; k < 10000; ++k, ++samples) {
      const auto z = sample_in(rng, box.z);
      const auto w = sample_in(rng, box.w);
      if (m_value(sys, z) < b.m_lower || big_l_value(sys, z) > b.big_l_upper ||
          residual(sys, z, w) > b.residual_upper)
        ++violations;
    }
  }
  // Every PASS certificate among a family of problems replays.
  int passes = 0, replayed = 0;
  const ProblemSystem w = wermer_example();
  for (double r : {0.05, 0.1, 0.2, 0.3}) {
    const CompactSpec k = CompactSpec::graph_polydisc({0.0}, {r});
    const Certificate c = certify(w, k, suggest_omega(w, k, 0.05));
    if (c.verdict != Verdict::Pass) continue;
    ++passes;
    replayed += replay(w, certificate_from_json(to_json(c))) ? 1 : 0;
  }
  const ProblemSystem e2 = graph_over_r2_example(0.05, 0.05);
  for (double eps : {0.01, 0.04}) {
    const CompactSpec cap = CompactSpec::submersion_cap({0.0, 0.0}, {1.0, 1.0});
    const Certificate c = certify(e2, cap, suggest_omega(e2, cap, eps));
    if (c.verdict != Verdict::Pass) continue;
    ++passes;
    replayed += replay(e2, certificate_from_json(to_json(c))) ? 1 : 0;
  }
  return {violations == 0 && passes > 0 && replayed == passes,
          fmt("%ld samples over 100 boxes, %ld bound violations; %d/%d PASS certificates replay",
              samples, violations, replayed, passes)};
}

// ---- criterion 10: reproduce output is byte-identical ----

Outcome criterion_determinism() {
  std::ostringstream a, b, ea, eb;
  const int ca = run_cli({"reproduce", "wermer"}, a, ea);
  const int cb = run_cli({"reproduce", "wermer", "--threads", "1"}, b, eb);
  const bool ok = ca == kExitOk && cb == kExitOk && !a.str().empty() && a.str() == b.str();
  return {ok, fmt("two runs of reproduce wermer: %zu and %zu bytes, %s", a.str().size(),
                  b.str().size(), a.str() == b.str() ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"Wirtinger derivatives vs finite differences", criterion_derivatives},
      {"Wermer closed forms", criterion_wermer_closed_forms},
      {"Levi form identity for u", criterion_levi_identity},
      {"m vs brute-force minimization", criterion_m_brute_force},
      {"numerical radius", criterion_numerical_radius},
      {"Wermer certification", criterion_wermer_certify},
      {"graph over R^2 certification", criterion_graph_over_r2},
      {"hull probe", criterion_hull_probe},
      {"interval soundness and replay", criterion_soundness},
      {"reproduce determinism", criterion_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
