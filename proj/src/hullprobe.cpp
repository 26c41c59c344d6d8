#include "prc/hullprobe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace prc {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr int kDegenerateRun = 50;
constexpr int kMaxIterations = 200000;
constexpr std::size_t kMaxSamples = 200000;

// Revised simplex for min costᵀy, M y = rhs, y ≥ 0 with a fresh LU of the
// basis each iteration (the basis is small; the column count is not).
class RevisedSimplex {
 public:
  RevisedSimplex(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, std::vector<int> basis)
      : m_(m), rhs_(rhs), basis_(std::move(basis)) {}

  // Returns false when unbounded below. Only columns < limit may enter.
  bool run(const Eigen::VectorXd& cost, int limit) {
    int degenerate = 0;
    bool bland = false;
    while (true) {
      factor(cost);
      const Eigen::VectorXd reduced =
          cost.head(limit) - m_.leftCols(limit).transpose() * pi_;
      int enter = -1;
      double best = -kPivotTol;
      for (int j = 0; j < limit; ++j) {
        if (reduced(j) < best) {
          enter = j;
          if (bland) break;
          best = reduced(j);
        }
      }
      if (enter < 0) return true;
      const Eigen::VectorXd u = lu_.solve(m_.col(enter));
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < u.size(); ++r) {
        if (u(r) <= kPivotTol) continue;
        const double q = std::max(0.0, x_(r)) / u(r);
        const auto rr = static_cast<std::size_t>(r);
        if (q < ratio - 1e-12 ||
            (q <= ratio + 1e-12 && leave >= 0 && basis_[rr] < basis_[static_cast<std::size_t>(leave)])) {
          ratio = std::min(ratio, q);
          leave = static_cast<int>(r);
        }
      }
      if (leave < 0) return false;
      degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
      if (degenerate >= kDegenerateRun) bland = true;
      basis_[static_cast<std::size_t>(leave)] = enter;
      if (++iterations_ > kMaxIterations) throw std::runtime_error("simplex iteration limit");
    }
  }

  // Swaps zero-level basic columns ≥ first_artificial for structural ones.
  void drive_out(int first_artificial) {
    factor(Eigen::VectorXd::Zero(m_.cols()));
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      if (basis_[r] < first_artificial) continue;
      Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_.size()));
      e(static_cast<Eigen::Index>(r)) = 1.0;
      const Eigen::VectorXd row =
          m_.leftCols(first_artificial).transpose() * lu_t_.solve(e);
      Eigen::Index j = 0;
      if (row.cwiseAbs().maxCoeff(&j) > 1e-7) {
        basis_[r] = static_cast<int>(j);
        factor(Eigen::VectorXd::Zero(m_.cols()));
      }
    }
  }

  double objective(const Eigen::VectorXd& cost) {
    factor(cost);
    double v = 0.0;
    for (std::size_t r = 0; r < basis_.size(); ++r)
      v += cost(basis_[r]) * x_(static_cast<Eigen::Index>(r));
    return v;
  }
  const Eigen::VectorXd& multipliers() const { return pi_; }
  int iterations() const { return iterations_; }

 private:
  void factor(const Eigen::VectorXd& cost) {
    const auto n = static_cast<Eigen::Index>(basis_.size());
    Eigen::MatrixXd b(n, n);
    Eigen::VectorXd cb(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      b.col(r) = m_.col(basis_[static_cast<std::size_t>(r)]);
      cb(r) = cost(basis_[static_cast<std::size_t>(r)]);
    }
    lu_.compute(b);
    lu_t_.compute(b.transpose());
    x_ = lu_.solve(rhs_);
    pi_ = lu_t_.solve(cb);
  }

  const Eigen::MatrixXd& m_;
  const Eigen::VectorXd& rhs_;
  std::vector<int> basis_;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_, lu_t_;
  Eigen::VectorXd x_, pi_;
  int iterations_ = 0;
};

}  // namespace

namespace {

LpResult solve_dual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& c, double perturbation) {
  const auto m = a.rows(), nv = a.cols();

  // Dual rows are the primal variables; columns are constraints then artificials.
  Eigen::VectorXd sign(nv);
  Eigen::MatrixXd cols(nv, m + nv);
  cols.setZero();
  for (Eigen::Index i = 0; i < nv; ++i) {
    sign(i) = c(i) < 0 ? -1.0 : 1.0;
    cols.row(i).head(m) = sign(i) * a.col(i).transpose();
    cols(i, m + i) = 1.0;
  }
  // A small deterministic perturbation of the dual right-hand side (the
  // primal objective) keeps the zero-heavy rhs from stalling the simplex.
  Eigen::VectorXd rhs = sign.cwiseProduct(c);
  const double scale = perturbation * std::max(1.0, c.lpNorm<Eigen::Infinity>());
  for (Eigen::Index i = 0; i < nv; ++i)
    rhs(i) += scale * (1.0 + std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0));
  std::vector<int> basis(static_cast<std::size_t>(nv));
  for (Eigen::Index i = 0; i < nv; ++i) basis[static_cast<std::size_t>(i)] = static_cast<int>(m + i);
  RevisedSimplex simplex(cols, rhs, basis);

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(m + nv);
  phase1.tail(nv).setOnes();
  simplex.run(phase1, static_cast<int>(m + nv));

  LpResult res;
  if (simplex.objective(phase1) > 1e-9 * std::max(1.0, c.lpNorm<1>())) {
    // Farkas: the phase-one multipliers give A r ≤ 0 with cᵀr > 0.
    res.x = sign.cwiseProduct(simplex.multipliers());
    res.status = LpStatus::Unbounded;
    res.objective = std::numeric_limits<double>::infinity();
    res.iterations = simplex.iterations();
    return res;
  }
  simplex.drive_out(static_cast<int>(m));

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(m + nv);
  phase2.head(m) = b;
  const bool bounded = simplex.run(phase2, static_cast<int>(m));
  res.iterations = simplex.iterations();
  if (!bounded) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  simplex.objective(phase2);
  res.x = sign.cwiseProduct(simplex.multipliers());
  res.status = LpStatus::Optimal;
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace

LpResult maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c) {
  if (b.size() != a.rows() || c.size() != a.cols())
    throw std::invalid_argument("maximize: dimension mismatch");
  LpResult res = solve_dual(a, b, c, 1e-7);
  // A ray of the perturbed problem need not improve c itself.
  if (res.status == LpStatus::Unbounded) res = solve_dual(a, b, c, 0.0);
  return res;
}

std::vector<std::vector<int>> monomial_exponents(int vars, int degree) {
  if (vars < 1 || degree < 0) throw std::invalid_argument("monomial_exponents: bad arguments");
  std::vector<std::vector<int>> out;
  std::vector<int> e(static_cast<std::size_t>(vars), 0);
  for (int total = 0; total <= degree; ++total) {
    // Compositions of `total` into `vars` parts, lexicographically descending.
    std::vector<std::vector<int>> level;
    auto rec = [&](auto&& self, int idx, int left) -> void {
      if (idx == vars - 1) {
        e[static_cast<std::size_t>(idx)] = left;
        level.push_back(e);
        return;
      }
      for (int v = left; v >= 0; --v) {
        e[static_cast<std::size_t>(idx)] = v;
        self(self, idx + 1, left - v);
      }
    };
    rec(rec, 0, total);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

namespace {

// Values of every monomial at a point, from per-variable power tables.
std::vector<cplx> monomial_values(const std::vector<std::vector<int>>& exps, int degree,
                                  std::span<const cplx> p) {
  std::vector<std::vector<cplx>> powers(p.size());
  for (std::size_t v = 0; v < p.size(); ++v) {
    powers[v].assign(static_cast<std::size_t>(degree) + 1, 1.0);
    for (int k = 1; k <= degree; ++k)
      powers[v][static_cast<std::size_t>(k)] = powers[v][static_cast<std::size_t>(k - 1)] * p[v];
  }
  std::vector<cplx> out;
  out.reserve(exps.size());
  for (const auto& e : exps) {
    cplx val = 1.0;
    for (std::size_t v = 0; v < e.size(); ++v) val *= powers[v][static_cast<std::size_t>(e[v])];
    out.push_back(val);
  }
  return out;
}

int max_degree(const std::vector<std::vector<int>>& exps) {
  int d = 0;
  for (const auto& e : exps) {
    int s = 0;
    for (int v : e) s += v;
    d = std::max(d, s);
  }
  return d;
}

double cloud_max_abs(const std::vector<std::vector<int>>& exps, const std::vector<cplx>& coeffs,
                     const SampleCloud& cloud) {
  double best = 0.0;
  for (const auto& s : cloud.points) best = std::max(best, std::abs(eval_polynomial(exps, coeffs, s)));
  return best;
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

std::vector<double> axis_values(const Interval& iv, int count) {
  if (iv.hi - iv.lo <= 0.0) return {iv.lo};
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(iv.lo + (iv.hi - iv.lo) * i / (count - 1));
  return v;
}

bool in_region(const ParamBox& region, std::span<const cplx> z) {
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (j < region.z_clip.size() && region.z_clip[j]) {
      const Disc& d = *region.z_clip[j];
      if (std::abs(z[j] - d.center) > d.radius * (1 + 1e-12)) return false;
    }
  }
  return true;
}

SampleCloud sample_graph(const ProblemSystem& sys, const CompactSpec& k, int density) {
  const auto& region = k.region;
  const int n = sys.n();
  int active = 0;
  for (const auto& iv : region.z) active += iv.hi > iv.lo;
  int per_axis = density;
  while (per_axis > 2 && std::pow(per_axis, active) > static_cast<double>(kMaxSamples)) --per_axis;

  std::vector<std::vector<double>> axes;
  for (const auto& iv : region.z) axes.push_back(axis_values(iv, per_axis));

  std::vector<std::vector<cplx>> zs;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (bool done = false; !done;) {
    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < z.size(); ++j)
      z[j] = cplx(axes[2 * j][idx[2 * j]], axes[2 * j + 1][idx[2 * j + 1]]);
    if (in_region(region, z)) zs.push_back(z);
    for (std::size_t a = axes.size();;) {
      if (a == 0) {
        done = true;
        break;
      }
      --a;
      if (++idx[a] < axes[a].size()) break;
      idx[a] = 0;
    }
  }
  if (n == 1 && !region.z_clip.empty() && region.z_clip[0]) {
    const Disc& d = *region.z_clip[0];
    const int ring = 4 * density;
    for (int t = 0; t < ring; ++t) {
      const cplx z = d.center + std::polar(d.radius, 2 * std::numbers::pi * t / ring);
      if (region.z[0].contains(z.real()) && region.z[1].contains(z.imag())) zs.push_back({z});
    }
  }

  SampleCloud cloud;
  for (const auto& z : zs) {
    std::vector<cplx> p = z;
    for (int nu = 0; nu < n; ++nu) p.push_back(eval_point(sys.table(nu).function(), z));
    cloud.points.push_back(std::move(p));
  }
  return cloud;
}

Eigen::VectorXd rho_values(const ProblemSystem& sys, std::span<const cplx> z) {
  Eigen::VectorXd r(sys.function_count());
  for (int l = 0; l < sys.function_count(); ++l) r(l) = eval_point(sys.table(l).function(), z).real();
  return r;
}

std::vector<cplx> to_complex(const Eigen::VectorXd& x) {
  std::vector<cplx> z(static_cast<std::size_t>(x.size() / 2));
  for (std::size_t j = 0; j < z.size(); ++j)
    z[j] = cplx(x(static_cast<Eigen::Index>(2 * j)), x(static_cast<Eigen::Index>(2 * j + 1)));
  return z;
}

// Damped Gauss–Newton with minimum-norm steps; nullopt if not converged.
std::optional<std::vector<cplx>> project(const ProblemSystem& sys, std::vector<cplx> z0) {
  const int n = sys.n(), rows = sys.function_count();
  Eigen::VectorXd x(2 * n);
  for (int j = 0; j < n; ++j) {
    x(2 * j) = z0[static_cast<std::size_t>(j)].real();
    x(2 * j + 1) = z0[static_cast<std::size_t>(j)].imag();
  }
  Eigen::VectorXd r = rho_values(sys, to_complex(x));
  for (int it = 0; it < 60 && r.lpNorm<Eigen::Infinity>() > 1e-13; ++it) {
    const auto z = to_complex(x);
    Eigen::MatrixXd jac(rows, 2 * n);
    for (int l = 0; l < rows; ++l)
      for (int j = 0; j < n; ++j) {
        const cplx d = eval_point(sys.table(l).dz(j), z);
        jac(l, 2 * j) = 2 * d.real();
        jac(l, 2 * j + 1) = -2 * d.imag();
      }
    const Eigen::VectorXd step = -jac.completeOrthogonalDecomposition().solve(r);
    double t = 1.0;
    bool moved = false;
    while (t > 1e-4) {
      const Eigen::VectorXd trial = x + t * step;
      const Eigen::VectorXd rt = rho_values(sys, to_complex(trial));
      if (rt.norm() < r.norm()) {
        x = trial;
        r = rt;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  if (!(r.lpNorm<Eigen::Infinity>() <= 1e-10)) return std::nullopt;
  return to_complex(x);
}

SampleCloud sample_submersion(const ProblemSystem& sys, const CompactSpec& k, int density,
                              std::uint64_t seed) {
  const int n = sys.n();
  double count = std::pow(density, sys.k());
  const auto seeds = static_cast<std::size_t>(std::min(count, static_cast<double>(kMaxSamples)));
  std::mt19937_64 rng(seed);
  SampleCloud cloud;
  cloud.seeds = seeds;
  for (std::size_t s = 0; s < seeds; ++s) {
    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const Disc& d = *k.region.z_clip[static_cast<std::size_t>(j)];
      const double rad = d.radius * std::sqrt(unit_uniform(rng));
      const double ang = 2 * std::numbers::pi * unit_uniform(rng);
      z[static_cast<std::size_t>(j)] = d.center + std::polar(rad, ang);
    }
    const auto p = project(sys, z);
    if (!p) continue;
    ++cloud.converged;
    if (!in_region(k.region, *p)) continue;
    cloud.max_defect = std::max(cloud.max_defect, rho_values(sys, *p).lpNorm<Eigen::Infinity>());
    cloud.points.push_back(*p);
  }
  if (2 * cloud.converged < seeds)
    throw SamplingError("Newton projection converged for " + std::to_string(cloud.converged) +
                        " of " + std::to_string(seeds) + " seeds");
  return cloud;
}

}  // namespace

cplx eval_polynomial(const std::vector<std::vector<int>>& exponents,
                     const std::vector<cplx>& coefficients, std::span<const cplx> point) {
  const auto vals = monomial_values(exponents, max_degree(exponents), point);
  cplx sum = 0.0;
  for (std::size_t a = 0; a < vals.size(); ++a) sum += coefficients[a] * vals[a];
  return sum;
}

SampleCloud sample_compact(const ProblemSystem& sys, const CompactSpec& k, int density,
                           std::uint64_t seed) {
  if (density < 2) throw InputError("density must be >= 2");
  if (sys.kind() != k.kind || sys.n() != k.n()) throw InputError("compact does not match the system");
  k.validate();
  SampleCloud cloud = sys.kind() == ProblemKind::Graph ? sample_graph(sys, k, density)
                                                       : sample_submersion(sys, k, density, seed);
  cloud.density = density;
  cloud.seed = seed;
  if (cloud.points.empty()) throw SamplingError("sample cloud is empty");
  return cloud;
}

SeparationResult probe(const SampleCloud& cloud, std::span<const cplx> q,
                       const ProbeOptions& opts) {
  if (opts.degree < 1) throw std::invalid_argument("probe: degree must be >= 1");
  if (opts.angles < 8) throw std::invalid_argument("probe: angles must be >= 8");
  if (!(opts.margin >= 0.0)) throw std::invalid_argument("probe: margin must be >= 0");
  if (cloud.points.empty()) throw std::invalid_argument("probe: empty cloud");
  const std::size_t dim = cloud.dimension();
  if (q.size() != dim) throw std::invalid_argument("probe: point dimension mismatch");
  for (const auto& s : cloud.points)
    if (s.size() != dim) throw std::invalid_argument("probe: ragged cloud");

  SeparationResult res;
  res.degree = opts.degree;
  res.angles = opts.angles;
  res.margin = opts.margin;
  res.cloud_size = cloud.points.size();
  res.exponents = monomial_exponents(static_cast<int>(dim), opts.degree);
  const auto nm = static_cast<Eigen::Index>(res.exponents.size());
  const int g = opts.angles;

  // Rows Re(e^{iφ_a} p(s)) ≤ 1 in the variables (Re c_α, Im c_α).
  Eigen::MatrixXd a(static_cast<Eigen::Index>(cloud.points.size()) * g, 2 * nm);
  std::vector<cplx> rot(static_cast<std::size_t>(g));
  for (int k = 0; k < g; ++k) rot[static_cast<std::size_t>(k)] = std::polar(1.0, 2 * std::numbers::pi * k / g);
  Eigen::Index row = 0;
  for (const auto& s : cloud.points) {
    const auto vals = monomial_values(res.exponents, opts.degree, s);
    for (int k = 0; k < g; ++k, ++row)
      for (Eigen::Index al = 0; al < nm; ++al) {
        const cplx t = rot[static_cast<std::size_t>(k)] * vals[static_cast<std::size_t>(al)];
        a(row, al) = t.real();
        a(row, nm + al) = -t.imag();
      }
  }
  // The feasible set is invariant under p → e^{2πi/g} p, so φ₀ = 0 attains
  // the best value over the φ₀-grid.
  const auto vq = monomial_values(res.exponents, opts.degree, q);
  Eigen::VectorXd c(2 * nm);
  for (Eigen::Index al = 0; al < nm; ++al) {
    c(al) = vq[static_cast<std::size_t>(al)].real();
    c(nm + al) = -vq[static_cast<std::size_t>(al)].imag();
  }
  const LpResult lp = maximize(a, Eigen::VectorXd::Ones(a.rows()), c);
  if (lp.status == LpStatus::Infeasible) throw std::logic_error("probe: LP reported infeasible");
  res.lp_iterations = lp.iterations;

  Eigen::VectorXd x = lp.x;
  if (lp.status == LpStatus::Unbounded) {
    x /= x.lpNorm<Eigen::Infinity>();
    res.unbounded = true;
  } else {
    // Guard against round-off in the multipliers: rescale into feasibility.
    const double worst = (a * x).maxCoeff();
    if (worst > 1.0) x /= worst;
  }
  for (Eigen::Index al = 0; al < nm; ++al) res.coefficients.emplace_back(x(al), x(nm + al));
  res.value_at_q = eval_polynomial(res.exponents, res.coefficients, q);
  res.cloud_max = cloud_max_abs(res.exponents, res.coefficients, cloud);
  res.threshold = (1.0 + opts.margin) / std::cos(std::numbers::pi / g);
  if (res.unbounded) {
    res.objective = std::numeric_limits<double>::infinity();
    const double pq = std::abs(res.value_at_q);
    res.ratio = res.cloud_max <= 1e-9 * pq ? std::numeric_limits<double>::infinity()
                                           : pq / res.cloud_max;
    res.separated = res.ratio > 1.0 + opts.margin;
  } else {
    res.objective = res.value_at_q.real();
    res.ratio = res.cloud_max > 0 ? std::abs(res.value_at_q) / res.cloud_max
                                  : (std::abs(res.value_at_q) > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    res.separated = res.objective > res.threshold;
  }
  return res;
}

void check_fragility(SeparationResult& result, const SampleCloud& dense, std::span<const cplx> q) {
  const double cm = cloud_max_abs(result.exponents, result.coefficients, dense);
  const double pq = std::abs(eval_polynomial(result.exponents, result.coefficients, q));
  result.dense_ratio = cm > 0 ? pq / cm : std::numeric_limits<double>::infinity();
  result.fragile = !(*result.dense_ratio > 1.0);
}

Json to_json(const SeparationResult& r) {
  Json poly = Json::array();
  for (std::size_t a = 0; a < r.coefficients.size(); ++a) {
    if (r.coefficients[a] == cplx(0.0)) continue;
    poly.push_back(Json{{"exponent", r.exponents[a]},
                        {"coefficient",
                         Json::array({format_double(r.coefficients[a].real()),
                                      format_double(r.coefficients[a].imag())})}});
  }
  Json j{{"label", "EVIDENCE"},
         {"separated", r.separated},
         {"unbounded", r.unbounded},
         {"degree", r.degree},
         {"angles", r.angles},
         {"margin", format_double(r.margin)},
         {"objective", format_double(r.objective)},
         {"threshold", format_double(r.threshold)},
         {"value_at_q",
          Json::array({format_double(r.value_at_q.real()), format_double(r.value_at_q.imag())})},
         {"cloud_max", format_double(r.cloud_max)},
         {"ratio", format_double(r.ratio)},
         {"cloud_size", r.cloud_size},
         {"lp_iterations", r.lp_iterations},
         {"polynomial", poly}};
  if (r.dense_ratio) j["dense_ratio"] = format_double(*r.dense_ratio);
  if (r.fragile) j["fragile"] = *r.fragile;
  return j;
}

}  // namespace prc
