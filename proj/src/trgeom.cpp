#include "prc/trgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace prc {

std::string to_string(ProblemKind kind) {
  return kind == ProblemKind::Graph ? "graph" : "submersion";
}

namespace {

void check_real_valued(const std::vector<NormalExpr>& fs, int n) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int s = 0; s < 16; ++s) {
    for (auto& c : z) c = cplx(u(rng), u(rng));
    for (std::size_t l = 0; l < fs.size(); ++l) {
      const cplx v = eval_point(fs[l], z);
      if (std::fabs(v.imag()) > 1e-9 * (1.0 + std::abs(v)))
        throw std::invalid_argument("submersion function " +
                                    std::to_string(l + 1) +
                                    " is not real-valued");
    }
  }
}

}  // namespace

ProblemSystem::ProblemSystem(ProblemKind kind, int n, int k,
                             std::vector<Expr> functions)
    : kind_(kind), n_(n), k_(k), source_(std::move(functions)) {
  if (n < 1) throw std::invalid_argument("dimension n must be >= 1");
  std::vector<NormalExpr> normal;
  normal.reserve(source_.size());
  for (const auto& f : source_) {
    if (f.arity() > n)
      throw std::invalid_argument("function references a variable beyond z" +
                                  std::to_string(n));
    normal.push_back(normalize(f));
  }
  if (kind == ProblemKind::Submersion) check_real_valued(normal, n);

  const int rows = static_cast<int>(normal.size());
  tables_.reserve(normal.size());
  for (const auto& f : normal) tables_.emplace_back(f, n);
  for (int r = 0; r < rows; ++r) {
    const auto& t = tables_[static_cast<std::size_t>(r)];
    value_poly_.push_back(RealPoly::expand(t.function(), n));
    for (int j = 0; j < n; ++j) dzbar_poly_.push_back(RealPoly::expand(t.dzbar(j), n));
    for (int j = 0; j < n; ++j)
      for (int kk = 0; kk < n; ++kk)
        levi_poly_.push_back(RealPoly::expand(t.levi(j, kk), n));
  }

  Expr u = Expr::constant(0.0);
  if (kind == ProblemKind::Graph) {
    for (int nu = 0; nu < n; ++nu) {
      const Expr g = Expr::sub(Expr::var(n + nu), source_[static_cast<std::size_t>(nu)]);
      const Expr term = Expr::mul(g, Expr::conj(g));
      u = nu == 0 ? term : Expr::add(u, term);
    }
    u_table_ = WirtingerTable(normalize(u), 2 * n);
  } else {
    for (int l = 0; l < rows; ++l) {
      const Expr& rho = source_[static_cast<std::size_t>(l)];
      const Expr term = Expr::mul(rho, rho);
      u = l == 0 ? term : Expr::add(u, term);
    }
    u_table_ = WirtingerTable(normalize(u), n);
  }
}

ProblemSystem ProblemSystem::graph(const std::vector<Expr>& functions, int n) {
  if (static_cast<int>(functions.size()) != n)
    throw std::invalid_argument("graph system needs exactly n functions");
  return ProblemSystem(ProblemKind::Graph, n, n, functions);
}

ProblemSystem ProblemSystem::submersion(const std::vector<Expr>& functions,
                                        int n, int k) {
  if (k < 1 || k > n)
    throw std::invalid_argument("submersion needs 1 <= k <= n");
  if (static_cast<int>(functions.size()) != 2 * n - k)
    throw std::invalid_argument("submersion system needs exactly 2n-k functions");
  return ProblemSystem(ProblemKind::Submersion, n, k, functions);
}

ProblemSystem ProblemSystem::scaled(double c) const {
  std::vector<Expr> fs;
  fs.reserve(source_.size());
  for (const auto& f : source_) fs.push_back(Expr::mul(Expr::constant(c), f));
  return ProblemSystem(kind_, n_, k_, std::move(fs));
}

// ---------------------------------------------------------------------------

CMatrix bbar_matrix(const ProblemSystem& sys, std::span<const cplx> z) {
  if (z.size() != static_cast<std::size_t>(sys.n()))
    throw std::invalid_argument("point dimension does not match system");
  const int rows = sys.function_count();
  CMatrix b(rows, sys.n());
  for (int r = 0; r < rows; ++r)
    for (int j = 0; j < sys.n(); ++j) b(r, j) = eval_point(sys.table(r).dzbar(j), z);
  return b;
}

namespace {

Eigen::VectorXd singular_values(const CMatrix& b) {
  Eigen::JacobiSVD<CMatrix> svd(b);
  return svd.singularValues();
}

double sigma_min_of(const CMatrix& b) {
  const Eigen::VectorXd s = singular_values(b);
  if (b.rows() < b.cols()) return 0.0;
  return s(s.size() - 1);
}

double lambda_max_rotated(const CMatrix& m, double theta) {
  const cplx e = std::polar(1.0, theta);
  if (m.rows() == 2) {
    const double a = (e * m(0, 0)).real(), d = (e * m(1, 1)).real();
    const cplx b = 0.5 * (e * m(0, 1) + std::conj(e * m(1, 0)));
    return 0.5 * (a + d) + std::hypot(0.5 * (a - d), std::abs(b));
  }
  const CMatrix h = 0.5 * (e * m + std::conj(e) * m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

double m_value(const ProblemSystem& sys, std::span<const cplx> z) {
  const double s = sigma_min_of(bbar_matrix(sys, z));
  return s * s;
}

double numerical_radius(const CMatrix& m, double tol) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("numerical_radius expects a square matrix");
  if (!m.allFinite()) throw std::domain_error("numerical_radius: non-finite entry");
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1) return std::abs(m(0, 0));
  const double norm = m.norm();
  if (norm == 0.0) return 0.0;
  if ((m - m.adjoint()).norm() <= 1e-14 * norm) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()),
                                              Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }

  constexpr int kGrid = 512;
  const double step = 2.0 * std::numbers::pi / kGrid;
  std::vector<double> values(kGrid);
  for (int i = 0; i < kGrid; ++i) values[i] = lambda_max_rotated(m, i * step);

  // Refine the strongest local maxima of the grid by golden-section search.
  std::vector<int> peaks;
  for (int i = 0; i < kGrid; ++i) {
    const double prev = values[(i + kGrid - 1) % kGrid];
    const double next = values[(i + 1) % kGrid];
    if (values[i] >= prev && values[i] >= next) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(),
            [&](int a, int b) { return values[a] > values[b]; });
  if (peaks.size() > 4) peaks.resize(4);

  double best = *std::max_element(values.begin(), values.end());
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double angle_tol = std::max(1e-12, std::min(1e-6, std::sqrt(tol) * 1e-2));
  for (int p : peaks) {
    double a = (p - 1) * step, b = (p + 1) * step;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = lambda_max_rotated(m, c), fd = lambda_max_rotated(m, d);
    while (b - a > angle_tol) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = lambda_max_rotated(m, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = lambda_max_rotated(m, d);
      }
    }
    best = std::max({best, fc, fd});
  }
  return best;
}

double big_l_value(const ProblemSystem& sys, std::span<const cplx> z) {
  double best = 0.0;
  for (int r = 0; r < sys.function_count(); ++r) {
    const CMatrix levi = sys.table(r).frame(z).levi;
    double value = 0.0;
    if (sys.kind() == ProblemKind::Graph) {
      value = numerical_radius(levi);
    } else {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (levi + levi.adjoint()),
                                                Eigen::EigenvaluesOnly);
      value = es.eigenvalues().cwiseAbs().maxCoeff();
    }
    best = std::max(best, value);
  }
  return best;
}

GraphRealityReport is_totally_real_graph(const ProblemSystem& sys,
                                         std::span<const cplx> z, double tol) {
  if (sys.kind() != ProblemKind::Graph)
    throw std::invalid_argument("is_totally_real_graph expects a graph system");
  const CMatrix b = bbar_matrix(sys, z);
  Eigen::JacobiSVD<CMatrix> svd(b, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  GraphRealityReport report;
  report.sigma_min = s(s.size() - 1);
  if (tol < 0.0) tol = 1e-8 * (1.0 + s(0));
  report.totally_real = report.sigma_min > tol;
  if (!report.totally_real) report.witness_v = CVector(svd.matrixV().col(b.cols() - 1));
  return report;
}

SubmersionRealityReport is_totally_real_submersion(const ProblemSystem& sys,
                                                   std::span<const cplx> z,
                                                   double tol) {
  if (sys.kind() != ProblemKind::Submersion)
    throw std::invalid_argument(
        "is_totally_real_submersion expects a submersion system");
  const CMatrix b = bbar_matrix(sys, z);
  const int rows = static_cast<int>(b.rows());
  const int n = sys.n();

  // Real Jacobian of real ρ: ∂ρ/∂x_j = 2 Re ∂ρ/∂z̄_j, ∂ρ/∂y_j = 2 Im ∂ρ/∂z̄_j.
  Eigen::MatrixXd jac(rows, 2 * n);
  for (int r = 0; r < rows; ++r)
    for (int j = 0; j < n; ++j) {
      jac(r, 2 * j) = 2.0 * b(r, j).real();
      jac(r, 2 * j + 1) = 2.0 * b(r, j).imag();
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> jsvd(jac);
  const Eigen::VectorXd js = jsvd.singularValues();
  const double jthresh = 1e-10 * (1.0 + js(0));
  if (js(0) == 0.0 || js(js.size() - 1) <= jthresh)
    throw NotSubmersion("defining functions are not a submersion at this point");

  const Eigen::VectorXd s = singular_values(b);
  SubmersionRealityReport report;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++report.rank;
  report.sigma_min = s(s.size() - 1);
  report.totally_real = report.rank == n;
  return report;
}

double tube_radius(const ProblemSystem& sys, std::span<const cplx> z) {
  const double m = m_value(sys, z);
  if (m <= 0.0) return 0.0;
  const double big_l = big_l_value(sys, z);
  if (big_l == 0.0) return std::numeric_limits<double>::infinity();
  return m / (sys.radius_factor() * big_l);
}

TubeProfile tube_profile(const ProblemSystem& sys,
                         const std::vector<std::vector<cplx>>& points) {
  TubeProfile profile;
  profile.reserve(points.size());
  for (const auto& z : points) {
    TubeSample s;
    s.z = z;
    s.m = m_value(sys, z);
    s.big_l = big_l_value(sys, z);
    s.radius = s.m <= 0.0 ? 0.0
               : s.big_l == 0.0
                   ? std::numeric_limits<double>::infinity()
                   : s.m / (sys.radius_factor() * s.big_l);
    profile.push_back(std::move(s));
  }
  return profile;
}

double residual(const ProblemSystem& sys, std::span<const cplx> z,
                std::span<const cplx> w) {
  double sum = 0.0;
  if (sys.kind() == ProblemKind::Graph) {
    if (w.size() != static_cast<std::size_t>(sys.n()))
      throw std::invalid_argument("graph residual needs a w point of dimension n");
    for (int nu = 0; nu < sys.n(); ++nu)
      sum += std::abs(eval_point(sys.table(nu).function(), z) -
                      w[static_cast<std::size_t>(nu)]);
  } else {
    for (int l = 0; l < sys.function_count(); ++l)
      sum += std::abs(eval_point(sys.table(l).function(), z));
  }
  return sum;
}

LeviIdentity levi_u_graph(const ProblemSystem& sys, std::span<const cplx> z,
                          std::span<const cplx> w, const CVector& v,
                          const CVector& t) {
  if (sys.kind() != ProblemKind::Graph)
    throw std::invalid_argument("levi_u_graph expects a graph system");
  const int n = sys.n();
  if (static_cast<int>(z.size()) != n || static_cast<int>(w.size()) != n ||
      v.size() != n || t.size() != n)
    throw std::invalid_argument("levi_u_graph: dimension mismatch");

  std::vector<cplx> zw(z.begin(), z.end());
  zw.insert(zw.end(), w.begin(), w.end());
  CVector big_v(2 * n);
  big_v << v, t;

  LeviIdentity out;
  out.direct = levi_form(sys.u_table().frame(zw), big_v).real();

  double residual_term = 0.0, holo_term = 0.0, anti_term = 0.0, penalty = 0.0;
  for (int nu = 0; nu < n; ++nu) {
    const WirtingerFrame fr = sys.table(nu).frame(z);
    const cplx lf = levi_form(fr, v);
    const cplx gap = fr.value - w[static_cast<std::size_t>(nu)];
    residual_term += 2.0 * (std::conj(gap) * lf).real();
    holo_term += std::norm((fr.grad_z.array() * v.array()).sum() - t(nu));
    anti_term += std::norm((fr.grad_zbar.array() * v.conjugate().array()).sum());
    penalty += 2.0 * std::abs(gap) * std::abs(lf);
  }
  out.expanded = residual_term + holo_term + anti_term;
  out.lower_bound = anti_term - penalty;
  return out;
}

LeviIdentity levi_u_submersion(const ProblemSystem& sys,
                               std::span<const cplx> z, const CVector& v) {
  if (sys.kind() != ProblemKind::Submersion)
    throw std::invalid_argument("levi_u_submersion expects a submersion system");
  const int n = sys.n();
  if (static_cast<int>(z.size()) != n || v.size() != n)
    throw std::invalid_argument("levi_u_submersion: dimension mismatch");

  LeviIdentity out;
  out.direct = levi_form(sys.u_table().frame(z), v).real();

  double residual_term = 0.0, grad_term = 0.0, penalty = 0.0;
  for (int l = 0; l < sys.function_count(); ++l) {
    const WirtingerFrame fr = sys.table(l).frame(z);
    const cplx lf = levi_form(fr, v);
    const double rho = fr.value.real();
    residual_term += 2.0 * rho * lf.real();
    // Σ_j ∂ρ/∂z̄_j conj(v_j)
    grad_term += 2.0 * std::norm((fr.grad_zbar.array() * v.conjugate().array()).sum());
    penalty += 2.0 * std::fabs(rho) * std::abs(lf);
  }
  out.expanded = residual_term + grad_term;
  out.lower_bound = grad_term - penalty;
  return out;
}

}  // namespace prc
