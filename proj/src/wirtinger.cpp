#include "prc/wirtinger.hpp"

#include <stdexcept>

namespace prc {

WirtingerTable::WirtingerTable(NormalExpr e, int n) : n_(n), f_(std::move(e)) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (f_.expr().arity() > n)
    throw std::invalid_argument("expression references a variable beyond z" +
                                std::to_string(n));
  dz_.reserve(static_cast<std::size_t>(n));
  dzbar_.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    dz_.push_back(diff_z(f_, j));
    dzbar_.push_back(diff_zbar(f_, j));
  }
  levi_.reserve(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      levi_.push_back(diff_z(dzbar_[static_cast<std::size_t>(k)], j));
}

WirtingerFrame WirtingerTable::frame(std::span<const cplx> z) const {
  if (z.size() != static_cast<std::size_t>(n_))
    throw std::invalid_argument("point dimension does not match table");
  WirtingerFrame fr;
  fr.value = eval_point(f_, z);
  fr.grad_z.resize(n_);
  fr.grad_zbar.resize(n_);
  fr.levi.resize(n_, n_);
  for (int j = 0; j < n_; ++j) {
    fr.grad_z(j) = eval_point(dz(j), z);
    fr.grad_zbar(j) = eval_point(dzbar(j), z);
    for (int k = 0; k < n_; ++k) fr.levi(j, k) = eval_point(levi(j, k), z);
  }
  return fr;
}

WirtingerFrame frame(const NormalExpr& e, std::span<const cplx> z) {
  return WirtingerTable(e, static_cast<int>(z.size())).frame(z);
}

cplx levi_form(const WirtingerFrame& fr, const CVector& v) {
  if (v.size() != fr.levi.rows())
    throw std::invalid_argument("levi_form: direction has wrong dimension");
  // v^T M conj(v)
  return v.transpose() * fr.levi * v.conjugate();
}

namespace {

// Central differences in the 2n real coordinates of a complex function.
struct RealJet {
  std::vector<cplx> d1;                 // ∂/∂t_a
  std::vector<std::vector<cplx>> d2;    // ∂²/∂t_a∂t_b
};

RealJet real_jet(const NormalExpr& e, std::span<const cplx> z, double h) {
  const std::size_t n = z.size();
  const std::size_t m = 2 * n;
  std::vector<cplx> p(z.begin(), z.end());
  auto shifted = [&](std::size_t a, double da, std::size_t b, double db) {
    std::vector<cplx> q = p;
    auto bump = [&](std::size_t t, double d) {
      if (d == 0.0) return;
      q[t / 2] += (t % 2 == 0) ? cplx(d, 0.0) : cplx(0.0, d);
    };
    bump(a, da);
    bump(b, db);
    return eval_point(e, q);
  };
  RealJet jet;
  jet.d1.resize(m);
  jet.d2.assign(m, std::vector<cplx>(m));
  for (std::size_t a = 0; a < m; ++a)
    jet.d1[a] = (shifted(a, h, a, 0.0) - shifted(a, -h, a, 0.0)) / (2.0 * h);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) {
      const cplx v = (shifted(a, h, b, h) - shifted(a, h, b, -h) -
                      shifted(a, -h, b, h) + shifted(a, -h, b, -h)) /
                     (4.0 * h * h);
      jet.d2[a][b] = v;
      jet.d2[b][a] = v;
    }
  }
  return jet;
}

WirtingerFrame frame_from_jet(cplx value, const RealJet& jet, int n) {
  const cplx I(0.0, 1.0);
  WirtingerFrame fr;
  fr.value = value;
  fr.grad_z.resize(n);
  fr.grad_zbar.resize(n);
  fr.levi.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const cplx fx = jet.d1[2 * j], fy = jet.d1[2 * j + 1];
    fr.grad_z(j) = 0.5 * (fx - I * fy);
    fr.grad_zbar(j) = 0.5 * (fx + I * fy);
    for (int k = 0; k < n; ++k) {
      // ∂_{z_j}∂_{z̄_k} = ¼(∂x_j − i∂y_j)(∂x_k + i∂y_k)
      const cplx xx = jet.d2[2 * j][2 * k], xy = jet.d2[2 * j][2 * k + 1];
      const cplx yx = jet.d2[2 * j + 1][2 * k], yy = jet.d2[2 * j + 1][2 * k + 1];
      fr.levi(j, k) = 0.25 * (xx + I * xy - I * yx + yy);
    }
  }
  return fr;
}

}  // namespace

WirtingerFrame fd_frame(const NormalExpr& e, std::span<const cplx> z, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_frame: step must be positive");
  const int n = static_cast<int>(z.size());
  const cplx value = eval_point(e, z);
  const WirtingerFrame coarse = frame_from_jet(value, real_jet(e, z, h), n);
  const WirtingerFrame fine = frame_from_jet(value, real_jet(e, z, h / 2), n);
  // Richardson: (4 D(h/2) − D(h)) / 3 cancels the h² error term.
  WirtingerFrame fr;
  fr.value = value;
  fr.grad_z = (4.0 * fine.grad_z - coarse.grad_z) / 3.0;
  fr.grad_zbar = (4.0 * fine.grad_zbar - coarse.grad_zbar) / 3.0;
  fr.levi = (4.0 * fine.levi - coarse.levi) / 3.0;
  return fr;
}

}  // namespace prc
