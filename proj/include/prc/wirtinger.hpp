#ifndef PRC_WIRTINGER_HPP
#define PRC_WIRTINGER_HPP

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "prc/expr.hpp"

namespace prc {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Value, first Wirtinger derivatives and Levi matrix of a function at a
/// point. levi(j, k) = ∂²f / ∂z_j ∂z̄_k.
struct WirtingerFrame {
  cplx value{};
  CVector grad_z;
  CVector grad_zbar;
  CMatrix levi;
};

/// Symbolic derivative table of one function; build once, evaluate anywhere.
class WirtingerTable {
 public:
  WirtingerTable() = default;
  WirtingerTable(NormalExpr e, int n);

  int dimension() const { return n_; }
  const NormalExpr& function() const { return f_; }
  const NormalExpr& dz(int j) const { return dz_[static_cast<std::size_t>(j)]; }
  const NormalExpr& dzbar(int j) const {
    return dzbar_[static_cast<std::size_t>(j)];
  }
  const NormalExpr& levi(int j, int k) const {
    return levi_[static_cast<std::size_t>(j * n_ + k)];
  }

  WirtingerFrame frame(std::span<const cplx> z) const;

 private:
  int n_ = 0;
  NormalExpr f_;
  std::vector<NormalExpr> dz_;
  std::vector<NormalExpr> dzbar_;
  std::vector<NormalExpr> levi_;  // row-major n×n
};

WirtingerFrame frame(const NormalExpr& e, std::span<const cplx> z);

/// Σ_{j,k} levi(j,k) v_j conj(v_k). Throws std::invalid_argument on a
/// dimension mismatch.
cplx levi_form(const WirtingerFrame& fr, const CVector& v);

inline constexpr double kDefaultFdStep = 1e-4;

/// Finite-difference frame (central differences in x, y with one
/// Richardson step). Test oracle only.
WirtingerFrame fd_frame(const NormalExpr& e, std::span<const cplx> z,
                        double h = kDefaultFdStep);

}  // namespace prc

#endif  // PRC_WIRTINGER_HPP
