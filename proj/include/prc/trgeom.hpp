#ifndef PRC_TRGEOM_HPP
#define PRC_TRGEOM_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "prc/expr.hpp"
#include "prc/wirtinger.hpp"

namespace prc {

enum class ProblemKind { Graph, Submersion };

std::string to_string(ProblemKind kind);

/// Raised when the defining functions of a level set do not form a
/// submersion at the point being examined.
class NotSubmersion : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Defining data of a totally-real submanifold.
///
/// Graph: n complex functions f^1..f^n of z ∈ ℂⁿ; the manifold is
/// {(z, F(z))} ⊂ ℂ²ⁿ. Submersion: 2n−k real-valued functions ρ_l of z ∈ ℂⁿ;
/// the manifold is ρ⁻¹(0), of real dimension k.
///
/// Immutable after construction; safe to share between threads.
class ProblemSystem {
 public:
  static ProblemSystem graph(const std::vector<Expr>& functions, int n);
  /// Throws std::invalid_argument if a function is not real-valued on
  /// random samples or the function count is not 2n−k.
  static ProblemSystem submersion(const std::vector<Expr>& functions, int n,
                                  int k);

  ProblemKind kind() const { return kind_; }
  int n() const { return n_; }
  int k() const { return k_; }  // manifold real dimension (submersion only)
  int function_count() const { return static_cast<int>(tables_.size()); }
  const std::vector<Expr>& source() const { return source_; }
  const WirtingerTable& table(int r) const {
    return tables_[static_cast<std::size_t>(r)];
  }

  // Real-coordinate polynomial forms used by the interval bounds.
  const RealPoly& value_poly(int r) const {
    return value_poly_[static_cast<std::size_t>(r)];
  }
  const RealPoly& dzbar_poly(int r, int j) const {
    return dzbar_poly_[static_cast<std::size_t>(r * n_ + j)];
  }
  const RealPoly& levi_poly(int r, int j, int k) const {
    return levi_poly_[static_cast<std::size_t>((r * n_ + j) * n_ + k)];
  }

  /// u = Σ|w_ν − f^ν(z)|² (graph, in 2n variables z then w) or Σρ_l².
  const WirtingerTable& u_table() const { return u_table_; }

  /// Radius denominator factor: 2 for graphs, 1 for submersions.
  double radius_factor() const { return kind_ == ProblemKind::Graph ? 2.0 : 1.0; }

  /// Returns a copy with every defining function multiplied by c.
  ProblemSystem scaled(double c) const;

 private:
  ProblemSystem(ProblemKind kind, int n, int k, std::vector<Expr> functions);

  ProblemKind kind_;
  int n_;
  int k_;
  std::vector<Expr> source_;
  std::vector<WirtingerTable> tables_;
  std::vector<RealPoly> value_poly_;
  std::vector<RealPoly> dzbar_poly_;
  std::vector<RealPoly> levi_poly_;
  WirtingerTable u_table_;
};

/// Rows: one per defining function; entry (r, j) = ∂(function r)/∂z̄_j.
CMatrix bbar_matrix(const ProblemSystem& sys, std::span<const cplx> z);

/// inf over unit v of Σ_r |Σ_j B[r,j] conj(v_j)|² = σ_min(B)².
double m_value(const ProblemSystem& sys, std::span<const cplx> z);

/// max over the defining functions of sup_{|v|=1} |Levi form|.
double big_l_value(const ProblemSystem& sys, std::span<const cplx> z);

inline constexpr double kNumericalRadiusTol = 1e-8;

/// w(M) = max_θ λ_max((e^{iθ}M + e^{−iθ}M*)/2). Throws std::domain_error on
/// non-finite entries.
double numerical_radius(const CMatrix& m, double tol = kNumericalRadiusTol);

struct GraphRealityReport {
  bool totally_real = false;
  double sigma_min = 0.0;
  std::optional<CVector> witness_v;  // complex-tangent direction when not
};

struct SubmersionRealityReport {
  bool totally_real = false;
  int rank = 0;
  double sigma_min = 0.0;
};

/// tol < 0 selects the default 1e-8·(1 + σ_max).
GraphRealityReport is_totally_real_graph(const ProblemSystem& sys,
                                         std::span<const cplx> z,
                                         double tol = -1.0);

/// Rank counts singular values of A_p above tol·σ_max. Throws NotSubmersion
/// if the real Jacobian of ρ is not of full rank 2n−k at z.
SubmersionRealityReport is_totally_real_submersion(const ProblemSystem& sys,
                                                   std::span<const cplx> z,
                                                   double tol = 1e-8);

/// m/(2L) for graphs, m/L for submersions; +∞ when L = 0 < m; 0 when m = 0.
double tube_radius(const ProblemSystem& sys, std::span<const cplx> z);

struct TubeSample {
  std::vector<cplx> z;
  double m = 0.0;
  double big_l = 0.0;
  double radius = 0.0;
};

using TubeProfile = std::vector<TubeSample>;

TubeProfile tube_profile(const ProblemSystem& sys,
                         const std::vector<std::vector<cplx>>& points);

/// Residual Σ|f^ν(z) − w_ν| (graph) or Σ|ρ_l(z)| (submersion).
double residual(const ProblemSystem& sys, std::span<const cplx> z,
                std::span<const cplx> w = {});

struct LeviIdentity {
  double direct = 0.0;
  double expanded = 0.0;
  double lower_bound = 0.0;
};

/// Levi form of u = Σ|w − f|² at (z, w) in direction V = (v, t).
LeviIdentity levi_u_graph(const ProblemSystem& sys, std::span<const cplx> z,
                          std::span<const cplx> w, const CVector& v,
                          const CVector& t);

/// Levi form of u = Σρ_l² at z in direction v.
LeviIdentity levi_u_submersion(const ProblemSystem& sys,
                               std::span<const cplx> z, const CVector& v);

}  // namespace prc

#endif  // PRC_TRGEOM_HPP
