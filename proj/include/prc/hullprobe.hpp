#ifndef PRC_HULLPROBE_HPP
#define PRC_HULLPROBE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "prc/certify.hpp"

namespace prc {

/// Points of K in the ambient space: (z, F(z)) ∈ ℂ²ⁿ for graphs, z ∈ ℂⁿ
/// for level sets.
struct SampleCloud {
  std::vector<std::vector<cplx>> points;
  int density = 0;
  std::uint64_t seed = 0;
  std::size_t seeds = 0;      // submersion: Newton seeds tried
  std::size_t converged = 0;  // submersion: seeds that reached ρ = 0
  double max_defect = 0.0;    // max |ρ_l| (submersion) over the cloud

  std::size_t dimension() const { return points.empty() ? 0 : points.front().size(); }
};

/// Raised when fewer than half the Newton seeds converge onto ρ = 0.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Graph: a grid with `density` points per real axis of the parameter
/// region (discs add a boundary ring of 4·density points when n = 1),
/// mapped through F. Submersion: density^k uniform seeds in the cap
/// projected onto ρ = 0 by damped Gauss–Newton; points leaving the cap are
/// dropped. Deterministic in (density, seed).
SampleCloud sample_compact(const ProblemSystem& sys, const CompactSpec& k,
                           int density, std::uint64_t seed = 1);

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;  // optimum, or an improving ray when unbounded
  double objective = 0.0;
  int iterations = 0;
};

/// maximize cᵀx subject to A x ≤ b with x free, via the dual
/// min bᵀy, Aᵀy = c, y ≥ 0 solved by a dense two-phase simplex (largest
/// reduced cost, Bland's rule after a run of degenerate pivots).
LpResult maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c);

/// Exponent vectors of all monomials in `vars` variables of total degree
/// ≤ degree, graded then lexicographic (constant first).
std::vector<std::vector<int>> monomial_exponents(int vars, int degree);

struct ProbeOptions {
  int degree = 6;
  int angles = 16;
  double margin = 0.05;
};

struct SeparationResult {
  bool separated = false;
  bool unbounded = false;  // p vanishes on the cloud but not at q
  int degree = 0;
  int angles = 0;
  double margin = 0.0;
  std::vector<std::vector<int>> exponents;
  std::vector<cplx> coefficients;
  double objective = 0.0;   // max Re p(q) under the polygonal constraints
  double threshold = 0.0;   // (1 + margin)·sec(π/g)
  cplx value_at_q{};
  double cloud_max = 0.0;   // max |p| over the cloud
  double ratio = 0.0;       // |p(q)| / cloud_max
  std::size_t cloud_size = 0;
  int lp_iterations = 0;
  std::optional<double> dense_ratio;  // ratio against a denser cloud
  std::optional<bool> fragile;
};

cplx eval_polynomial(const std::vector<std::vector<int>>& exponents,
                     const std::vector<cplx>& coefficients, std::span<const cplx> point);

/// Polynomial separation of q from the cloud. Evidence only.
SeparationResult probe(const SampleCloud& cloud, std::span<const cplx> q,
                       const ProbeOptions& opts = {});

/// Re-evaluates a separating polynomial on another cloud and sets
/// dense_ratio and fragile (ratio ≤ 1).
void check_fragility(SeparationResult& result, const SampleCloud& dense,
                     std::span<const cplx> q);

Json to_json(const SeparationResult& r);

}  // namespace prc

#endif  // PRC_HULLPROBE_HPP
