// Shared generators and oracles for the unit tests.
#ifndef PRC_TESTS_SUPPORT_HPP
#define PRC_TESTS_SUPPORT_HPP

#include <cmath>
#include <limits>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "prc/expr.hpp"
#include "prc/trgeom.hpp"

namespace prc::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline cplx random_cplx(Rng& rng, double r = 1.0) {
  return {uniform(rng, -r, r), uniform(rng, -r, r)};
}

inline std::vector<cplx> random_point(Rng& rng, int n, double r = 1.0) {
  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (auto& c : z) c = random_cplx(rng, r);
  return z;
}

inline CVector random_unit(Rng& rng, int n) {
  CVector v(n);
  for (int j = 0; j < n; ++j) {
    std::normal_distribution<double> g;
    v(j) = cplx(g(rng), g(rng));
  }
  return v / v.norm();
}

// One factor of degree 1: z_j, conj(z_j), Re(z_j) or Im(z_j).
inline Expr random_linear_factor(Rng& rng, int n) {
  const int j = uniform_int(rng, 0, n - 1);
  switch (uniform_int(rng, 0, 3)) {
    case 0: return Expr::var(j);
    case 1: return Expr::conj(Expr::var(j));
    case 2: return Expr::re(Expr::var(j));
    default: return Expr::im(Expr::var(j));
  }
}

/// Random polynomial in z, conj(z), Re, Im of total degree ≤ max_degree.
inline Expr random_poly(Rng& rng, int n, int max_degree) {
  const int terms = uniform_int(rng, 1, 4);
  Expr sum;
  for (int t = 0; t < terms; ++t) {
    const int deg = uniform_int(rng, 0, max_degree);
    Expr term = Expr::constant(random_cplx(rng, 1.5));
    int used = 0;
    while (used < deg) {
      if (deg - used >= 2 && uniform_int(rng, 0, 4) == 0) {
        // (a + b)^2 exercises Pow and distribution.
        Expr inner = Expr::add(random_linear_factor(rng, n),
                               Expr::constant(random_cplx(rng)));
        term = Expr::mul(term, Expr::pow(inner, 2));
        used += 2;
      } else {
        term = Expr::mul(term, random_linear_factor(rng, n));
        ++used;
      }
    }
    if (uniform_int(rng, 0, 5) == 0) term = Expr::conj(term);
    sum = t == 0 ? term : (uniform_int(rng, 0, 3) == 0 ? Expr::sub(sum, term)
                                                         : Expr::add(sum, term));
  }
  return sum;
}

/// Real-valued random polynomial: Re of a random polynomial.
inline Expr random_real_poly(Rng& rng, int n, int max_degree) {
  return Expr::re(random_poly(rng, n, max_degree));
}

// Random graph system whose functions each carry a conj(z_ν) term so that
// the ∂̄-matrix is generically invertible.
inline ProblemSystem random_graph(Rng& rng, int n) {
  std::vector<Expr> fs;
  for (int nu = 0; nu < n; ++nu)
    fs.push_back(Expr::add(random_poly(rng, n, 4),
                           Expr::mul(Expr::constant(random_cplx(rng, 2.0)),
                                     Expr::conj(Expr::var(nu)))));
  return ProblemSystem::graph(fs, n);
}

inline ProblemSystem random_submersion(Rng& rng, int n, int k) {
  std::vector<Expr> fs;
  for (int l = 0; l < 2 * n - k; ++l) {
    const Expr lin = Expr::mul(Expr::constant(random_cplx(rng, 2.0)),
                               Expr::var(uniform_int(rng, 0, n - 1)));
    fs.push_back(Expr::re(Expr::add(random_poly(rng, n, 3), lin)));
  }
  return ProblemSystem::submersion(fs, n, k);
}

inline double rel_err(cplx a, cplx b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

inline Expr wermer_f() {
  return parse("-(1+i)*conj(z1) + i*z1*conj(z1)^2 + z1^2*conj(z1)^3", 1);
}

inline ProblemSystem wermer_system() { return ProblemSystem::graph({wermer_f()}, 1); }

/// ρ1 = y1 − c(x1² + x2³), ρ2 = y2 − d(x2² + x1³): a graph over ℝ² in ℂ².
inline ProblemSystem example2_system(double c = 0.05, double d = 0.05) {
  const std::string cs = std::to_string(c), ds = std::to_string(d);
  return ProblemSystem::submersion(
      {parse("Im(z1) - " + cs + "*(Re(z1)^2 + Re(z2)^3)", 2),
       parse("Im(z2) - " + ds + "*(Re(z2)^2 + Re(z1)^3)", 2)},
      2, 2);
}

/// The point of the Example 2 manifold over (x1, x2).
inline std::vector<cplx> example2_point(double x1, double x2, double c = 0.05,
                                        double d = 0.05) {
  return {cplx(x1, c * (x1 * x1 + x2 * x2 * x2)), cplx(x2, d * (x2 * x2 + x1 * x1 * x1))};
}

inline double wermer_m(double r) {
  return 9 * std::pow(r, 8) - 2 * std::pow(r, 4) - 4 * r * r + 2;
}
inline double wermer_l(double r) { return 2 * r * std::sqrt(1 + 9 * std::pow(r, 4)); }

/// Unit vectors on S^{2n-1} ⊂ ℂⁿ: Fibonacci lattice for n = 1 (circle) and
/// n = 2 (S³ via Hopf-like angles), seeded random for n = 3.
inline std::vector<CVector> sphere_directions(int n, int count, Rng& rng) {
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(count));
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < count; ++i) {
    CVector v(n);
    if (n == 1) {
      v(0) = std::polar(1.0, 2 * std::numbers::pi * i / count);
    } else if (n == 2) {
      // |v1|² uniform in [0,1], two independent phases from Fibonacci-type sequences.
      const double t = (i + 0.5) / count;
      const double a = std::sqrt(t), b = std::sqrt(1 - t);
      const double p1 = 2 * std::numbers::pi * std::fmod(i / golden, 1.0);
      const double p2 = 2 * std::numbers::pi * std::fmod(i / (golden * golden), 1.0);
      v(0) = std::polar(a, p1);
      v(1) = std::polar(b, p2);
    } else {
      v = CVector::Zero(n);
      for (int j = 0; j < n; ++j) {
        std::normal_distribution<double> g;
        v(j) = cplx(g(rng), g(rng));
      }
      v /= v.norm();
    }
    out.push_back(v);
  }
  return out;
}

/// Σ_r |Σ_j B[r,j] conj(v_j)|² for a unit v.
inline double dbar_energy(const CMatrix& b, const CVector& v) {
  return (b * v.conjugate()).squaredNorm();
}

/// Derivative-free minimization of dbar_energy over `budget` unit
/// directions: a global stage (Fibonacci-type for n ≤ 2, Gaussian for n = 3)
/// followed by rounds of shrinking random perturbations around the best
/// direction so far. Uses no factorization of B.
inline double brute_force_m(const CMatrix& b, int budget, Rng& rng) {
  const int n = static_cast<int>(b.cols());
  const int global = budget / 5;
  double best = std::numeric_limits<double>::infinity();
  CVector arg;
  for (const auto& v : sphere_directions(n, global, rng)) {
    const double e = dbar_energy(b, v);
    if (e < best) {
      best = e;
      arg = v;
    }
  }
  const int rounds = 16;
  const int per_round = (budget - global) / rounds;
  double radius = 0.5;
  for (int r = 0; r < rounds; ++r, radius *= 0.5) {
    for (int s = 0; s < per_round; ++s) {
      CVector v = arg;
      for (int j = 0; j < n; ++j) {
        std::normal_distribution<double> g(0.0, radius);
        v(j) += cplx(g(rng), g(rng));
      }
      v /= v.norm();
      const double e = dbar_energy(b, v);
      if (e < best) {
        best = e;
        arg = v;
      }
    }
  }
  return best;
}

}  // namespace prc::testing

#endif  // PRC_TESTS_SUPPORT_HPP
