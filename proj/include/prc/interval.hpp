#ifndef PRC_INTERVAL_HPP
#define PRC_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace prc {

// Relative outward widening applied after every floating-point operation.
// There is no directed rounding; this factor dominates the 2^-53 rounding
// error of a single IEEE operation.
inline constexpr double kIntervalInflation = 0x1p-40;

/// Closed real interval [lo, hi] with outward epsilon-inflation.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr Interval() = default;
  constexpr explicit Interval(double v) : lo(v), hi(v) {}
  constexpr Interval(double l, double h) : lo(l), hi(h) {}

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  // Largest absolute value.
  double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
  // Smallest absolute value.
  double mig() const {
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    return std::min(std::fabs(lo), std::fabs(hi));
  }

  bool operator==(const Interval&) const = default;
};

namespace detail {
inline double widen_down(double v) {
  return v - std::fabs(v) * kIntervalInflation;
}
inline double widen_up(double v) { return v + std::fabs(v) * kIntervalInflation; }
}  // namespace detail

inline Interval outward(double lo, double hi) {
  return {detail::widen_down(lo), detail::widen_up(hi)};
}

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator+(const Interval& a, const Interval& b) {
  return outward(a.lo + b.lo, a.hi + b.hi);
}

inline Interval operator-(const Interval& a, const Interval& b) {
  return outward(a.lo - b.hi, a.hi - b.lo);
}

inline Interval operator*(const Interval& a, const Interval& b) {
  const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo,
               p4 = a.hi * b.hi;
  return outward(std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4}));
}

inline Interval operator*(double s, const Interval& a) {
  return Interval(s) * a;
}

inline Interval sqr(const Interval& a) {
  const double lo2 = a.mig() * a.mig();
  const double hi2 = a.mag() * a.mag();
  return outward(lo2, hi2);
}

/// Tight integer power: even powers of intervals straddling zero start at 0.
inline Interval pow(const Interval& a, unsigned k) {
  if (k == 0) return Interval(1.0);
  if (k == 1) return a;
  if (k % 2 == 0) {
    const Interval s = sqr(a);
    Interval r = s;
    for (unsigned i = 2; i < k; i += 2) r = r * s;
    return r;
  }
  // Odd powers are monotone.
  double lo = 1.0, hi = 1.0;
  for (unsigned i = 0; i < k; ++i) {
    lo *= a.lo;
    hi *= a.hi;
  }
  const double slack = static_cast<double>(k) * kIntervalInflation;
  return {lo - std::fabs(lo) * slack, hi + std::fabs(hi) * slack};
}

inline Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

/// Upper bound of sqrt over a nonnegative quantity given as a double.
inline double sqrt_up(double v) { return detail::widen_up(std::sqrt(v)); }
inline double sqrt_down(double v) {
  return v <= 0.0 ? 0.0 : detail::widen_down(std::sqrt(v));
}

/// Axis-aligned complex rectangle re × i·im.
struct CInterval {
  Interval re;
  Interval im;

  constexpr CInterval() = default;
  constexpr CInterval(Interval r, Interval i) : re(r), im(i) {}
  explicit CInterval(std::complex<double> c)
      : re(c.real()), im(c.imag()) {}

  bool contains(std::complex<double> c) const {
    return re.contains(c.real()) && im.contains(c.imag());
  }
  // Upper bound of |c| over the rectangle.
  double mag() const {
    const double a = re.mag(), b = im.mag();
    return sqrt_up(a * a + b * b);
  }
  // Lower bound of |c| over the rectangle (distance from the origin).
  double mig() const {
    const double a = re.mig(), b = im.mig();
    return sqrt_down(a * a + b * b);
  }
  // Upper bound of |c - center| over the rectangle.
  double max_distance(std::complex<double> center) const {
    const double a = std::max(std::fabs(re.lo - center.real()),
                              std::fabs(re.hi - center.real()));
    const double b = std::max(std::fabs(im.lo - center.imag()),
                              std::fabs(im.hi - center.imag()));
    return sqrt_up(a * a + b * b);
  }
  std::complex<double> mid() const { return {re.mid(), im.mid()}; }

  bool operator==(const CInterval&) const = default;
};

inline CInterval operator-(const CInterval& a) { return {-a.re, -a.im}; }
inline CInterval conj(const CInterval& a) { return {a.re, -a.im}; }

inline CInterval operator+(const CInterval& a, const CInterval& b) {
  return {a.re + b.re, a.im + b.im};
}
inline CInterval operator-(const CInterval& a, const CInterval& b) {
  return {a.re - b.re, a.im - b.im};
}
inline CInterval operator*(const CInterval& a, const CInterval& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CInterval operator*(const CInterval& a, const Interval& s) {
  return {a.re * s, a.im * s};
}

/// Tight square: (a+ib)^2 = a^2 - b^2 + 2iab.
inline CInterval sqr(const CInterval& a) {
  return {sqr(a.re) - sqr(a.im), Interval(2.0) * (a.re * a.im)};
}

inline CInterval pow(const CInterval& a, unsigned k) {
  CInterval result{Interval(1.0), Interval(0.0)};
  CInterval base = a;
  bool first = true;
  while (k > 0) {
    if (k & 1u) {
      result = first ? base : result * base;
      first = false;
    }
    k >>= 1u;
    if (k > 0) base = sqr(base);
  }
  return result;
}

}  // namespace prc

#endif  // PRC_INTERVAL_HPP
