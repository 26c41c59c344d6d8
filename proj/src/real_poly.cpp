#include <algorithm>
#include <stdexcept>

#include "prc/expr.hpp"

namespace prc {

void RealPoly::add_term(const Exponents& e, const CInterval& c) {
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) it->second = it->second + c;
}

int RealPoly::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (auto k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

RealPoly RealPoly::operator+(const RealPoly& o) const {
  RealPoly r = *this;
  r.real_vars_ = std::max(real_vars_, o.real_vars_);
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

RealPoly RealPoly::operator*(const RealPoly& o) const {
  RealPoly r(std::max(real_vars_, o.real_vars_));
  Exponents sum(static_cast<std::size_t>(r.real_vars_), 0);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      for (std::size_t v = 0; v < sum.size(); ++v) {
        const unsigned k = unsigned(ea[v]) + unsigned(eb[v]);
        if (k > 255) throw std::overflow_error("polynomial degree too large");
        sum[v] = static_cast<std::uint8_t>(k);
      }
      r.add_term(sum, ca * cb);
    }
  }
  return r;
}

RealPoly RealPoly::scaled(const CInterval& s) const {
  RealPoly r(real_vars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, c * s);
  return r;
}

RealPoly RealPoly::expand(const NormalExpr& e, int n) {
  struct Expander {
    int real_vars;

    RealPoly constant(const CInterval& c) const {
      RealPoly p(real_vars);
      p.add_term(Exponents(static_cast<std::size_t>(real_vars), 0), c);
      return p;
    }

    RealPoly variable(int j, bool conjugated) const {
      RealPoly p(real_vars);
      Exponents ex(static_cast<std::size_t>(real_vars), 0);
      ex[static_cast<std::size_t>(2 * j)] = 1;
      p.add_term(ex, CInterval(cplx(1.0, 0.0)));
      ex[static_cast<std::size_t>(2 * j)] = 0;
      ex[static_cast<std::size_t>(2 * j + 1)] = 1;
      p.add_term(ex, CInterval(cplx(0.0, conjugated ? -1.0 : 1.0)));
      return p;
    }

    RealPoly operator()(const Expr& x) const {
      switch (x.op()) {
        case Op::Const:
          return constant(CInterval(x.value()));
        case Op::Var:
          if (2 * x.index() + 1 >= real_vars)
            throw std::out_of_range("variable index exceeds dimension");
          return variable(x.index(), x.conjugated());
        case Op::Neg:
          return (*this)(x.lhs()).scaled(CInterval(cplx(-1.0)));
        case Op::Add:
          return (*this)(x.lhs()) + (*this)(x.rhs());
        case Op::Sub:
          return (*this)(x.lhs()) + (*this)(x.rhs()).scaled(CInterval(cplx(-1.0)));
        case Op::Mul:
          return (*this)(x.lhs()) * (*this)(x.rhs());
        case Op::Pow: {
          unsigned k = x.exponent();
          RealPoly result = constant(CInterval(cplx(1.0)));
          RealPoly base = (*this)(x.lhs());
          while (k > 0) {
            if (k & 1u) result = result * base;
            k >>= 1u;
            if (k > 0) base = base * base;
          }
          return result;
        }
        case Op::Conj:
        case Op::Re:
        case Op::Im:
          break;
      }
      throw std::logic_error("RealPoly::expand expects a normalized expression");
    }
  };
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  return Expander{2 * n}(e.expr());
}

CInterval RealPoly::eval(std::span<const Interval> coords) const {
  if (coords.size() < static_cast<std::size_t>(real_vars_))
    throw std::out_of_range("box has too few coordinates");
  const int deg = degree();
  // powers[v][k] = coords[v]^k
  std::vector<std::vector<Interval>> powers(static_cast<std::size_t>(real_vars_));
  for (std::size_t v = 0; v < powers.size(); ++v) {
    powers[v].reserve(static_cast<std::size_t>(deg) + 1);
    for (int k = 0; k <= deg; ++k)
      powers[v].push_back(pow(coords[v], static_cast<unsigned>(k)));
  }
  CInterval acc{Interval(0.0), Interval(0.0)};
  for (const auto& [e, c] : terms_) {
    Interval m(1.0);
    bool first = true;
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      m = first ? powers[v][e[v]] : m * powers[v][e[v]];
      first = false;
    }
    acc = acc + c * m;
  }
  return acc;
}

cplx RealPoly::eval_mid(std::span<const double> coords) const {
  if (coords.size() < static_cast<std::size_t>(real_vars_))
    throw std::out_of_range("point has too few coordinates");
  cplx acc(0.0);
  for (const auto& [e, c] : terms_) {
    double m = 1.0;
    for (std::size_t v = 0; v < e.size(); ++v)
      for (unsigned k = 0; k < e[v]; ++k) m *= coords[v];
    acc += c.mid() * m;
  }
  return acc;
}

}  // namespace prc
