#ifndef PRC_EXPR_HPP
#define PRC_EXPR_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prc/interval.hpp"

namespace prc {

using cplx = std::complex<double>;

/// Raised by parse() with the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownVariable, IndexOutOfRange, NegativeExponent };

  ParseError(Kind kind, std::size_t position, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

enum class Op : std::uint8_t { Const, Var, Neg, Conj, Re, Im, Add, Sub, Mul, Pow };

/// Immutable expression tree in z_1..z_n and their conjugates.
///
/// Nodes are shared; copying an Expr is cheap. Variable indices are
/// zero-based internally (z1 has index 0).
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(cplx c);
  static Expr var(int index, bool conjugated = false);
  static Expr neg(Expr a);
  static Expr conj(Expr a);
  static Expr re(Expr a);
  static Expr im(Expr a);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);
  static Expr mul(Expr a, Expr b);
  static Expr pow(Expr a, unsigned exponent);

  Op op() const;
  cplx value() const;          // Const only
  int index() const;           // Var only
  bool conjugated() const;     // Var only
  unsigned exponent() const;   // Pow only
  const Expr& lhs() const;     // unary operand or left operand
  const Expr& rhs() const;     // binary right operand

  bool is_zero() const;
  bool is_one() const;
  // One past the largest variable index referenced (0 when constant).
  int arity() const;
  std::size_t node_count() const;

  bool operator==(const Expr& other) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Expression where conj() applies only to variables and Re/Im are absent.
/// z_j and conj(z_j) then behave as independent holomorphic variables.
class NormalExpr {
 public:
  NormalExpr() = default;
  const Expr& expr() const { return expr_; }
  bool operator==(const NormalExpr& other) const = default;

 private:
  friend NormalExpr normalize(const Expr& e);
  friend NormalExpr diff_z(const NormalExpr& e, int j);
  friend NormalExpr diff_zbar(const NormalExpr& e, int j);
  explicit NormalExpr(Expr e) : expr_(std::move(e)) {}
  Expr expr_;
};

/// Parses `text` against the expression grammar; variables are z1..zn.
Expr parse(std::string_view text, int n);

/// Fully parenthesized text that parse() maps back to the same tree.
std::string to_string(const Expr& e);

NormalExpr normalize(const Expr& e);

cplx eval_point(const Expr& e, std::span<const cplx> z);
inline cplx eval_point(const NormalExpr& e, std::span<const cplx> z) {
  return eval_point(e.expr(), z);
}

/// Rectangle enclosure over a box given as (Re z1, Im z1, Re z2, ...).
CInterval eval_interval(const NormalExpr& e, std::span<const Interval> coords);

/// Wirtinger derivatives; j is zero-based.
NormalExpr diff_z(const NormalExpr& e, int j);
NormalExpr diff_zbar(const NormalExpr& e, int j);

/// Polynomial in the real coordinates (x1, y1, ..., xn, yn) with complex
/// interval coefficients, obtained by substituting z = x + iy, z̄ = x − iy
/// and expanding. Cancellations such as z + z̄ = 2x happen exactly, so its
/// interval evaluation avoids the dependency blow-up of the tree walk.
class RealPoly {
 public:
  using Exponents = std::vector<std::uint8_t>;

  RealPoly() = default;
  explicit RealPoly(int real_vars) : real_vars_(real_vars) {}

  static RealPoly expand(const NormalExpr& e, int n);

  int real_vars() const { return real_vars_; }
  const std::map<Exponents, CInterval>& terms() const { return terms_; }
  int degree() const;

  CInterval eval(std::span<const Interval> coords) const;
  cplx eval_mid(std::span<const double> coords) const;

  RealPoly operator+(const RealPoly& o) const;
  RealPoly operator*(const RealPoly& o) const;
  RealPoly scaled(const CInterval& s) const;

 private:
  void add_term(const Exponents& e, const CInterval& c);
  int real_vars_ = 0;
  std::map<Exponents, CInterval> terms_;
};

}  // namespace prc

#endif  // PRC_EXPR_HPP
