#include "prc/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <stdexcept>

namespace prc {

struct Expr::Node {
  Op op = Op::Const;
  cplx value{};
  int index = 0;
  bool conj = false;
  unsigned exponent = 0;
  // Children stay null for leaves; a default Expr would recurse into Expr().
  Expr a{std::shared_ptr<const Node>{}};
  Expr b{std::shared_ptr<const Node>{}};
};

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr::Expr() {
  static const std::shared_ptr<const Node> zero = std::make_shared<Node>();
  node_ = zero;
}

Expr Expr::constant(cplx c) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = c;
  return Expr(n);
}

Expr Expr::var(int index, bool conjugated) {
  if (index < 0) throw std::invalid_argument("variable index must be >= 0");
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->index = index;
  n->conj = conjugated;
  return Expr(n);
}

namespace {

template <typename NodeT>
std::shared_ptr<NodeT> unary_node(Op op, Expr a) {
  auto n = std::make_shared<NodeT>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

template <typename NodeT>
std::shared_ptr<NodeT> binary_node(Op op, Expr a, Expr b) {
  auto n = std::make_shared<NodeT>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

Expr Expr::neg(Expr a) { return Expr(unary_node<Node>(Op::Neg, std::move(a))); }
Expr Expr::conj(Expr a) { return Expr(unary_node<Node>(Op::Conj, std::move(a))); }
Expr Expr::re(Expr a) { return Expr(unary_node<Node>(Op::Re, std::move(a))); }
Expr Expr::im(Expr a) { return Expr(unary_node<Node>(Op::Im, std::move(a))); }
Expr Expr::add(Expr a, Expr b) {
  return Expr(binary_node<Node>(Op::Add, std::move(a), std::move(b)));
}
Expr Expr::sub(Expr a, Expr b) {
  return Expr(binary_node<Node>(Op::Sub, std::move(a), std::move(b)));
}
Expr Expr::mul(Expr a, Expr b) {
  return Expr(binary_node<Node>(Op::Mul, std::move(a), std::move(b)));
}
Expr Expr::pow(Expr a, unsigned exponent) {
  auto n = unary_node<Node>(Op::Pow, std::move(a));
  n->exponent = exponent;
  return Expr(n);
}

Op Expr::op() const { return node_->op; }
cplx Expr::value() const { return node_->value; }
int Expr::index() const { return node_->index; }
bool Expr::conjugated() const { return node_->conj; }
unsigned Expr::exponent() const { return node_->exponent; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

bool Expr::is_zero() const { return op() == Op::Const && value() == cplx(0.0); }
bool Expr::is_one() const { return op() == Op::Const && value() == cplx(1.0); }

int Expr::arity() const {
  switch (op()) {
    case Op::Const:
      return 0;
    case Op::Var:
      return index() + 1;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      return std::max(lhs().arity(), rhs().arity());
    default:
      return lhs().arity();
  }
}

std::size_t Expr::node_count() const {
  switch (op()) {
    case Op::Const:
    case Op::Var:
      return 1;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      return 1 + lhs().node_count() + rhs().node_count();
    default:
      return 1 + lhs().node_count();
  }
}

bool Expr::operator==(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (op() != other.op()) return false;
  switch (op()) {
    case Op::Const:
      return value() == other.value();
    case Op::Var:
      return index() == other.index() && conjugated() == other.conjugated();
    case Op::Pow:
      return exponent() == other.exponent() && lhs() == other.lhs();
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      return lhs() == other.lhs() && rhs() == other.rhs();
    default:
      return lhs() == other.lhs();
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string format_real(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("cannot format constant");
  return std::string(buf.data(), end);
}

std::string format_const(cplx c) {
  if (c.imag() == 0.0) return format_real(c.real());
  if (c.real() == 0.0 && c.imag() == 1.0) return "i";
  if (c.real() == 0.0) return "(" + format_real(c.imag()) + " * i)";
  return "(" + format_real(c.real()) + " + " + format_real(c.imag()) + " * i)";
}

}  // namespace

std::string to_string(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
      return format_const(e.value());
    case Op::Var: {
      std::string v = "z" + std::to_string(e.index() + 1);
      return e.conjugated() ? "conj(" + v + ")" : v;
    }
    case Op::Neg:
      return "-(" + to_string(e.lhs()) + ")";
    case Op::Conj:
      return "conj(" + to_string(e.lhs()) + ")";
    case Op::Re:
      return "Re(" + to_string(e.lhs()) + ")";
    case Op::Im:
      return "Im(" + to_string(e.lhs()) + ")";
    case Op::Add:
      return "(" + to_string(e.lhs()) + " + " + to_string(e.rhs()) + ")";
    case Op::Sub:
      return "(" + to_string(e.lhs()) + " - " + to_string(e.rhs()) + ")";
    case Op::Mul:
      return "(" + to_string(e.lhs()) + " * " + to_string(e.rhs()) + ")";
    case Op::Pow:
      return "(" + to_string(e.lhs()) + ")^" + std::to_string(e.exponent());
  }
  return {};
}

// ---------------------------------------------------------------------------
// Normalization

namespace {

Expr push_conj(const Expr& e, bool conjugate) {
  switch (e.op()) {
    case Op::Const:
      return conjugate ? Expr::constant(std::conj(e.value())) : e;
    case Op::Var:
      return Expr::var(e.index(), e.conjugated() != conjugate);
    case Op::Neg:
      return Expr::neg(push_conj(e.lhs(), conjugate));
    case Op::Conj:
      return push_conj(e.lhs(), !conjugate);
    case Op::Re:
      // Re a = (a + conj a) / 2, itself real so the outer conj is moot.
      return Expr::mul(Expr::add(push_conj(e.lhs(), false),
                                 push_conj(e.lhs(), true)),
                       Expr::constant(0.5));
    case Op::Im:
      // Im a = (a - conj a) / (2i).
      return Expr::mul(Expr::sub(push_conj(e.lhs(), false),
                                 push_conj(e.lhs(), true)),
                       Expr::constant(cplx(0.0, -0.5)));
    case Op::Add:
      return Expr::add(push_conj(e.lhs(), conjugate),
                       push_conj(e.rhs(), conjugate));
    case Op::Sub:
      return Expr::sub(push_conj(e.lhs(), conjugate),
                       push_conj(e.rhs(), conjugate));
    case Op::Mul:
      return Expr::mul(push_conj(e.lhs(), conjugate),
                       push_conj(e.rhs(), conjugate));
    case Op::Pow:
      return Expr::pow(push_conj(e.lhs(), conjugate), e.exponent());
  }
  return e;
}

}  // namespace

NormalExpr normalize(const Expr& e) { return NormalExpr(push_conj(e, false)); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

cplx ipow(cplx base, unsigned k) {
  cplx result(1.0);
  while (k > 0) {
    if (k & 1u) result *= base;
    k >>= 1u;
    if (k > 0) base *= base;
  }
  return result;
}

CInterval eval_rect(const Expr& e, std::span<const Interval> coords) {
  switch (e.op()) {
    case Op::Const:
      return CInterval(e.value());
    case Op::Var: {
      const auto j = static_cast<std::size_t>(e.index());
      if (2 * j + 1 >= coords.size())
        throw std::out_of_range("box has too few coordinates");
      const Interval& x = coords[2 * j];
      const Interval& y = coords[2 * j + 1];
      return e.conjugated() ? CInterval{x, -y} : CInterval{x, y};
    }
    case Op::Neg:
      return -eval_rect(e.lhs(), coords);
    case Op::Conj:
      return conj(eval_rect(e.lhs(), coords));
    case Op::Re:
      return {eval_rect(e.lhs(), coords).re, Interval(0.0)};
    case Op::Im:
      return {eval_rect(e.lhs(), coords).im, Interval(0.0)};
    case Op::Add:
      return eval_rect(e.lhs(), coords) + eval_rect(e.rhs(), coords);
    case Op::Sub:
      return eval_rect(e.lhs(), coords) - eval_rect(e.rhs(), coords);
    case Op::Mul:
      return eval_rect(e.lhs(), coords) * eval_rect(e.rhs(), coords);
    case Op::Pow:
      return pow(eval_rect(e.lhs(), coords), e.exponent());
  }
  return {};
}

}  // namespace

cplx eval_point(const Expr& e, std::span<const cplx> z) {
  switch (e.op()) {
    case Op::Const:
      return e.value();
    case Op::Var: {
      const auto j = static_cast<std::size_t>(e.index());
      if (j >= z.size()) throw std::out_of_range("point has too few coordinates");
      return e.conjugated() ? std::conj(z[j]) : z[j];
    }
    case Op::Neg:
      return -eval_point(e.lhs(), z);
    case Op::Conj:
      return std::conj(eval_point(e.lhs(), z));
    case Op::Re:
      return eval_point(e.lhs(), z).real();
    case Op::Im:
      return eval_point(e.lhs(), z).imag();
    case Op::Add:
      return eval_point(e.lhs(), z) + eval_point(e.rhs(), z);
    case Op::Sub:
      return eval_point(e.lhs(), z) - eval_point(e.rhs(), z);
    case Op::Mul:
      return eval_point(e.lhs(), z) * eval_point(e.rhs(), z);
    case Op::Pow:
      return ipow(eval_point(e.lhs(), z), e.exponent());
  }
  return {};
}

CInterval eval_interval(const NormalExpr& e, std::span<const Interval> coords) {
  for (const auto& c : coords)
    if (!c.is_finite()) throw std::invalid_argument("box bounds must be finite");
  return eval_rect(e.expr(), coords);
}

// ---------------------------------------------------------------------------
// Differentiation. Constant folding keeps derivative trees small; it is the
// only simplification performed.

namespace {

Expr fold_neg(const Expr& a) {
  if (a.op() == Op::Const) return Expr::constant(-a.value());
  return Expr::neg(a);
}

Expr fold_add(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.op() == Op::Const && b.op() == Op::Const)
    return Expr::constant(a.value() + b.value());
  return Expr::add(a, b);
}

Expr fold_sub(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return fold_neg(b);
  if (a.op() == Op::Const && b.op() == Op::Const)
    return Expr::constant(a.value() - b.value());
  return Expr::sub(a, b);
}

Expr fold_mul(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr::constant(0.0);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.op() == Op::Const && b.op() == Op::Const)
    return Expr::constant(a.value() * b.value());
  return Expr::mul(a, b);
}

Expr fold_pow(const Expr& a, unsigned k) {
  if (k == 0) return Expr::constant(1.0);
  if (k == 1) return a;
  if (a.op() == Op::Const) return Expr::constant(ipow(a.value(), k));
  return Expr::pow(a, k);
}

Expr differentiate(const Expr& e, int j, bool wrt_conj) {
  switch (e.op()) {
    case Op::Const:
      return Expr::constant(0.0);
    case Op::Var:
      return Expr::constant(
          (e.index() == j && e.conjugated() == wrt_conj) ? 1.0 : 0.0);
    case Op::Neg:
      return fold_neg(differentiate(e.lhs(), j, wrt_conj));
    case Op::Add:
      return fold_add(differentiate(e.lhs(), j, wrt_conj),
                      differentiate(e.rhs(), j, wrt_conj));
    case Op::Sub:
      return fold_sub(differentiate(e.lhs(), j, wrt_conj),
                      differentiate(e.rhs(), j, wrt_conj));
    case Op::Mul:
      return fold_add(fold_mul(differentiate(e.lhs(), j, wrt_conj), e.rhs()),
                      fold_mul(e.lhs(), differentiate(e.rhs(), j, wrt_conj)));
    case Op::Pow: {
      const Expr da = differentiate(e.lhs(), j, wrt_conj);
      if (da.is_zero()) return da;
      const unsigned k = e.exponent();
      return fold_mul(fold_mul(Expr::constant(static_cast<double>(k)),
                               fold_pow(e.lhs(), k - 1)),
                      da);
    }
    case Op::Conj:
    case Op::Re:
    case Op::Im:
      throw std::logic_error("differentiate expects a normalized expression");
  }
  return {};
}

}  // namespace

NormalExpr diff_z(const NormalExpr& e, int j) {
  return NormalExpr(differentiate(e.expr(), j, false));
}

NormalExpr diff_zbar(const NormalExpr& e, int j) {
  return NormalExpr(differentiate(e.expr(), j, true));
}

// ---------------------------------------------------------------------------
// ParseError

ParseError::ParseError(Kind kind, std::size_t position, const std::string& message)
    : std::runtime_error("parse error at " + std::to_string(position) + ": " +
                         message),
      kind_(kind),
      position_(position) {}

}  // namespace prc
