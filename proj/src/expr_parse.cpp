// Recursive-descent parser for
//
//   expr   := term (('+'|'-') term)* ;
//   term   := factor ('*' factor)* ;
//   factor := base ('^' UINT)? ;
//   base   := NUMBER | 'i' | VAR | 'conj(' expr ')' | 'Re(' expr ')'
//           | 'Im(' expr ')' | '(' expr ')' | '-' base ;
//   VAR    := 'z' UINT ;
//
// Note that '-' binds to a base, so "-z1^2" means (-z1)^2.

#include <cctype>
#include <charconv>
#include <string>

#include "prc/expr.hpp"

namespace prc {
namespace {

constexpr unsigned kMaxExponent = 64;

class Parser {
 public:
  Parser(std::string_view text, int n) : text_(text), n_(n) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg,
                         ParseError::Kind kind = ParseError::Kind::Syntax) const {
    throw ParseError(kind, pos_, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      const char c = peek();
      if (c == '+') {
        ++pos_;
        lhs = fold(Op::Add, lhs, term());
      } else if (c == '-') {
        ++pos_;
        lhs = fold(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  // Constant-only arithmetic is folded so that printed complex and negative
  // constants parse back to a single node.
  static Expr fold(Op op, const Expr& a, const Expr& b) {
    if (a.op() == Op::Const && b.op() == Op::Const) {
      if (op == Op::Add) return Expr::constant(a.value() + b.value());
      if (op == Op::Sub) return Expr::constant(a.value() - b.value());
      return Expr::constant(a.value() * b.value());
    }
    if (op == Op::Add) return Expr::add(a, b);
    if (op == Op::Sub) return Expr::sub(a, b);
    return Expr::mul(a, b);
  }

  Expr term() {
    Expr lhs = factor();
    while (peek() == '*') {
      ++pos_;
      lhs = fold(Op::Mul, lhs, factor());
    }
    return lhs;
  }

  Expr factor() {
    Expr b = base();
    if (peek() != '^') return b;
    ++pos_;
    const char c = peek();
    if (c == '-') fail("negative exponent", ParseError::Kind::NegativeExponent);
    if (!std::isdigit(static_cast<unsigned char>(c))) fail("expected exponent");
    const unsigned k = uint_literal();
    if (k > kMaxExponent) fail("exponent too large");
    return Expr::pow(b, k);
  }

  unsigned uint_literal() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    unsigned value = 0;
    auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || start == pos_) {
      pos_ = start;
      fail("invalid integer");
    }
    return value;
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
        ++pos_;
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_])))
        digits();
      else
        pos_ = save;
    }
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("invalid number");
    }
    return Expr::constant(value);
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr call(Expr (*make)(Expr)) {
    expect('(');
    Expr inner = expr();
    expect(')');
    return make(inner);
  }

  Expr base() {
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '-') {
      ++pos_;
      Expr b = base();
      if (b.op() == Op::Const) return Expr::constant(-b.value());
      return Expr::neg(b);
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      const std::string id = identifier();
      if (id == "i") return Expr::constant(cplx(0.0, 1.0));
      if (id == "conj") return call(&Expr::conj);
      if (id == "Re") return call(&Expr::re);
      if (id == "Im") return call(&Expr::im);
      if (id.size() > 1 && id[0] == 'z' &&
          id.find_first_not_of("0123456789", 1) == std::string::npos) {
        unsigned idx = 0;
        auto [ptr, ec] =
            std::from_chars(id.data() + 1, id.data() + id.size(), idx);
        if (ec != std::errc() || idx == 0 || idx > static_cast<unsigned>(n_)) {
          pos_ = start;
          fail("variable " + id + " out of range z1..z" + std::to_string(n_),
               ParseError::Kind::IndexOutOfRange);
        }
        return Expr::var(static_cast<int>(idx) - 1);
      }
      pos_ = start;
      fail("unknown variable '" + id + "'", ParseError::Kind::UnknownVariable);
    }
    if (c == '\0') fail("unexpected end of input");
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int n) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  return Parser(text, n).run();
}

}  // namespace prc
