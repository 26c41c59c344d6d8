#include <doctest.h>

#include <cmath>

#include "prc/expr.hpp"
#include "support.hpp"

using namespace prc;
using namespace prc::testing;

namespace {

bool no_conj_above_leaves(const Expr& e) {
  switch (e.op()) {
    case Op::Conj:
    case Op::Re:
    case Op::Im:
      return false;
    case Op::Const:
    case Op::Var:
      return true;
    case Op::Neg:
    case Op::Pow:
      return no_conj_above_leaves(e.lhs());
    default:
      return no_conj_above_leaves(e.lhs()) && no_conj_above_leaves(e.rhs());
  }
}

cplx at(const Expr& e, cplx z) {
  const cplx p[] = {z};
  return eval_point(e, p);
}

}  // namespace

TEST_CASE("parse: single variable") {
  const Expr e = parse("z1", 1);
  CHECK(e.op() == Op::Var);
  CHECK(e.index() == 0);
  CHECK_FALSE(e.conjugated());
}

TEST_CASE("parse: Wermer function evaluates to the hand-expanded value") {
  const Expr f = wermer_f();
  Rng rng(1);
  for (int s = 0; s < 50; ++s) {
    const cplx z = random_cplx(rng);
    const cplx zb = std::conj(z);
    const cplx expect = -cplx(1, 1) * zb + cplx(0, 1) * z * zb * zb + z * z * zb * zb * zb;
    CHECK(rel_err(at(f, z), expect) < 1e-14);
  }
}

TEST_CASE("parse: errors carry kind and position") {
  try {
    parse("conj(w1)", 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::UnknownVariable);
    CHECK(e.position() == 5);
  }
  try {
    parse("z1 + z3", 2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::IndexOutOfRange);
    CHECK(e.position() == 5);
  }
  try {
    parse("z1^-2", 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::NegativeExponent);
  }
  for (const char* bad : {"", "z1 +", "(z1", "z1 z1", "2..3", "conj z1", "z0", "z1)"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse(bad, 1), ParseError);
  }
}

TEST_CASE("parse: precedence and whitespace") {
  const cplx z(0.7, -0.4);
  CHECK(rel_err(at(parse("1 + 2*z1^2", 1), z), 1.0 + 2.0 * z * z) < 1e-15);
  CHECK(rel_err(at(parse(" - z1 ^ 2 ", 1), z), z * z) < 1e-15);  // (-z1)^2
  CHECK(rel_err(at(parse("2 - z1 - 1", 1), z), 1.0 - z) < 1e-15);
  CHECK(rel_err(at(parse("Re(z1)*i + Im(z1)", 1), z), cplx(-0.4, 0.7)) < 1e-15);
  CHECK(rel_err(at(parse("1.5e1*z1", 1), z), 15.0 * z) < 1e-15);
}

TEST_CASE("to_string round-trips parsed trees") {
  Rng rng(2);
  for (int s = 0; s < 200; ++s) {
    const int n = uniform_int(rng, 1, 3);
    const Expr e = parse(to_string(random_poly(rng, n, 5)), n);
    const Expr back = parse(to_string(e), n);
    CHECK(back == e);
  }
  const Expr w = wermer_f();
  CHECK(parse(to_string(w), 1) == w);
  CHECK(parse(to_string(parse("-(1+i)*z1 + -2.5", 1)), 1) == parse("-(1+i)*z1 + -2.5", 1));
}

TEST_CASE("normalize: conj pushdown and Re/Im rewriting") {
  const cplx z(0.3, 0.8);
  const Expr a = normalize(parse("conj(z1 + i)", 1)).expr();
  CHECK(no_conj_above_leaves(a));
  CHECK(rel_err(at(a, z), std::conj(z) - cplx(0, 1)) < 1e-15);

  const Expr re = normalize(parse("Re(z1)", 1)).expr();
  CHECK(no_conj_above_leaves(re));
  CHECK(rel_err(at(re, z), 0.3) < 1e-15);

  const Expr cc = normalize(parse("conj(conj(z1))", 1)).expr();
  CHECK(cc == Expr::var(0));
}

TEST_CASE("normalize: idempotent and value-preserving") {
  Rng rng(3);
  for (int s = 0; s < 100; ++s) {
    const int n = uniform_int(rng, 1, 3);
    const Expr e = random_poly(rng, n, 5);
    const NormalExpr ne = normalize(e);
    CHECK(no_conj_above_leaves(ne.expr()));
    CHECK(normalize(ne.expr()) == ne);
    for (int p = 0; p < 10; ++p) {
      const auto z = random_point(rng, n, 1.2);
      CHECK(rel_err(eval_point(ne, z), eval_point(e, z)) <= 1e-12);
    }
  }
}

TEST_CASE("eval_point: Wermer zeros") {
  const Expr f = wermer_f();
  CHECK(std::abs(at(f, 1.0)) < 1e-15);
  CHECK(std::abs(at(f, cplx(0, 1))) < 1e-15);
  CHECK(std::abs(at(f, 0.0)) == 0.0);
  CHECK(std::abs(at(f, std::polar(1.0, 2.1))) < 1e-14);
}

TEST_CASE("eval_interval: basic enclosures") {
  const Interval box1[] = {Interval(0, 1), Interval(0, 0)};
  const CInterval r = eval_interval(normalize(parse("z1", 1)), box1);
  CHECK(r.re.lo <= 0.0);
  CHECK(r.re.hi >= 1.0);
  CHECK(r.re.hi < 1.0 + 1e-9);
  CHECK(r.im.mag() < 1e-12);

  const Interval box2[] = {Interval(-1, 1), Interval(-1, 1)};
  const CInterval q = eval_interval(normalize(parse("z1*conj(z1)", 1)), box2);
  CHECK(q.re.lo <= 0.0);
  CHECK(q.re.hi >= 2.0);
  Rng rng(4);
  for (int s = 0; s < 1000; ++s) CHECK(q.contains(at(parse("z1*conj(z1)", 1), random_cplx(rng))));

  const Interval box3[] = {Interval(-0.1, 0.1), Interval(-0.1, 0.1)};
  const NormalExpr wf = normalize(wermer_f());
  CHECK(eval_interval(wf, box3).contains(at(wermer_f(), 0.1)));
  const RealPoly wp = RealPoly::expand(wf, 1);
  CHECK(wp.eval(box3).contains(at(wermer_f(), 0.1)));
}

TEST_CASE("eval_interval and RealPoly: Monte Carlo soundness") {
  Rng rng(5);
  for (int s = 0; s < 100; ++s) {
    const int n = uniform_int(rng, 1, 3);
    const NormalExpr e = normalize(random_poly(rng, n, 5));
    std::vector<Interval> box;
    for (int a = 0; a < 2 * n; ++a) {
      const double c = uniform(rng, -1, 1), w = uniform(rng, 0, 0.5);
      box.emplace_back(c - w, c + w);
    }
    const CInterval tree = eval_interval(e, box);
    const CInterval poly = RealPoly::expand(e, n).eval(box);
    for (int k = 0; k < 10000; ++k) {
      std::vector<cplx> z(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j)
        z[static_cast<std::size_t>(j)] =
            cplx(uniform(rng, box[2 * j].lo, box[2 * j].hi),
                 uniform(rng, box[2 * j + 1].lo, box[2 * j + 1].hi));
      const cplx v = eval_point(e, z);
      if (!tree.contains(v) || !poly.contains(v)) {
        CAPTURE(to_string(e.expr()));
        FAIL("sample escaped enclosure");
      }
    }
  }
}

TEST_CASE("RealPoly: exact cancellation of z + conj(z)") {
  const RealPoly p = RealPoly::expand(normalize(parse("z1 + conj(z1)", 1)), 1);
  CHECK(p.degree() == 1);
  const Interval box[] = {Interval(1, 2), Interval(-5, 5)};
  const CInterval v = p.eval(box);
  CHECK(v.re.lo >= 2.0 - 1e-9);
  CHECK(v.re.hi <= 4.0 + 1e-9);
  CHECK(v.im.mag() < 1e-12);
}

TEST_CASE("diff: Wirtinger derivatives of the Wermer function") {
  const NormalExpr f = normalize(wermer_f());
  const NormalExpr fzb = diff_zbar(f, 0);
  const NormalExpr levi = diff_z(fzb, 0);
  Rng rng(6);
  for (int s = 0; s < 100; ++s) {
    const cplx z = random_cplx(rng);
    const double r2 = std::norm(z);
    const cplx p[] = {z};
    CHECK(rel_err(eval_point(fzb, p), -cplx(1, 1) + cplx(0, 2) * r2 + 3.0 * r2 * r2) < 1e-13);
    CHECK(rel_err(eval_point(levi, p), 2.0 * std::conj(z) * (cplx(0, 1) + 3.0 * r2)) < 1e-13);
  }
}

TEST_CASE("diff: holomorphic coordinate") {
  const NormalExpr z = normalize(parse("z1", 1));
  CHECK(diff_z(z, 0).expr().is_one());
  CHECK(diff_zbar(z, 0).expr().is_zero());
  const NormalExpr h = normalize(parse("z1^3 + 2*z1*z2", 2));
  CHECK(diff_zbar(h, 0).expr().is_zero());
  CHECK(diff_zbar(h, 1).expr().is_zero());
}
