#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "opcalc/expr.hpp"
#include "support/test_support.hpp"

using namespace opcalc;
using namespace opcalc::expr;
using opcalc_test::Rng;

TEST_CASE("parse: grammar shapes") {
  const Expr e = parse("x^2");
  REQUIRE(e.root() != nullptr);
  CHECK(e.root()->kind == NodeKind::pow);
  CHECK(e.root()->a->kind == NodeKind::var);
  CHECK(e.root()->b->kind == NodeKind::constant);
  CHECK(e.root()->b->value == 2.0);

  const Expr stirling = parse("floor(x) - x + 1/2");
  CHECK(stirling.references_floor());
  CHECK(eval(stirling, 2.25) == doctest::Approx(0.25).epsilon(1e-15));

  const Expr cum = parse("I[floor(x) - x + 1/2]");
  CHECK(cum.root()->kind == NodeKind::cumint);
  CHECK(cum.has_cumint());
}

TEST_CASE("parse: errors carry offsets") {
  try {
    parse("((x");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.position() == 3);
  }
  CHECK_THROWS_AS(parse("foo(x)"), ParseError);
  CHECK_THROWS_AS(parse("x^x"), ParseError);         // non-constant exponent
  CHECK_THROWS_AS(parse("I[I[x]]"), ParseError);     // nested cumulative integral
  CHECK_THROWS_AS(parse("2 +"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("1.2.3"), ParseError);
}

TEST_CASE("eval: precedence and associativity") {
  CHECK(eval(parse("2+3*4"), 0.0) == 14.0);
  CHECK(eval(parse("2^3^1"), 0.0) == 8.0);  // right-associative
  CHECK(eval(parse("-x^2"), 3.0) == -9.0);  // ^ binds tighter than unary -
  CHECK(eval(parse("2^-1"), 0.0) == 0.5);
  CHECK(eval(parse("x^2"), 3.0) == 9.0);
  CHECK(eval(parse("1e2 + 2.5e-1"), 0.0) == doctest::Approx(100.25));
}

TEST_CASE("eval: floor is the mathematical floor") {
  CHECK(eval(parse("floor(x)"), -0.5) == -1.0);
  CHECK(eval(parse("floor(x)"), 2.75) == 2.0);
}

TEST_CASE("eval: domain errors") {
  CHECK_THROWS_AS(eval(parse("ln(x)"), -1.0), EvalError);
  CHECK_THROWS_AS(eval(parse("sqrt(x)"), -4.0), EvalError);
  CHECK_THROWS_AS(eval(parse("1/x"), 0.0), EvalError);
  CHECK_THROWS_AS(eval(parse("exp(x)"), 1e6), EvalError);  // overflow reported
}

TEST_CASE("eval: cumulative integral of the sawtooth") {
  const Expr f = parse("I[floor(x) - x + 1/2]");
  EvalContext ctx;
  for (int n = 0; n <= 7; ++n) {
    CHECK(std::abs(eval(f, static_cast<double>(n), ctx)) < 1e-10);
  }
  for (double x : {0.5, 2.5, 7.25, 13.8}) {
    CHECK(std::abs(eval(f, x, ctx) - opcalc_test::sawtooth_antiderivative(x)) < 1e-10);
  }
}

TEST_CASE("power_sum: recognition") {
  auto terms = power_sum(parse("3 + 2*x"));
  REQUIRE(terms.has_value());
  REQUIRE(terms->size() == 2);
  CHECK((*terms)[0].coeff == 3.0);
  CHECK((*terms)[0].exponent == 0.0);
  CHECK((*terms)[1].coeff == 2.0);
  CHECK((*terms)[1].exponent == 1.0);

  CHECK(power_sum(parse("x^2/2 - x^0.5")).has_value());
  CHECK(power_sum(parse("sqrt(x)")).has_value());
  CHECK_FALSE(power_sum(parse("floor(x)")).has_value());
  CHECK_FALSE(power_sum(parse("sin(x)")).has_value());
  CHECK_FALSE(power_sum(parse("I[x]")).has_value());
}

TEST_CASE("antiderivative_exact: power rules") {
  auto f1 = antiderivative_exact(parse("x^2"));
  REQUIRE(f1.has_value());
  CHECK(eval(*f1, 3.0) == doctest::Approx(9.0));  // x^3/3 at 3

  auto f2 = antiderivative_exact(parse("3 + 2*x"));
  REQUIRE(f2.has_value());
  CHECK(eval(*f2, 2.0) == doctest::Approx(10.0));  // 3x + x^2 at 2

  CHECK_FALSE(antiderivative_exact(parse("floor(x)")).has_value());
  CHECK_FALSE(antiderivative_exact(parse("1/x")).has_value());  // exponent -1
}

TEST_CASE("antiderivative_exact: matches quadrature on random windows") {
  const Expr e = parse("2*x^2.5 - 0.5*x + 3 + x^0.5");
  auto anti = antiderivative_exact(e);
  REQUIRE(anti.has_value());
  EvalContext ctx;
  numerics::QuadConfig cfg;
  numerics::Integrand g;
  g.f = [&](double t) { return eval(e, t, ctx); };
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    double x1 = rng.uniform(0.0, 50.0);
    double x2 = rng.uniform(0.0, 50.0);
    if (x1 > x2) std::swap(x1, x2);
    const double direct = numerics::quad(g, x1, x2, cfg).value;
    const double viaF = eval(*anti, x2, ctx) - eval(*anti, x1, ctx);
    CHECK(std::abs(direct - viaF) <= 1e-7 * (1.0 + std::abs(direct)));
  }
}

namespace {

// Random expression generator for the round-trip property: power/trig sums
// with occasional function wrappers, always safe to evaluate on [0.1, 40].
Expr random_expr(Rng& rng, int depth) {
  const int pick = rng.uniform_int(0, depth > 2 ? 1 : 7);
  switch (pick) {
    case 0: return Expr::constant(rng.uniform(-5.0, 5.0));
    case 1: return Expr::var();
    case 2: return Expr::binary(NodeKind::add, random_expr(rng, depth + 1),
                                random_expr(rng, depth + 1));
    case 3: return Expr::binary(NodeKind::mul, random_expr(rng, depth + 1),
                                random_expr(rng, depth + 1));
    case 4: return Expr::binary(NodeKind::sub, random_expr(rng, depth + 1),
                                random_expr(rng, depth + 1));
    case 5:
      return Expr::binary(NodeKind::pow, Expr::var(),
                          Expr::constant(static_cast<double>(rng.uniform_int(0, 3))));
    case 6: return Expr::function(FnName::sin, random_expr(rng, depth + 1));
    default: return Expr::function(FnName::cos, random_expr(rng, depth + 1));
  }
}

}  // namespace

TEST_CASE("print/parse round trip preserves evaluation exactly") {
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    const Expr e = random_expr(rng, 0);
    const std::string text = to_string(e);
    const Expr back = parse(text);
    for (double x : {0.1, 1.0, 3.7, 17.0, 40.0}) {
      const double v1 = eval(e, x);
      const double v2 = eval(back, x);
      CHECK(v1 == v2);
    }
  }
}

TEST_CASE("parser totality: random garbage never crashes") {
  Rng rng(31337);
  const std::string charset = "x0123456789.+-*/^()[]I sincoeqrtablfpE";
  for (int i = 0; i < 20000; ++i) {
    const int len = rng.uniform_int(0, 24);
    std::string s;
    for (int j = 0; j < len; ++j) {
      s += charset[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(charset.size()) - 1))];
    }
    try {
      const Expr e = parse(s);
      (void)e;
    } catch (const ParseError& err) {
      CHECK(err.position() <= s.size());
    }
  }
}
