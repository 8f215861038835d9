#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "opcalc/algebra.hpp"
#include "support/test_support.hpp"

using namespace opcalc;
using namespace opcalc::algebra;
using opcalc_test::Rng;

namespace {

CPlusFunction fn(const char* text) { return CPlusFunction::from_expr(expr::parse(text)); }

Operator random_operator(Rng& rng) {
  exact::ExactForm form;
  const double exponents[] = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  const int nterms = rng.uniform_int(1, 3);
  for (int i = 0; i < nterms; ++i) {
    form = form.plus(
        exact::ExactForm::power(rng.uniform(-3.0, 3.0), exponents[rng.uniform_int(0, 6)]));
  }
  if (rng.uniform_int(0, 1)) form = form.plus(exact::ExactForm::sin_term(rng.uniform(-2.0, 2.0)));
  if (rng.uniform_int(0, 1)) form = form.plus(exact::ExactForm::cos_term(rng.uniform(-2.0, 2.0)));
  return Operator(CPlusFunction::from_exact(form, ""), rng.uniform_int(1, 4));
}

constexpr double kTol = 1e-7;

}  // namespace

TEST_CASE("CPlusFunction: clamps to zero below 0") {
  const CPlusFunction f = fn("x^2 + 1");
  CHECK(f(-0.5) == 0.0);
  CHECK(f(-100.0) == 0.0);
  CHECK(f(2.0) == 5.0);
}

TEST_CASE("heaviside_convolve: H, powers, composition") {
  const CPlusFunction H = CPlusFunction::heaviside();
  // H^1 * H = x on x >= 0 (this is H^2).
  const CPlusFunction h2 = heaviside_convolve(H, 1);
  CHECK(h2(3.0) == doctest::Approx(3.0));
  // H^2 * H = x^2/2.
  const CPlusFunction h3 = heaviside_convolve(H, 2);
  CHECK(h3(4.0) == doctest::Approx(8.0));
  // Power rule: H * x^{1/2} = (2/3) x^{3/2}.
  const CPlusFunction r = heaviside_convolve(fn("x^0.5"), 1);
  CHECK(r(4.0) == doctest::Approx((2.0 / 3.0) * 8.0).epsilon(1e-12));
}

TEST_CASE("heaviside_convolve: numeric moment path agrees with the exact path") {
  // Same function, once recognized exactly and once as a black box.
  const CPlusFunction exact_sin = fn("sin(x)");
  REQUIRE(exact_sin.exact().has_value());
  const CPlusFunction numeric_sin = CPlusFunction::from_callable(
      "sin-blackbox", [](double x) { return std::sin(x); }, false, std::nullopt, false);
  for (int m : {1, 2, 3, 4}) {
    const CPlusFunction a = heaviside_convolve(exact_sin, m);
    const CPlusFunction b = heaviside_convolve(numeric_sin, m);
    for (double x : {0.5, 3.0, 17.0, 42.0}) {
      CHECK(std::abs(a(x) - b(x)) <= 1e-8 * (1.0 + std::abs(a(x))));
    }
  }
}

TEST_CASE("heaviside_convolve: semigroup property H^{m1+m2} = H^{m1}(H^{m2} f)") {
  const CPlusFunction f = fn("x^1.5 + sin(x)");
  const CPlusFunction lhs = heaviside_convolve(f, 3);
  const CPlusFunction rhs = heaviside_convolve(heaviside_convolve(f, 2), 1);
  for (double x : {1.0, 10.0, 30.0}) {
    CHECK(std::abs(lhs(x) - rhs(x)) <= 1e-9 * (1.0 + std::abs(lhs(x))));
  }
}

TEST_CASE("convolve: pinned values") {
  const CPlusFunction H = CPlusFunction::heaviside();
  CHECK(convolve(H, H)(2.0) == doctest::Approx(2.0));
  // (x * x)(3) = 3^3/6 = 4.5.
  const CPlusFunction x = fn("x");
  CHECK(convolve(x, x)(3.0) == doctest::Approx(4.5).epsilon(1e-10));
}

TEST_CASE("convolve: commutativity at random points") {
  const CPlusFunction f = fn("sin(x)");
  const CPlusFunction g = fn("x^0.5");
  const CPlusFunction fg = convolve(f, g);
  const CPlusFunction gf = convolve(g, f);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const double x = rng.uniform(0.1, 30.0);
    CHECK(std::abs(fg(x) - gf(x)) <= 1e-8 * (1.0 + std::abs(fg(x))));
  }
}

TEST_CASE("equals: reflexive, representative-invariant, separating") {
  const Operator W = embed(fn("x"));
  CHECK(equals(W, W, kTol).equal);
  CHECK(equals(W, lift(W, 3), kTol).equal);

  // delta as H^2/H^2 and H^3/H^3.
  const Operator d2 = delta();
  const Operator d3(fn("x^2/2"), 3);
  CHECK(equals(d2, d3, kTol).equal);

  const EqualsReport sep = equals(embed(fn("x")), embed(fn("x + 0.01")), kTol);
  CHECK_FALSE(sep.equal);
  CHECK(sep.witness_x > 25.0);  // witness near the top of the window
}

TEST_CASE("delta is a two-sided multiplicative identity") {
  const Operator d = delta();
  CHECK(equals(mul(d, d), d, kTol).equal);
  Rng rng(11);
  for (int i = 0; i < 5; ++i) {
    const Operator W = random_operator(rng);
    CHECK(equals(mul(d, W), W, kTol).equal);
    CHECK(equals(mul(W, d), W, kTol).equal);
  }
}

TEST_CASE("add/scale: W - W = 0") {
  Rng rng(17);
  for (int i = 0; i < 5; ++i) {
    const Operator W = random_operator(rng);
    const Operator diff = add(W, scale(-1.0, W));
    CHECK(equals(diff, Operator::zero_operator(), kTol).equal);
  }
}

TEST_CASE("mul: H * H = embed(x) up to representative") {
  const Operator HH = mul(embed(CPlusFunction::heaviside()), embed(CPlusFunction::heaviside()));
  CHECK(equals(HH, embed(fn("x")), kTol).equal);
}

TEST_CASE("derivative: structural k+1 and DW_f = W_{f'}") {
  const Operator W = embed(fn("x^2"));
  CHECK(derivative(W).k() == W.k() + 1);
  CHECK(equals(derivative(W), embed(fn("2*x")), kTol).equal);
  // D of the embedded Heaviside is delta.
  CHECK(equals(derivative(embed(CPlusFunction::heaviside())), delta(), kTol).equal);
}

TEST_CASE("mul_by_x: xW_f = W_{xf}") {
  const Operator W = embed(fn("sin(x)"));
  const EqualsReport r = equals(mul_by_x(W), embed(fn("x*sin(x)")), kTol);
  CHECK(r.equal);
}

TEST_CASE("mul_by_x: x delta = 0 exactly") {
  const EqualsReport r = equals(mul_by_x(delta()), Operator::zero_operator(), 1e-12);
  CHECK(r.equal);
  CHECK(r.max_diff <= 1e-12);
}

TEST_CASE("Leibniz: D(xW) = W + xDW on randomized operators") {
  Rng rng(23);
  for (int i = 0; i < 5; ++i) {
    const Operator W = random_operator(rng);
    const Operator lhs = derivative(mul_by_x(W));
    const Operator rhs = add(W, mul_by_x(derivative(W)));
    CHECK(equals(lhs, rhs, kTol).equal);
  }
}

TEST_CASE("lift: identity at m = 0 and numerator of lift(delta, 1)") {
  const Operator d = delta();
  CHECK(lift(d, 0).k() == 2);
  const Operator L = lift(d, 1);
  CHECK(L.k() == 3);
  CHECK(L.numerator(4.0).real() == doctest::Approx(8.0));  // x^2/2 at 4
}

TEST_CASE("embedding homomorphism: embed(f) embed(g) = embed(f*g)") {
  const CPlusFunction f = fn("x + sin(x)");
  const CPlusFunction g = fn("cos(x)");
  const Operator lhs = mul(embed(f), embed(g));
  const Operator rhs = embed(convolve(f, g));
  CHECK(equals(lhs, rhs, kTol).equal);
}

TEST_CASE("ring axioms on samples") {
  Rng rng(31);
  for (int i = 0; i < 3; ++i) {
    const Operator A = random_operator(rng);
    const Operator B = random_operator(rng);
    const Operator C = random_operator(rng);
    CHECK(equals(add(A, B), add(B, A), kTol).equal);
    CHECK(equals(add(add(A, B), C), add(A, add(B, C)), kTol).equal);
    CHECK(equals(mul(A, B), mul(B, A), kTol).equal);
    // Distributivity.
    CHECK(equals(mul(A, add(B, C)), add(mul(A, B), mul(A, C)), kTol).equal);
  }
}

TEST_CASE("complex scalars combine exactly") {
  const Operator W = embed(fn("x"));
  const std::complex<double> c(2.0, -3.0);
  const Operator sum = add(scale(c, W), scale(-c, W));
  CHECK(equals(sum, Operator::zero_operator(), 1e-12).equal);
  const std::complex<double> v = scale(c, W).numerator(2.0);
  CHECK(v.real() == doctest::Approx(2.0 * 2.0));   // H*x = x^2/2 -> 2 at x=2
  CHECK(v.imag() == doctest::Approx(-3.0 * 2.0));
}

TEST_CASE("growth certificates: validation accepts true bounds, rejects false ones") {
  CPlusFunction f = fn("x^2");
  CHECK_NOTHROW(f.attach_growth(GrowthCertificate::power(2.0, 1.5, 1.0)));
  CHECK_THROWS_AS(f.attach_growth(GrowthCertificate::power(1.0, 1.0, 1.0)),
                  PreconditionError);
  CPlusFunction g = fn("exp(x)");
  CHECK_NOTHROW(g.attach_growth(GrowthCertificate::exponential(1.0, 1.1, 1.0)));
  CHECK_THROWS_AS(g.attach_growth(GrowthCertificate::exponential(0.5, 1.0, 1.0)),
                  PreconditionError);
}

TEST_CASE("growth envelope propagation") {
  CPlusFunction f = fn("x^2");
  // Exact-form functions carry an automatic power certificate.
  REQUIRE(f.growth().has_value());
  CHECK(f.growth()->rate == doctest::Approx(2.0));
  const CPlusFunction hf = heaviside_convolve(f, 1);
  REQUIRE(hf.growth().has_value());
  CHECK(hf.growth()->rate == doctest::Approx(3.0));
  const CPlusFunction xf = mul_by_x_fn(f);
  REQUIRE(xf.growth().has_value());
  CHECK(xf.growth()->rate == doctest::Approx(3.0));
}

TEST_CASE("numerator of the Stirling operator: bounded, zero at integers") {
  const CPlusFunction f = fn("I[floor(x) - x + 1/2]");
  CHECK(f.numeric_backed());
  for (int n = 0; n <= 12; ++n) {
    CHECK(std::abs(f(static_cast<double>(n))) < 1e-9);
  }
  for (double x = 0.05; x < 12.0; x += 0.173) {
    CHECK(std::abs(f(x)) <= 0.5);
    CHECK(std::abs(f(x) - opcalc_test::sawtooth_antiderivative(x)) < 1e-9);
  }
}
