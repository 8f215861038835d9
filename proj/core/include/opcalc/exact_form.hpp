#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opcalc/expr.hpp"

namespace opcalc::exact {

/// Closed-form function class
///   sum_i c_i x^{a_i}  +  p(x) sin x  +  q(x) cos x
/// with real exponents a_i > -1 and polynomial trig multipliers. The class is
/// closed under addition, scaling, multiplication by x, and the cumulative
/// integral from 0 — exactly the operations the operator algebra applies to
/// numerators — so functions recognized here evaluate exactly at any
/// abscissa, with no quadrature.
struct ExactForm {
  std::vector<expr::PowerTerm> powers;  // exponent-sorted, merged
  std::vector<double> sin_poly;         // monomial coefficients, ascending
  std::vector<double> cos_poly;

  bool is_zero() const;
  bool pure_power() const { return sin_poly.empty() && cos_poly.empty(); }

  double eval(double x) const;

  ExactForm scaled(double c) const;
  ExactForm plus(const ExactForm& other) const;
  ExactForm mul_by_x() const;
  /// integral over [0, x]
  ExactForm cumulative() const;
  /// m-fold cumulative (the kernel (x-t)^{m-1}/(m-1)! convolution); m >= 0.
  ExactForm heaviside(int m) const;

  /// Smallest power exponent, if any power term exists (singularity hint).
  std::optional<double> min_power_exponent() const;
  /// Exponent of the dominant growth: max power exponent vs. trig degree.
  double growth_exponent() const;
  /// Crude coefficient-magnitude bound matching growth_exponent.
  double growth_scale() const;

  static ExactForm zero();
  static ExactForm power(double coeff, double exponent);
  static ExactForm sin_term(double coeff, int degree = 0);
  static ExactForm cos_term(double coeff, int degree = 0);
};

/// Recognizes DSL expressions that live in the class: power sums, sin(x),
/// cos(x), products of integer-power sums with trig terms, sums/differences
/// of those, and one-level cumulative integrals of recognized forms.
std::optional<ExactForm> from_expr(const expr::Expr& e);

/// Human-readable rendering (for labels and reports).
std::string to_string(const ExactForm& form);

}  // namespace opcalc::exact
