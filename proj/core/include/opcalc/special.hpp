#pragma once

#include <complex>

#include "opcalc/errors.hpp"

namespace opcalc::special {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kLnSqrtTwoPi = 0.91893853320467274178032973640561764;

struct SpecialConfig {
  double series_tol = 1e-12;
  /// Upward-recurrence depth before the asymptotic digamma series applies.
  int recurrence_shift = 12;

  void validate() const;
};

/// Euler Gamma function on the real line (Lanczos g = 7, 9 terms; reflection
/// below 1/2). Relative error <= 1e-12 for |x| <= 170. Throws
/// AdmissibilityError at nonpositive integers, NumericsError on overflow.
double gamma(double x);

/// log |Gamma(x)| for x > 0, valid far beyond the overflow point of gamma().
double log_gamma(double x);

/// Digamma on the complex plane minus the nonpositive integers: upward
/// recurrence psi(z) = psi(z+1) - 1/z applied cfg.recurrence_shift times,
/// then the asymptotic Bernoulli series.
std::complex<double> digamma(std::complex<double> z, const SpecialConfig& cfg = {});

/// Slow reference: the Weierstrass-product series
///   psi(z) = -euler_gamma + sum_{n=0}^{terms-1} (1/(n+1) - 1/(n+z)),
/// independent of digamma() above. With apply_tail_correction the remaining
/// sum is estimated by Euler-Maclaurin, giving near-machine accuracy at
/// modest term counts; without it the raw partial sum is returned.
std::complex<double> digamma_series(std::complex<double> z, long long terms,
                                    bool apply_tail_correction = true);

/// Rising factorial (r+1)_k = (r+1)(r+2)...(r+k) for r > -1, k >= 0.
double pochhammer(double r, int k);

}  // namespace opcalc::special
