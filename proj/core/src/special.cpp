#include "opcalc/special.hpp"

#include <cmath>

namespace opcalc::special {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Lanczos approximation, g = 7, 9 terms.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::floor(x);
}

bool is_nonpositive_integer(const std::complex<double>& z) {
  return z.imag() == 0.0 && is_nonpositive_integer(z.real());
}

/// Lanczos core for x >= 0.5: returns Gamma(x).
double gamma_lanczos(double x) {
  const double t = x - 1.0;
  double series = kLanczos[0];
  for (int i = 1; i < 9; ++i) series += kLanczos[i] / (t + i);
  const double w = t + kLanczosG + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(w, t + 0.5) * std::exp(-w) * series;
}

double log_gamma_lanczos(double x) {
  const double t = x - 1.0;
  double series = kLanczos[0];
  for (int i = 1; i < 9; ++i) series += kLanczos[i] / (t + i);
  const double w = t + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (t + 0.5) * std::log(w) - w + std::log(series);
}

// B_{2n}/(2n) for the asymptotic digamma series.
constexpr double kDigammaAsymptotic[7] = {
    1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0,
    1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0,
};

}  // namespace

void SpecialConfig::validate() const {
  if (!(series_tol > 0.0)) throw NumericsError("SpecialConfig: series_tol must be positive");
  if (recurrence_shift < 6) {
    throw NumericsError("SpecialConfig: recurrence_shift must be at least 6");
  }
}

double gamma(double x) {
  if (is_nonpositive_integer(x)) {
    throw AdmissibilityError("gamma: pole at nonpositive integer x = " + std::to_string(x));
  }
  if (x < 0.5) {
    // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
    return kPi / (std::sin(kPi * x) * gamma_lanczos(1.0 - x));
  }
  if (x > 171.7) {
    throw NumericsError("gamma: overflow for x = " + std::to_string(x) +
                        "; use log_gamma instead");
  }
  // The direct Lanczos product overflows its w^{t+1/2} factor long before
  // Gamma itself does; go through the log form once x is large.
  if (x > 20.0) return std::exp(log_gamma_lanczos(x));
  return gamma_lanczos(x);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw AdmissibilityError("log_gamma: requires x > 0");
  return log_gamma_lanczos(x);
}

std::complex<double> digamma(std::complex<double> z, const SpecialConfig& cfg) {
  cfg.validate();
  if (is_nonpositive_integer(z)) {
    throw AdmissibilityError("digamma: pole at nonpositive integer");
  }
  // psi(z) = psi(z + n) - sum_{j=0}^{n-1} 1/(z + j); shift until the
  // asymptotic series is safe (at least recurrence_shift applications).
  std::complex<double> shift(0.0, 0.0);
  std::complex<double> w = z;
  int applied = 0;
  while (applied < cfg.recurrence_shift ||
         std::abs(w) < static_cast<double>(cfg.recurrence_shift)) {
    shift += 1.0 / w;
    w += 1.0;
    ++applied;
    if (applied > 4 * cfg.recurrence_shift + 64) break;
  }
  // Asymptotic series at w: psi(w) ~ ln w - 1/(2w) - sum B_{2n}/(2n w^{2n}).
  const std::complex<double> inv = 1.0 / w;
  const std::complex<double> inv2 = inv * inv;
  std::complex<double> sum = std::log(w) - 0.5 * inv;
  std::complex<double> p = inv2;
  for (double coeff : kDigammaAsymptotic) {
    sum -= coeff * p;
    p *= inv2;
  }
  return sum - shift;
}

std::complex<double> digamma_series(std::complex<double> z, long long terms,
                                    bool apply_tail_correction) {
  if (is_nonpositive_integer(z)) {
    throw AdmissibilityError("digamma_series: pole at nonpositive integer");
  }
  std::complex<double> sum(-kEulerGamma, 0.0);
  for (long long n = 0; n < terms; ++n) {
    const double dn = static_cast<double>(n);
    sum += 1.0 / (dn + 1.0) - 1.0 / (z + dn);
  }
  if (apply_tail_correction) {
    // Remaining sum_{n>=N} [1/(n+1) - 1/(n+z)] via Euler-Maclaurin:
    // integral + half endpoint + first derivative correction.
    const double N = static_cast<double>(terms);
    const std::complex<double> a(N + 1.0, 0.0);
    const std::complex<double> b = z + N;
    sum += std::log(b / a);
    sum += 0.5 * (1.0 / a - 1.0 / b);
    sum += (1.0 / 12.0) * (1.0 / (b * b) - 1.0 / (a * a));
  }
  return sum;
}

double pochhammer(double r, int k) {
  if (!(r > -1.0)) throw AdmissibilityError("pochhammer: requires r > -1");
  if (k < 0) throw AdmissibilityError("pochhammer: requires k >= 0");
  double prod = 1.0;
  for (int j = 1; j <= k; ++j) prod *= r + static_cast<double>(j);
  return prod;
}

}  // namespace opcalc::special
