#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

// Shared oracles and helpers for the test suites. Everything here is
// independent of the library paths it is used to check.

namespace opcalc_test {

// Exact antiderivative of the sawtooth g(t) = floor(t) - t + 1/2 for t >= 0:
// on each unit interval [n, n+1], F(n + u) = u(1-u)/2, so F is 1-periodic,
// vanishes at integers, and is bounded by 1/8.
inline double sawtooth_antiderivative(double x) {
  const double u = x - std::floor(x);
  return 0.5 * u * (1.0 - u);
}

inline double sawtooth(double t) { return std::floor(t) - t + 0.5; }

// Closed form for the classical Stieltjes transform of x^nu:
//   integral_0^inf x^nu (x+z)^{-rho-1} dx = z^{nu-rho} B(nu+1, rho-nu)
// computed with std::lgamma (not the library's gamma).
inline std::complex<double> stieltjes_power_oracle(double nu, double rho,
                                                   std::complex<double> z) {
  const double lb = std::lgamma(nu + 1.0) + std::lgamma(rho - nu) - std::lgamma(rho + 1.0);
  return std::pow(z, nu - rho) * std::exp(lb);
}

// Laplace transform of x^n (integer n >= 0): n! / z^{n+1}.
inline std::complex<double> laplace_monomial_oracle(int n, std::complex<double> z) {
  double fact = 1.0;
  for (int j = 2; j <= n; ++j) fact *= j;
  return fact / std::pow(z, n + 1);
}

// Deterministic uniform double in [lo, hi) from a splitmix64-style stream;
// keeps randomized suites identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace opcalc_test
