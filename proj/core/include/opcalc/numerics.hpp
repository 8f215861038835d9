#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "opcalc/errors.hpp"

namespace opcalc::numerics {

/// Tolerances shared by every quadrature-backed operation.
struct QuadConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_depth = 60;
  /// Truncation budget for semi-infinite integrals.
  double tail_tol = 1e-10;

  /// Throws NumericsError unless all tolerances are positive and
  /// max_depth >= 10.
  void validate() const;
};

/// An integration target plus the structure hints the adaptive driver
/// exploits. The hints never change the value, only how fast and how
/// reliably the tolerance is met.
template <typename T>
struct BasicIntegrand {
  std::function<T(double)> f;
  /// Force panel boundaries at integer abscissae (integrands built from
  /// floor() have derivative jumps exactly there).
  bool integer_breakpoints = false;
  /// Extra forced panel boundaries (kinks at known interior points).
  std::vector<double> breakpoints;
  /// f behaves like C*x^a near x = 0 with a non-smooth exponent; panels are
  /// graded geometrically toward 0. Required when a < 0 (f(0) is not finite).
  std::optional<double> power_at_zero;
  /// Evaluation-noise model: absolute part eval_noise * (1+|x|)^eval_noise_power
  /// plus eval_noise_rel * |f| near the panel. The driver stops refining once
  /// the Richardson delta sinks below the noise a panel can carry
  /// (quadrature-backed integrands cannot be resolved past their own error
  /// floor).
  double eval_noise = 0.0;
  double eval_noise_power = 0.0;
  double eval_noise_rel = 0.0;
};

using Integrand = BasicIntegrand<double>;
using ComplexIntegrand = BasicIntegrand<std::complex<double>>;

enum class QuadStatus { ok, depth_exceeded };

/// Quadrature outcome. A depth_exceeded status still carries the best value
/// and the accumulated error estimate.
template <typename T>
struct BasicQuadResult {
  T value{};
  double err_est = 0.0;
  QuadStatus status = QuadStatus::ok;

  bool ok() const { return status == QuadStatus::ok; }
};

using QuadResult = BasicQuadResult<double>;
using ComplexQuadResult = BasicQuadResult<std::complex<double>>;

/// Adaptive Simpson integration of f over the finite interval [a, b].
/// Contract: |value - integral| <= max(abs_tol, rel_tol*|value|) for
/// piecewise-smooth integrands whose discontinuities are covered by the
/// breakpoint hints.
QuadResult quad(const Integrand& integrand, double a, double b, const QuadConfig& cfg);
ComplexQuadResult quad(const ComplexIntegrand& integrand, double a, double b,
                       const QuadConfig& cfg);

/// Caller-asserted decay of an integrand on [onset, infinity); used to pick
/// the truncation point of semi-infinite integrals. The scale constant C is
/// estimated by sampling, the shape is the caller's hypothesis.
struct TailModel {
  enum class Kind { power, exponential };
  Kind kind;
  /// Power: |f(x)| <= C x^{-rate} with rate > 1. Exponential: |f(x)| <=
  /// C e^{-rate x} with rate > 0.
  double rate;
  double onset = 1.0;

  static TailModel power(double p, double onset = 1.0);
  static TailModel exponential(double s, double onset = 1.0);
};

/// Integrates f over [0, infinity): truncates at T with the modeled tail
/// bound below tail_tol, integrates [0, T], and folds the tail bound into
/// err_est (the tail itself is not added to the value).
QuadResult quad_semi_infinite(const Integrand& integrand, const TailModel& tail,
                              const QuadConfig& cfg);
ComplexQuadResult quad_semi_infinite(const ComplexIntegrand& integrand, const TailModel& tail,
                                     const QuadConfig& cfg);

/// Persistent prefix-integral table for one integrand/config pair: strictly
/// increasing breakpoints starting at 0 with stored values of the integral
/// from 0. Extended on demand; the ladder is fixed, so cached values do not
/// depend on the order of queries.
class CumulativeCache {
 public:
  CumulativeCache() = default;

  std::size_t size() const { return breakpoints_.size(); }
  double highest_breakpoint() const;
  /// Accumulated quadrature error estimate up to the given breakpoint index.
  double err_up_to(std::size_t index) const;

 private:
  friend double cumulative(const Integrand&, double, CumulativeCache&, const QuadConfig&,
                           double*);

  std::vector<double> breakpoints_;  // breakpoints_[0] == 0 once initialized
  std::vector<double> values_;       // integral of f over [0, breakpoints_[i]]
  std::vector<double> errs_;         // cumulative err_est at breakpoints_[i]
  bool unit_ladder_ = false;
};

/// Integral of f over [0, x] (x >= 0) through the cache. Satisfies
/// cumulative(x2) - cumulative(x1) = quad(f, x1, x2) within 2*abs_tol.
double cumulative(const Integrand& integrand, double x, CumulativeCache& cache,
                  const QuadConfig& cfg, double* err_out = nullptr);

/// Least-squares polynomial fit result; coefficients are monomial,
/// ascending degree.
struct PolyFit {
  std::vector<double> coeffs;
  double residual_rms = 0.0;
};

/// Weighted least-squares fit of degree `degree`, solved in a Chebyshev
/// basis recentered on [min x, max x] for conditioning and converted back to
/// monomial coefficients. Requires >= degree + 2 points with distinct x.
PolyFit lsq_polyfit(const std::vector<double>& xs, const std::vector<double>& ys, int degree,
                    const std::vector<double>& weights = {});

/// General dense weighted least squares: minimizes
/// sum_i w_i^2 (sum_j columns[j][i] beta_j - y_i)^2 over beta.
/// Throws NumericsError on rank deficiency.
std::vector<double> lsq_solve(const std::vector<std::vector<double>>& columns,
                              const std::vector<double>& y,
                              const std::vector<double>& weights = {},
                              double* residual_rms = nullptr);

}  // namespace opcalc::numerics
