#include "opcalc/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace opcalc::numerics {

namespace {

double magnitude(double v) { return std::abs(v); }
double magnitude(const std::complex<double>& v) { return std::abs(v); }

bool finite(double v) { return std::isfinite(v); }
bool finite(const std::complex<double>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

template <typename T>
class AdaptiveSimpson {
 public:
  AdaptiveSimpson(const std::function<T(double)>& f, int max_depth, double eval_noise = 0.0,
                  double eval_noise_power = 0.0, double eval_noise_rel = 0.0)
      : f_(f), max_depth_(max_depth), eval_noise_(eval_noise),
        eval_noise_power_(eval_noise_power), eval_noise_rel_(eval_noise_rel) {}

  T eval(double x) const {
    T v = f_(x);
    if (!finite(v)) {
      throw NumericsError("non-finite integrand value at x = " + std::to_string(x));
    }
    return v;
  }

  /// Integrates one panel to an absolute tolerance budget.
  T panel(double a, double b, double tol) {
    if (!(b > a)) return T{};
    evals_ = 0;
    const double m = 0.5 * (a + b);
    const T fa = eval(a), fm = eval(m), fb = eval(b);
    const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return recurse(a, b, fa, fm, fb, whole, tol, 0);
  }

  double err_acc = 0.0;
  bool depth_exceeded = false;

 private:
  // Hard per-panel work cap; terminates runaway refinement even when the
  // caller's noise model understates the true evaluation error.
  static constexpr long kMaxEvalsPerPanel = 100000;

  T recurse(double a, double b, T fa, T fm, T fb, T whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const T flm = eval(lm), frm = eval(rm);
    evals_ += 2;
    const T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const T s2 = left + right;
    const double delta = magnitude(s2 - whole);
    // Once the interval degenerates below double resolution, subdividing
    // further only reshuffles rounding error.
    const bool vanishing = (m <= a || m >= b);
    // Evaluation-noise floor: a panel of width w cannot be resolved below
    // ~noise*w no matter how finely it is split.
    double noise_floor = 0.0;
    if (eval_noise_ > 0.0 || eval_noise_rel_ > 0.0) {
      const double mag =
          std::max({magnitude(fa), magnitude(fm), magnitude(fb), magnitude(flm)});
      noise_floor = 10.0 * (b - a) *
                    (eval_noise_ * std::pow(1.0 + std::abs(b), eval_noise_power_) +
                     eval_noise_rel_ * mag);
    }
    if (delta <= 15.0 * tol || delta <= noise_floor || vanishing) {
      err_acc += std::max(delta / 15.0, noise_floor);
      return s2 + (s2 - whole) / 15.0;
    }
    if (depth >= max_depth_ || evals_ > kMaxEvalsPerPanel) {
      depth_exceeded = true;
      err_acc += delta / 15.0;
      return s2 + (s2 - whole) / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }

  const std::function<T(double)>& f_;
  int max_depth_;
  double eval_noise_;
  double eval_noise_power_;
  double eval_noise_rel_;
  long evals_ = 0;
};

/// Splits [a, b] into the forced panel list implied by the integrand hints.
template <typename T>
std::vector<double> forced_panels(const BasicIntegrand<T>& integrand, double a, double b) {
  std::vector<double> cuts;
  cuts.push_back(a);
  if (integrand.integer_breakpoints) {
    if (b - a > 4e6) {
      throw NumericsError("quad: interval too wide for per-integer panel forcing");
    }
    double first = std::ceil(a);
    if (first <= a) first += 1.0;
    for (double t = first; t < b; t += 1.0) cuts.push_back(t);
  }
  for (double t : integrand.breakpoints) {
    if (t > a && t < b) cuts.push_back(t);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

/// Crude composite-Simpson magnitude estimate used to turn rel_tol into an
/// absolute budget before the adaptive pass.
template <typename T>
double crude_magnitude(AdaptiveSimpson<T>& rule, const std::vector<double>& cuts) {
  const int sub = cuts.size() > 256 ? 1 : 8;
  T total{};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double w = (cuts[i + 1] - cuts[i]) / sub;
    for (int s = 0; s < sub; ++s) {
      const double a = cuts[i] + s * w;
      const double b = a + w;
      const double m = 0.5 * (a + b);
      total += (b - a) / 6.0 * (rule.eval(a) + 4.0 * rule.eval(m) + rule.eval(b));
    }
  }
  return magnitude(total);
}

/// Integrates [0, upper] of an integrand that behaves like C x^a near 0 with
/// a singular/non-smooth exponent a > -1: geometric panels graded toward 0;
/// for a < 0 the innermost sliver is replaced by its power-law estimate,
/// which is also charged to err_est.
template <typename T>
T graded_zero_panel(AdaptiveSimpson<T>& rule, double upper, double a, double tol_budget,
                    double* extra_err) {
  const int kMaxPanels = 200;
  // Probe the scale constant near the inner end.
  double x_probe = upper * 1e-6;
  const double c_probe = magnitude(rule.eval(x_probe)) / std::pow(x_probe, a);

  double x_inner;
  if (a < 0.0) {
    // Choose the inner cutoff so the estimated remainder C x^{a+1}/(a+1)
    // stays within a fraction of the budget.
    const double target = 0.25 * tol_budget * (a + 1.0) / std::max(c_probe, 1e-300);
    x_inner = std::pow(std::max(target, 1e-300), 1.0 / (a + 1.0));
    x_inner = std::min(x_inner, upper * 0.25);
  } else {
    x_inner = upper * std::pow(0.5, 48);
  }
  int panels = static_cast<int>(std::ceil(std::log2(upper / std::max(x_inner, 1e-290))));
  panels = std::clamp(panels, 4, kMaxPanels);
  x_inner = upper * std::pow(0.5, panels);

  T total{};
  if (a < 0.0) {
    const double c_inner = magnitude(rule.eval(x_inner)) / std::pow(x_inner, a);
    const double remainder = c_inner * std::pow(x_inner, a + 1.0) / (a + 1.0);
    total += T(remainder);
    *extra_err += std::abs(remainder);
  } else {
    // Finite at 0; integrate the innermost sliver directly.
    const double m = 0.5 * x_inner;
    const T f0 = (a > 0.0) ? T{} : rule.eval(0.0);
    total += x_inner / 6.0 * (f0 + 4.0 * rule.eval(m) + rule.eval(x_inner));
  }
  const double per_panel = tol_budget / panels;
  double lo = x_inner;
  for (int j = panels - 1; j >= 1; --j) {
    const double hi = upper * std::pow(0.5, j - 1);
    total += rule.panel(lo, hi, per_panel);
    lo = hi;
  }
  return total;
}

template <typename T>
BasicQuadResult<T> quad_impl(const BasicIntegrand<T>& integrand, double a, double b,
                             const QuadConfig& cfg) {
  cfg.validate();
  if (!(std::isfinite(a) && std::isfinite(b)) || a > b) {
    throw NumericsError("quad: invalid interval");
  }
  BasicQuadResult<T> result;
  if (a == b) return result;

  AdaptiveSimpson<T> rule(integrand.f, cfg.max_depth, integrand.eval_noise,
                          integrand.eval_noise_power, integrand.eval_noise_rel);
  std::vector<double> cuts = forced_panels(integrand, a, b);

  const bool graded = integrand.power_at_zero.has_value() && a == 0.0 &&
                      (*integrand.power_at_zero < 0.0 ||
                       *integrand.power_at_zero != std::floor(*integrand.power_at_zero));
  double crude = 0.0;
  if (!graded) {
    crude = crude_magnitude(rule, cuts);
  } else {
    std::vector<double> tail_cuts(cuts.begin() + 1, cuts.end());
    if (tail_cuts.size() >= 2) crude = crude_magnitude(rule, tail_cuts);
  }
  const double tol_total = std::max(cfg.abs_tol, cfg.rel_tol * crude);
  const double width = b - a;

  T total{};
  double extra_err = 0.0;
  std::size_t first_panel = 0;
  if (graded) {
    const double budget = tol_total * (cuts[1] - a) / width;
    total += graded_zero_panel(rule, cuts[1], *integrand.power_at_zero, budget, &extra_err);
    first_panel = 1;
  }
  for (std::size_t i = first_panel; i + 1 < cuts.size(); ++i) {
    const double budget = tol_total * (cuts[i + 1] - cuts[i]) / width;
    total += rule.panel(cuts[i], cuts[i + 1], budget);
  }

  result.value = total;
  result.err_est = rule.err_acc + extra_err;
  result.status = rule.depth_exceeded ? QuadStatus::depth_exceeded : QuadStatus::ok;
  return result;
}

/// Estimates the scale constant C of a tail model by geometric sampling from
/// the onset outward; the scan extends far enough to see the asymptotic
/// regime even when the integrand peaks late (e.g. Laplace kernels).
template <typename T>
double estimate_tail_scale(const BasicIntegrand<T>& integrand, const TailModel& tail) {
  const double t0 = std::max(tail.onset, 1e-6);
  double c = 0.0;
  double x = t0;
  for (int j = 0; j < 64; ++j) {
    double model;
    if (tail.kind == TailModel::Kind::power) {
      model = std::pow(x, -tail.rate);
    } else {
      model = std::exp(-tail.rate * x);
      if (model < 1e-300) break;
    }
    const double fx = magnitude(integrand.f(x));
    if (std::isfinite(fx) && model > 0.0) c = std::max(c, fx / model);
    x *= 2.0;
    if (x > 1e15) break;
  }
  return 2.0 * std::max(c, 1e-300);  // factor 2 of sampling headroom
}

template <typename T>
BasicQuadResult<T> quad_semi_infinite_impl(const BasicIntegrand<T>& integrand,
                                           const TailModel& tail, const QuadConfig& cfg) {
  cfg.validate();
  if (tail.kind == TailModel::Kind::power && tail.rate <= 1.0) {
    throw NumericsError("quad_semi_infinite: power tail with exponent <= 1 diverges");
  }
  if (tail.kind == TailModel::Kind::exponential && tail.rate <= 0.0) {
    throw NumericsError("quad_semi_infinite: exponential tail needs a positive rate");
  }

  const double c = estimate_tail_scale(integrand, tail);
  double T_cut;
  double tail_bound;
  if (tail.kind == TailModel::Kind::power) {
    // Remaining mass <= C T^{1-p}/(p-1).
    T_cut = std::pow(c / (cfg.tail_tol * (tail.rate - 1.0)), 1.0 / (tail.rate - 1.0));
    T_cut = std::clamp(T_cut, std::max(tail.onset, 10.0), 1e12);
    tail_bound = c * std::pow(T_cut, 1.0 - tail.rate) / (tail.rate - 1.0);
  } else {
    // Remaining mass <= C e^{-sT}/s.
    T_cut = std::log(std::max(c / (cfg.tail_tol * tail.rate), 2.0)) / tail.rate;
    T_cut = std::max(T_cut, std::max(tail.onset, 1.0));
    tail_bound = c * std::exp(-tail.rate * T_cut) / tail.rate;
  }

  // Integrate in geometric chunks [0,1], [1,2], [2,4], ...: each chunk is
  // well scaled, so the relative-tolerance pass inside quad stays honest
  // across the many decades a truncation point can span.
  const int n_chunks =
      2 + std::max(0, static_cast<int>(std::ceil(std::log2(std::max(T_cut, 1.0)))));
  QuadConfig chunk_cfg = cfg;
  chunk_cfg.abs_tol = cfg.abs_tol / n_chunks;
  chunk_cfg.rel_tol = 0.25 * cfg.rel_tol;

  BasicQuadResult<T> result;
  double lo = 0.0;
  double hi = std::min(1.0, T_cut);
  for (;;) {
    const BasicQuadResult<T> r = quad_impl(integrand, lo, hi, chunk_cfg);
    result.value += r.value;
    result.err_est += r.err_est;
    if (r.status == QuadStatus::depth_exceeded) result.status = QuadStatus::depth_exceeded;
    if (hi >= T_cut) break;
    lo = hi;
    hi = std::min(2.0 * hi, T_cut);
  }
  result.err_est += tail_bound;
  return result;
}

}  // namespace

void QuadConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(tail_tol > 0.0)) {
    throw NumericsError("QuadConfig: tolerances must be positive");
  }
  if (max_depth < 10) {
    throw NumericsError("QuadConfig: max_depth must be at least 10");
  }
}

TailModel TailModel::power(double p, double onset) {
  return TailModel{Kind::power, p, onset};
}

TailModel TailModel::exponential(double s, double onset) {
  return TailModel{Kind::exponential, s, onset};
}

QuadResult quad(const Integrand& integrand, double a, double b, const QuadConfig& cfg) {
  return quad_impl(integrand, a, b, cfg);
}

ComplexQuadResult quad(const ComplexIntegrand& integrand, double a, double b,
                       const QuadConfig& cfg) {
  return quad_impl(integrand, a, b, cfg);
}

QuadResult quad_semi_infinite(const Integrand& integrand, const TailModel& tail,
                              const QuadConfig& cfg) {
  return quad_semi_infinite_impl(integrand, tail, cfg);
}

ComplexQuadResult quad_semi_infinite(const ComplexIntegrand& integrand, const TailModel& tail,
                                     const QuadConfig& cfg) {
  return quad_semi_infinite_impl(integrand, tail, cfg);
}

double CumulativeCache::highest_breakpoint() const {
  return breakpoints_.empty() ? 0.0 : breakpoints_.back();
}

double CumulativeCache::err_up_to(std::size_t index) const {
  return index < errs_.size() ? errs_[index] : (errs_.empty() ? 0.0 : errs_.back());
}

namespace {

/// Next rung of the fixed breakpoint ladder. Unit steps keep floor-bearing
/// integrands aligned with their kinks; smooth integrands switch to
/// geometric steps after 64 so far probes stay cheap.
double next_breakpoint(double current, bool unit_ladder) {
  if (unit_ladder || current < 64.0) return current + 1.0;
  return current * 1.5;
}

}  // namespace

double cumulative(const Integrand& integrand, double x, CumulativeCache& cache,
                  const QuadConfig& cfg, double* err_out) {
  if (!(x >= 0.0)) throw NumericsError("cumulative: x must be >= 0");
  // Per-panel budgets are kept well below abs_tol so differences of cached
  // prefix values still satisfy the quad contract after many panels.
  QuadConfig panel_cfg = cfg;
  panel_cfg.abs_tol = cfg.abs_tol / 64.0;
  panel_cfg.rel_tol = std::min(cfg.rel_tol, 1e-12);
  if (cache.breakpoints_.empty()) {
    cache.breakpoints_.push_back(0.0);
    cache.values_.push_back(0.0);
    cache.errs_.push_back(0.0);
    cache.unit_ladder_ = integrand.integer_breakpoints;
  }
  while (cache.breakpoints_.back() < x &&
         next_breakpoint(cache.breakpoints_.back(), cache.unit_ladder_) <= x) {
    const double lo = cache.breakpoints_.back();
    const double hi = next_breakpoint(lo, cache.unit_ladder_);
    const QuadResult r = quad(integrand, lo, hi, panel_cfg);
    cache.breakpoints_.push_back(hi);
    cache.values_.push_back(cache.values_.back() + r.value);
    cache.errs_.push_back(cache.errs_.back() + r.err_est);
  }
  // Largest cached breakpoint <= x.
  const auto it = std::upper_bound(cache.breakpoints_.begin(), cache.breakpoints_.end(), x);
  const std::size_t idx = static_cast<std::size_t>(it - cache.breakpoints_.begin()) - 1;
  double value = cache.values_[idx];
  double err = cache.errs_[idx];
  if (x > cache.breakpoints_[idx]) {
    const QuadResult r = quad(integrand, cache.breakpoints_[idx], x, panel_cfg);
    value += r.value;
    err += r.err_est;
  }
  if (err_out) *err_out = err;
  return value;
}

namespace {

/// Multiplies the coefficient polynomial `p` (monomial, ascending) by
/// (c0 + c1 x) in place semantics.
std::vector<double> poly_mul_linear(const std::vector<double>& p, double c0, double c1) {
  std::vector<double> out(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] += c0 * p[i];
    out[i + 1] += c1 * p[i];
  }
  return out;
}

}  // namespace

std::vector<double> lsq_solve(const std::vector<std::vector<double>>& columns,
                              const std::vector<double>& y,
                              const std::vector<double>& weights, double* residual_rms) {
  if (columns.empty()) throw NumericsError("lsq_solve: no columns");
  const std::size_t m = y.size();
  const std::size_t n = columns.size();
  for (const auto& col : columns) {
    if (col.size() != m) throw NumericsError("lsq_solve: column size mismatch");
  }
  if (m < n) throw NumericsError("lsq_solve: underdetermined system");

  Eigen::MatrixXd A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    for (std::size_t j = 0; j < n; ++j) {
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w * columns[j][i];
    }
    rhs(static_cast<Eigen::Index>(i)) = w * y[i];
  }

  // Column scaling for conditioning; undone after the solve.
  Eigen::VectorXd scale(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double norm = A.col(static_cast<Eigen::Index>(j)).norm();
    if (!(norm > 0.0)) throw NumericsError("lsq_solve: rank-deficient design (zero column)");
    scale(static_cast<Eigen::Index>(j)) = norm;
    A.col(static_cast<Eigen::Index>(j)) /= norm;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  if (qr.rank() < static_cast<Eigen::Index>(n)) {
    throw NumericsError("lsq_solve: rank-deficient design");
  }
  Eigen::VectorXd beta = qr.solve(rhs);
  if (residual_rms) {
    const Eigen::VectorXd res = A * beta - rhs;
    *residual_rms = std::sqrt(res.squaredNorm() / static_cast<double>(m));
  }
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = beta(static_cast<Eigen::Index>(j)) / scale(static_cast<Eigen::Index>(j));
  }
  return out;
}

PolyFit lsq_polyfit(const std::vector<double>& xs, const std::vector<double>& ys, int degree,
                    const std::vector<double>& weights) {
  if (degree < 0) throw NumericsError("lsq_polyfit: degree must be >= 0");
  if (xs.size() != ys.size()) throw NumericsError("lsq_polyfit: size mismatch");
  if (xs.size() < static_cast<std::size_t>(degree) + 2) {
    throw NumericsError("lsq_polyfit: need at least degree + 2 points");
  }
  const auto [min_it, max_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *min_it, hi = *max_it;
  if (!(hi > lo)) throw NumericsError("lsq_polyfit: x-values collapse");

  // Chebyshev basis on t in [-1, 1], t = (2x - (lo+hi))/(hi-lo).
  const double c1 = 2.0 / (hi - lo);
  const double c0 = -(hi + lo) / (hi - lo);
  const std::size_t m = xs.size();
  std::vector<std::vector<double>> columns(static_cast<std::size_t>(degree) + 1,
                                           std::vector<double>(m));
  std::vector<double> t(m);
  for (std::size_t i = 0; i < m; ++i) t[i] = c0 + c1 * xs[i];
  for (std::size_t i = 0; i < m; ++i) {
    double tkm1 = 1.0, tk = t[i];
    columns[0][i] = 1.0;
    if (degree >= 1) columns[1][i] = tk;
    for (int kdeg = 2; kdeg <= degree; ++kdeg) {
      const double tkp1 = 2.0 * t[i] * tk - tkm1;
      columns[static_cast<std::size_t>(kdeg)][i] = tkp1;
      tkm1 = tk;
      tk = tkp1;
    }
  }

  double rms = 0.0;
  const std::vector<double> beta = lsq_solve(columns, ys, weights, &rms);

  // Convert Chebyshev-in-t coefficients to monomials in x via the
  // recurrence T_{k+1}(t) = 2 t T_k(t) - T_{k-1}(t) with t = c0 + c1 x.
  std::vector<std::vector<double>> cheb_in_x;
  cheb_in_x.push_back({1.0});
  if (degree >= 1) cheb_in_x.push_back({c0, c1});
  for (int kdeg = 2; kdeg <= degree; ++kdeg) {
    std::vector<double> next = poly_mul_linear(cheb_in_x[static_cast<std::size_t>(kdeg - 1)],
                                               2.0 * c0, 2.0 * c1);
    const auto& prev = cheb_in_x[static_cast<std::size_t>(kdeg - 2)];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
    cheb_in_x.push_back(std::move(next));
  }

  PolyFit fit;
  fit.coeffs.assign(static_cast<std::size_t>(degree) + 1, 0.0);
  for (int kdeg = 0; kdeg <= degree; ++kdeg) {
    const auto& poly = cheb_in_x[static_cast<std::size_t>(kdeg)];
    for (std::size_t i = 0; i < poly.size(); ++i) {
      fit.coeffs[i] += beta[static_cast<std::size_t>(kdeg)] * poly[i];
    }
  }
  fit.residual_rms = rms;
  return fit;
}

}  // namespace opcalc::numerics
