#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opcalc/exact_form.hpp"
#include "opcalc/expr.hpp"
#include "opcalc/numerics.hpp"

namespace opcalc::algebra {

/// Caller-supplied bound legitimizing semi-infinite integrals:
/// power: |f(x)| <= C x^rate for x >= T0; exponential: |f(x)| <= C e^{rate x}.
struct GrowthCertificate {
  enum class Kind { power, exponential };
  Kind kind;
  double rate;
  double C;
  double T0 = 1.0;

  static GrowthCertificate power(double p, double C, double T0 = 1.0);
  static GrowthCertificate exponential(double s, double C, double T0 = 1.0);
};

/// An element of C_+(R): evaluable on [0, inf), clamped to exactly 0 for
/// x < 0. Closed-form bodies (power/trig sums) evaluate exactly; everything
/// else evaluates through deterministic quadrature with shared prefix
/// caches. Instances are cheap, shareable values; the caches follow the
/// numerics synchronization contract (external sync or one copy per thread,
/// identical results either way).
class CPlusFunction {
 public:
  CPlusFunction() = default;

  /// From a DSL expression; recognizes exact forms automatically.
  static CPlusFunction from_expr(expr::Expr body, numerics::QuadConfig cfg = {});
  static CPlusFunction from_exact(exact::ExactForm form, std::string label,
                                  numerics::QuadConfig cfg = {});
  /// Black-box evaluable (used internally for convolutions and adjusted
  /// primitives). integer_kinks/power_hint describe the raw body.
  static CPlusFunction from_callable(std::string label, std::function<double(double)> fn,
                                     bool integer_kinks, std::optional<double> power_hint,
                                     bool numeric_backed, numerics::QuadConfig cfg = {});

  /// The Heaviside function H (1 for x >= 0, 0 below).
  static CPlusFunction heaviside(numerics::QuadConfig cfg = {});

  bool valid() const { return static_cast<bool>(body_); }
  /// Evaluation, clamped to 0 on (-inf, 0).
  double operator()(double x) const;

  const std::string& label() const { return label_; }
  const std::optional<exact::ExactForm>& exact() const { return exact_; }
  const std::optional<expr::Expr>& body_expr() const { return expr_; }
  const std::optional<expr::Expr>& exact_antiderivative() const { return exact_antideriv_; }
  const std::optional<GrowthCertificate>& growth() const { return growth_; }
  const numerics::QuadConfig& quad_config() const { return cfg_; }

  /// True when evaluations go through quadrature (convolutions, cumulative
  /// integrals) rather than closed forms.
  bool numeric_backed() const { return numeric_backed_; }
  /// Coarse upper bound on the evaluation error at x (0 for closed forms).
  double err_hint(double x) const;

  /// Attaches a certificate after sample validation on [T0, 10 T0]
  /// (throws PreconditionError on violation); derived certificates computed
  /// by the algebra are attached directly.
  void attach_growth(const GrowthCertificate& cert);
  void set_growth_unchecked(const GrowthCertificate& cert) { growth_ = cert; }

  /// Quadrature view of the clamped function with structure hints.
  numerics::Integrand integrand() const;

  /// Moment prefix integral M_j(x) = integral_0^x t^j f(t) dt through the
  /// shared cache (numeric path of the Heaviside convolution).
  double moment_cumulative(int j, double x, double* err_out) const;

 private:
  std::string label_;
  std::function<double(double)> body_;  // raw, unclamped, defined on [0, inf)
  std::optional<expr::Expr> expr_;
  std::optional<exact::ExactForm> exact_;
  std::optional<expr::Expr> exact_antideriv_;
  std::optional<GrowthCertificate> growth_;
  numerics::QuadConfig cfg_;
  bool integer_kinks_ = false;
  std::optional<double> power_hint_;
  bool numeric_backed_ = false;
  double err_coeff_ = 0.0;
  double err_rel_coeff_ = 0.0;

  struct MomentCaches;
  std::shared_ptr<MomentCaches> moments_;
  std::shared_ptr<expr::EvalContext> eval_ctx_;
};

/// One weighted numerator term; operators carry sums of these so complex
/// scalars combine exactly while each body stays real.
struct WeightedTerm {
  std::complex<double> weight;
  CPlusFunction fn;
};

/// An element of the operator space M: (sum of weighted numerators) / H^k.
class Operator {
 public:
  Operator() = default;
  Operator(CPlusFunction f, int k);
  Operator(std::vector<WeightedTerm> terms, int k);

  static Operator zero_operator();

  int k() const { return k_; }
  const std::vector<WeightedTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Combined numerator value at x (clamped below 0).
  std::complex<double> numerator(double x) const;
  double numerator_err_hint(double x) const;
  bool numeric_backed() const;

  /// Max-envelope growth certificate across terms (nullopt if any term
  /// lacks one).
  std::optional<GrowthCertificate> growth_envelope() const;

  std::string label() const;
  const numerics::QuadConfig& quad_config() const;

 private:
  std::vector<WeightedTerm> terms_;
  int k_ = 1;
};

// --- Construction and ring operations --------------------------------------

/// (H^m * f)(x) = (1/(m-1)!) integral_0^x (x-t)^{m-1} f(t) dt; m >= 0 returns
/// f itself for m = 0. Exact when f has a closed form; otherwise evaluated
/// through per-moment prefix caches.
CPlusFunction heaviside_convolve(const CPlusFunction& f, int m);

/// (f * g)(x) = integral_0^x f(x-t) g(t) dt. Exact for pure power sums;
/// otherwise one quadrature per evaluation, split so each factor's
/// singularity at its own origin sits at an endpoint.
CPlusFunction convolve(const CPlusFunction& f, const CPlusFunction& g);

/// Pointwise scaled sum c1 f + c2 g as a new function.
CPlusFunction linear_combination(double c1, const CPlusFunction& f, double c2,
                                 const CPlusFunction& g);

/// c f(x) as a function.
CPlusFunction scaled_fn(double c, const CPlusFunction& f);

/// x f(x) as a function.
CPlusFunction mul_by_x_fn(const CPlusFunction& f);

/// W_f = (H * f)/H.
Operator embed(const CPlusFunction& f);

/// delta = H^2/H^2, the identity of the algebra (numerator x, k = 2).
Operator delta(numerics::QuadConfig cfg = {});

Operator add(const Operator& W, const Operator& V);
Operator scale(std::complex<double> c, const Operator& W);
Operator mul(const Operator& W, const Operator& V);

/// D(f/H^k) = f/H^{k+1}.
Operator derivative(const Operator& W);

/// xW = (x f - k (H*f))/H^k for k >= 2; k = 1 is auto-promoted by lift.
Operator mul_by_x(const Operator& W);

/// lift(W, m) = (H^m * f)/H^{k+m}; equal to W by construction.
Operator lift(const Operator& W, int m);

// --- Numeric equality (the cross-lift test) --------------------------------

struct EqualsOptions {
  double x_max = 50.0;
  int points = 256;
};

struct EqualsReport {
  bool equal = false;
  double max_diff = 0.0;
  double witness_x = 0.0;  // point of maximal discrepancy when unequal
  double scale = 1.0;      // 1 + max magnitude over the grid
  double quad_err = 0.0;   // accumulated quadrature error (inflates tol)
  double effective_tol = 0.0;
};

/// Semidecision W == V: cross-lifts the numerators (H^{V.k} * f_W versus
/// H^{W.k} * f_V) on a Chebyshev grid over [0, x_max]; true means "equal
/// within tolerance on the window".
EqualsReport equals(const Operator& W, const Operator& V, double tol,
                    const EqualsOptions& options = {});

/// Ascending Chebyshev abscissae on [0, x_max].
std::vector<double> chebyshev_grid(double x_max, int points);

/// Evaluates H^{m_extra} * (numerator of W) at ascending grid points;
/// err_out (optional) receives the worst-case accumulated quadrature error.
std::vector<std::complex<double>> numerator_on_grid(const Operator& W, int m_extra,
                                                    const std::vector<double>& grid,
                                                    double* err_out = nullptr);

}  // namespace opcalc::algebra
