#include "opcalc/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace opcalc::algebra {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double beta_function(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double binomial(int n, int j) {
  double v = 1.0;
  for (int i = 1; i <= j; ++i) v = v * static_cast<double>(n - i + 1) / static_cast<double>(i);
  return v;
}

double factorial(int n) {
  double v = 1.0;
  for (int i = 2; i <= n; ++i) v *= static_cast<double>(i);
  return v;
}

/// Max of |f| over a light geometric/linear sample of [0, hi].
double sampled_sup(const CPlusFunction& f, double hi) {
  double sup = 0.0;
  for (int i = 0; i <= 24; ++i) {
    const double x = hi * static_cast<double>(i) / 24.0;
    sup = std::max(sup, std::abs(f(x)));
  }
  return sup;
}

}  // namespace

GrowthCertificate GrowthCertificate::power(double p, double C, double T0) {
  return {Kind::power, p, C, T0};
}

GrowthCertificate GrowthCertificate::exponential(double s, double C, double T0) {
  return {Kind::exponential, s, C, T0};
}

// ---------------------------------------------------------------------------
// CPlusFunction
// ---------------------------------------------------------------------------

struct CPlusFunction::MomentCaches {
  std::vector<std::shared_ptr<numerics::CumulativeCache>> by_moment;
};

CPlusFunction CPlusFunction::from_expr(expr::Expr body, numerics::QuadConfig cfg) {
  CPlusFunction f;
  f.label_ = expr::to_string(body);
  f.cfg_ = cfg;
  f.expr_ = body;
  f.exact_ = exact::from_expr(body);
  f.exact_antideriv_ = expr::antiderivative_exact(body);
  f.integer_kinks_ = body.references_floor();
  f.eval_ctx_ = std::make_shared<expr::EvalContext>();
  f.eval_ctx_->quad = cfg;
  f.moments_ = std::make_shared<MomentCaches>();
  if (f.exact_) {
    f.numeric_backed_ = false;
    f.err_coeff_ = 0.0;
    if (auto mn = f.exact_->min_power_exponent()) f.power_hint_ = *mn;
    f.growth_ = GrowthCertificate::power(f.exact_->growth_exponent(),
                                         1.1 * f.exact_->growth_scale(), 1.0);
    const exact::ExactForm form = *f.exact_;
    f.body_ = [form](double x) { return form.eval(x); };
  } else {
    f.numeric_backed_ = body.has_cumint();
    f.err_coeff_ = f.numeric_backed_ ? 4.0 * cfg.abs_tol : 1e-15;
    f.err_rel_coeff_ = f.numeric_backed_ ? 4.0 * cfg.rel_tol : 1e-14;
    auto ctx = f.eval_ctx_;
    const expr::Expr e = body;
    f.body_ = [e, ctx](double x) { return expr::eval(e, x, *ctx); };
  }
  return f;
}

CPlusFunction CPlusFunction::from_exact(exact::ExactForm form, std::string label,
                                        numerics::QuadConfig cfg) {
  CPlusFunction f;
  f.label_ = label.empty() ? exact::to_string(form) : std::move(label);
  f.cfg_ = cfg;
  f.exact_ = form;
  f.moments_ = std::make_shared<MomentCaches>();
  if (auto mn = form.min_power_exponent()) f.power_hint_ = *mn;
  f.growth_ =
      GrowthCertificate::power(form.growth_exponent(), 1.1 * form.growth_scale(), 1.0);
  f.body_ = [form](double x) { return form.eval(x); };
  return f;
}

CPlusFunction CPlusFunction::from_callable(std::string label, std::function<double(double)> fn,
                                           bool integer_kinks, std::optional<double> power_hint,
                                           bool numeric_backed, numerics::QuadConfig cfg) {
  CPlusFunction f;
  f.label_ = std::move(label);
  f.cfg_ = cfg;
  f.body_ = std::move(fn);
  f.integer_kinks_ = integer_kinks;
  f.power_hint_ = power_hint;
  f.numeric_backed_ = numeric_backed;
  f.err_coeff_ = numeric_backed ? 4.0 * cfg.abs_tol : 1e-15;
  f.err_rel_coeff_ = numeric_backed ? 4.0 * cfg.rel_tol : 1e-14;
  f.moments_ = std::make_shared<MomentCaches>();
  return f;
}

CPlusFunction CPlusFunction::heaviside(numerics::QuadConfig cfg) {
  CPlusFunction f = from_exact(exact::ExactForm::power(1.0, 0.0), "1", cfg);
  f.growth_ = GrowthCertificate::power(0.0, 1.0, 1.0);
  return f;
}

double CPlusFunction::operator()(double x) const {
  if (x < 0.0) return 0.0;
  return exact_ ? exact_->eval(x) : body_(x);
}

double CPlusFunction::err_hint(double x) const {
  return err_coeff_ * (1.0 + 0.1 * std::max(0.0, x));
}

void CPlusFunction::attach_growth(const GrowthCertificate& cert) {
  if (!(cert.C > 0.0)) throw PreconditionError("growth certificate: C must be positive");
  if (!(cert.T0 > 0.0)) throw PreconditionError("growth certificate: T0 must be positive");
  // Sample validation on [T0, 10 T0].
  for (int i = 0; i <= 32; ++i) {
    const double x = cert.T0 * (1.0 + 9.0 * static_cast<double>(i) / 32.0);
    const double bound = cert.kind == GrowthCertificate::Kind::power
                             ? cert.C * std::pow(x, cert.rate)
                             : cert.C * std::exp(cert.rate * x);
    if (std::abs((*this)(x)) > bound * (1.0 + 1e-9)) {
      throw PreconditionError("growth certificate violated at x = " + std::to_string(x) +
                              " for " + label_);
    }
  }
  growth_ = cert;
}

numerics::Integrand CPlusFunction::integrand() const {
  numerics::Integrand g;
  const CPlusFunction self = *this;
  g.f = [self](double x) { return self(x); };
  g.integer_breakpoints = integer_kinks_;
  g.power_at_zero = power_hint_;
  g.eval_noise = err_coeff_;
  g.eval_noise_power = err_coeff_ > 0.0 ? 1.0 : 0.0;
  g.eval_noise_rel = err_rel_coeff_;
  return g;
}

double CPlusFunction::moment_cumulative(int j, double x, double* err_out) const {
  auto& caches = moments_->by_moment;
  while (caches.size() <= static_cast<std::size_t>(j)) {
    caches.push_back(std::make_shared<numerics::CumulativeCache>());
  }
  numerics::Integrand g = integrand();
  if (j > 0) {
    auto base = g.f;
    g.f = [base, j](double t) { return std::pow(t, static_cast<double>(j)) * base(t); };
    if (g.power_at_zero) *g.power_at_zero += static_cast<double>(j);
    g.eval_noise_power += static_cast<double>(j);  // t^j amplifies the noise
  }
  return numerics::cumulative(g, x, *caches[static_cast<std::size_t>(j)], cfg_, err_out);
}

// ---------------------------------------------------------------------------
// Operator
// ---------------------------------------------------------------------------

Operator::Operator(CPlusFunction f, int k) : k_(k) {
  if (k < 1) throw PreconditionError("Operator: k must be >= 1");
  terms_.push_back({std::complex<double>(1.0, 0.0), std::move(f)});
}

Operator::Operator(std::vector<WeightedTerm> terms, int k) : terms_(std::move(terms)), k_(k) {
  if (k < 1) throw PreconditionError("Operator: k must be >= 1");
  std::erase_if(terms_, [](const WeightedTerm& t) { return t.weight == 0.0; });
}

Operator Operator::zero_operator() { return Operator(std::vector<WeightedTerm>{}, 1); }

std::complex<double> Operator::numerator(double x) const {
  std::complex<double> v(0.0, 0.0);
  for (const auto& t : terms_) v += t.weight * t.fn(x);
  return v;
}

double Operator::numerator_err_hint(double x) const {
  double e = 0.0;
  for (const auto& t : terms_) e += std::abs(t.weight) * t.fn.err_hint(x);
  return e;
}

bool Operator::numeric_backed() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const WeightedTerm& t) { return t.fn.numeric_backed(); });
}

std::optional<GrowthCertificate> Operator::growth_envelope() const {
  std::optional<GrowthCertificate> env;
  for (const auto& t : terms_) {
    const auto& g = t.fn.growth();
    if (!g) return std::nullopt;
    GrowthCertificate scaled = *g;
    scaled.C *= std::max(std::abs(t.weight), 1e-300);
    if (!env) {
      env = scaled;
      continue;
    }
    if (env->kind == GrowthCertificate::Kind::power &&
        scaled.kind == GrowthCertificate::Kind::power) {
      env->rate = std::max(env->rate, scaled.rate);
      env->C += scaled.C;
      env->T0 = std::max(env->T0, scaled.T0);
    } else {
      // An exponential component dominates any power component.
      const double er = (env->kind == GrowthCertificate::Kind::exponential) ? env->rate : 0.0;
      const double sr =
          (scaled.kind == GrowthCertificate::Kind::exponential) ? scaled.rate : 0.0;
      env->kind = GrowthCertificate::Kind::exponential;
      env->rate = std::max(er, sr);
      env->C += scaled.C;
      env->T0 = std::max(env->T0, scaled.T0);
    }
  }
  return env;
}

std::string Operator::label() const {
  if (terms_.empty()) return "0/H^" + std::to_string(k_);
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out += " + ";
    const auto w = terms_[i].weight;
    if (w != std::complex<double>(1.0, 0.0)) {
      out += "(" + std::to_string(w.real()) +
             (w.imag() != 0.0 ? " + " + std::to_string(w.imag()) + "i" : "") + ")*";
    }
    out += "[" + terms_[i].fn.label() + "]";
  }
  return "(" + out + ")/H^" + std::to_string(k_);
}

const numerics::QuadConfig& Operator::quad_config() const {
  static const numerics::QuadConfig kDefault{};
  return terms_.empty() ? kDefault : terms_.front().fn.quad_config();
}

// ---------------------------------------------------------------------------
// Function-level operations
// ---------------------------------------------------------------------------

namespace {

GrowthCertificate propagate_heaviside(const GrowthCertificate& g, const CPlusFunction& f) {
  const double prefix = std::max(g.T0, 1.0) * (sampled_sup(f, std::max(g.T0, 1.0)) + 1e-12);
  if (g.kind == GrowthCertificate::Kind::power) {
    const double c = g.C / (g.rate + 1.0) + prefix / std::pow(g.T0, g.rate + 1.0);
    return GrowthCertificate::power(g.rate + 1.0, 1.2 * c, g.T0);
  }
  return GrowthCertificate::exponential(g.rate, 1.2 * (prefix + g.C / std::max(g.rate, 1e-6)),
                                        g.T0);
}

GrowthCertificate propagate_mul_by_x(const GrowthCertificate& g) {
  if (g.kind == GrowthCertificate::Kind::power) {
    return GrowthCertificate::power(g.rate + 1.0, g.C, g.T0);
  }
  // x e^{sx} <= (1/(delta e)) e^{(s+delta)x} with delta = 0.05.
  return GrowthCertificate::exponential(g.rate + 0.05, 8.0 * g.C, g.T0);
}

}  // namespace

CPlusFunction heaviside_convolve(const CPlusFunction& f, int m) {
  if (m < 0) throw PreconditionError("heaviside_convolve: m must be >= 0");
  if (m == 0) return f;
  const std::string label = "H^" + std::to_string(m) + "*(" + f.label() + ")";
  if (f.exact()) {
    CPlusFunction out =
        CPlusFunction::from_exact(f.exact()->heaviside(m), label, f.quad_config());
    return out;
  }
  const CPlusFunction base = f;
  auto fn = [base, m](double x) {
    if (x <= 0.0) return 0.0;
    double v = 0.0;
    for (int j = 0; j < m; ++j) {
      const double mj = base.moment_cumulative(j, x, nullptr);
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      v += sign * binomial(m - 1, j) * std::pow(x, static_cast<double>(m - 1 - j)) * mj;
    }
    return v / factorial(m - 1);
  };
  // H^m * f gains m orders of smoothness at 0.
  std::optional<double> hint = f.integrand().power_at_zero;
  if (hint) *hint += static_cast<double>(m);
  CPlusFunction out = CPlusFunction::from_callable(
      label, fn, f.integrand().integer_breakpoints, hint, true, f.quad_config());
  if (f.growth()) {
    GrowthCertificate g = *f.growth();
    for (int j = 0; j < m; ++j) g = propagate_heaviside(g, f);
    out.set_growth_unchecked(g);
  }
  return out;
}

CPlusFunction scaled_fn(double c, const CPlusFunction& f) {
  if (f.exact()) {
    return CPlusFunction::from_exact(f.exact()->scaled(c), "", f.quad_config());
  }
  const CPlusFunction base = f;
  CPlusFunction out = CPlusFunction::from_callable(
      std::to_string(c) + "*(" + f.label() + ")", [base, c](double x) { return c * base(x); },
      false, std::nullopt, f.numeric_backed(), f.quad_config());
  if (f.growth()) {
    GrowthCertificate g = *f.growth();
    g.C *= std::max(std::abs(c), 1e-300);
    out.set_growth_unchecked(g);
  }
  return out;
}

CPlusFunction linear_combination(double c1, const CPlusFunction& f, double c2,
                                 const CPlusFunction& g) {
  if (f.exact() && g.exact()) {
    return CPlusFunction::from_exact(f.exact()->scaled(c1).plus(g.exact()->scaled(c2)), "",
                                     f.quad_config());
  }
  const CPlusFunction bf = f, bg = g;
  CPlusFunction out = CPlusFunction::from_callable(
      "(" + f.label() + " , " + g.label() + ")-combo",
      [bf, bg, c1, c2](double x) { return c1 * bf(x) + c2 * bg(x); }, false, std::nullopt,
      f.numeric_backed() || g.numeric_backed(), f.quad_config());
  if (f.growth() && g.growth()) {
    Operator env_probe(
        {{std::complex<double>(c1, 0.0), f}, {std::complex<double>(c2, 0.0), g}}, 1);
    if (auto env = env_probe.growth_envelope()) out.set_growth_unchecked(*env);
  }
  return out;
}

CPlusFunction mul_by_x_fn(const CPlusFunction& f) {
  if (f.exact()) {
    return CPlusFunction::from_exact(f.exact()->mul_by_x(), "x*(" + f.label() + ")",
                                     f.quad_config());
  }
  const CPlusFunction base = f;
  CPlusFunction out = CPlusFunction::from_callable(
      "x*(" + f.label() + ")", [base](double x) { return x * base(x); },
      /*integer_kinks=*/true, std::nullopt, f.numeric_backed(), f.quad_config());
  if (f.growth()) out.set_growth_unchecked(propagate_mul_by_x(*f.growth()));
  return out;
}

CPlusFunction convolve(const CPlusFunction& f, const CPlusFunction& g) {
  // Exact route: pure power sums convolve through the Beta integral.
  if (f.exact() && g.exact() && f.exact()->pure_power() && g.exact()->pure_power()) {
    exact::ExactForm out;
    for (const auto& a : f.exact()->powers) {
      for (const auto& b : g.exact()->powers) {
        const double c = a.coeff * b.coeff * beta_function(a.exponent + 1.0, b.exponent + 1.0);
        out = out.plus(exact::ExactForm::power(c, a.exponent + b.exponent + 1.0));
      }
    }
    return CPlusFunction::from_exact(out, "(" + f.label() + ")*(" + g.label() + ")",
                                     f.quad_config());
  }
  // x^n * g = n! H^{n+1} * g stays closed-form-fast when g is exact.
  auto single_integer_power = [](const CPlusFunction& h) -> std::optional<expr::PowerTerm> {
    if (!h.exact() || !h.exact()->pure_power() || h.exact()->powers.size() != 1) {
      return std::nullopt;
    }
    const auto t = h.exact()->powers.front();
    if (t.exponent < 0.0 || t.exponent != std::floor(t.exponent) || t.exponent > 24.0) {
      return std::nullopt;
    }
    return t;
  };
  if (auto t = single_integer_power(f)) {
    const int n = static_cast<int>(t->exponent);
    return scaled_fn(t->coeff * factorial(n), heaviside_convolve(g, n + 1));
  }
  if (auto t = single_integer_power(g)) {
    const int n = static_cast<int>(t->exponent);
    return scaled_fn(t->coeff * factorial(n), heaviside_convolve(f, n + 1));
  }

  // Generic quadrature: split at x/2 so each factor's origin behavior sits
  // at an integration endpoint where the driver can grade panels.
  const CPlusFunction bf = f, bg = g;
  auto fn = [bf, bg](double x) {
    if (x <= 0.0) return 0.0;
    const auto& cfg = bf.quad_config();
    const double half = 0.5 * x;
    auto make = [x](const CPlusFunction& outer, const CPlusFunction& inner) {
      // integrand t -> outer(x - t) inner(t) on [0, x/2]
      numerics::Integrand gi = inner.integrand();
      auto inner_eval = gi.f;
      gi.f = [outer, inner_eval, x](double t) { return outer(x - t) * inner_eval(t); };
      // Kinks of the reflected factor land at fractional offsets.
      const numerics::Integrand outer_probe = outer.integrand();
      if (outer_probe.integer_breakpoints) {
        const double frac = x - std::floor(x);
        for (double t = frac; t <= 0.5 * x; t += 1.0) {
          if (t > 0.0) gi.breakpoints.push_back(t);
        }
      }
      return gi;
    };
    const numerics::QuadResult r1 = numerics::quad(make(bf, bg), 0.0, half, cfg);
    const numerics::QuadResult r2 = numerics::quad(make(bg, bf), 0.0, half, cfg);
    return r1.value + r2.value;
  };
  CPlusFunction out =
      CPlusFunction::from_callable("(" + f.label() + ")*(" + g.label() + ")", fn,
                                   /*integer_kinks=*/f.integrand().integer_breakpoints ||
                                       g.integrand().integer_breakpoints,
                                   std::nullopt, true, f.quad_config());
  if (f.growth() && g.growth()) {
    const auto& gf = *f.growth();
    const auto& gg = *g.growth();
    const double pf = sampled_sup(f, std::max(gf.T0, 1.0)) + gf.C;
    const double pg = sampled_sup(g, std::max(gg.T0, 1.0)) + gg.C;
    if (gf.kind == GrowthCertificate::Kind::power &&
        gg.kind == GrowthCertificate::Kind::power) {
      const double rate = gf.rate + gg.rate + 1.0;
      const double c = 2.0 * pf * pg * beta_function(gf.rate + 1.0, gg.rate + 1.0);
      out.set_growth_unchecked(
          GrowthCertificate::power(rate, c, std::max(gf.T0, gg.T0)));
    } else {
      const double sf = gf.kind == GrowthCertificate::Kind::exponential ? gf.rate : 0.0;
      const double sg = gg.kind == GrowthCertificate::Kind::exponential ? gg.rate : 0.0;
      out.set_growth_unchecked(GrowthCertificate::exponential(
          std::max(sf, sg) + 0.05, 8.0 * pf * pg, std::max(gf.T0, gg.T0)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operator-level operations
// ---------------------------------------------------------------------------

Operator embed(const CPlusFunction& f) { return Operator(heaviside_convolve(f, 1), 1); }

Operator delta(numerics::QuadConfig cfg) {
  CPlusFunction x = CPlusFunction::from_exact(exact::ExactForm::power(1.0, 1.0), "x", cfg);
  x.set_growth_unchecked(GrowthCertificate::power(1.0, 1.0, 1.0));
  return Operator(std::move(x), 2);
}

Operator add(const Operator& W, const Operator& V) {
  if (W.is_zero()) return V;
  if (V.is_zero()) return W;
  std::vector<WeightedTerm> terms;
  for (const auto& t : W.terms()) terms.push_back({t.weight, heaviside_convolve(t.fn, V.k())});
  for (const auto& t : V.terms()) terms.push_back({t.weight, heaviside_convolve(t.fn, W.k())});
  return Operator(std::move(terms), W.k() + V.k());
}

Operator scale(std::complex<double> c, const Operator& W) {
  if (c == 0.0) return Operator(std::vector<WeightedTerm>{}, W.k());
  std::vector<WeightedTerm> terms = W.terms();
  for (auto& t : terms) t.weight *= c;
  return Operator(std::move(terms), W.k());
}

Operator mul(const Operator& W, const Operator& V) {
  if (W.is_zero() || V.is_zero()) {
    return Operator(std::vector<WeightedTerm>{}, W.k() + V.k());
  }
  std::vector<WeightedTerm> terms;
  for (const auto& a : W.terms()) {
    for (const auto& b : V.terms()) {
      terms.push_back({a.weight * b.weight, convolve(a.fn, b.fn)});
    }
  }
  return Operator(std::move(terms), W.k() + V.k());
}

Operator derivative(const Operator& W) { return Operator(W.terms(), W.k() + 1); }

Operator lift(const Operator& W, int m) {
  if (m < 0) throw PreconditionError("lift: m must be >= 0");
  if (m == 0) return W;
  std::vector<WeightedTerm> terms;
  for (const auto& t : W.terms()) terms.push_back({t.weight, heaviside_convolve(t.fn, m)});
  return Operator(std::move(terms), W.k() + m);
}

Operator mul_by_x(const Operator& W) {
  // The k >= 2 formula only; k = 1 is promoted first (f/H = (H*f)/H^2).
  const Operator promoted = W.k() >= 2 ? W : lift(W, 1);
  const auto kk = static_cast<double>(promoted.k());
  std::vector<WeightedTerm> terms;
  for (const auto& t : promoted.terms()) {
    terms.push_back({t.weight, mul_by_x_fn(t.fn)});
    terms.push_back({-kk * t.weight, heaviside_convolve(t.fn, 1)});
  }
  return Operator(std::move(terms), promoted.k());
}

// ---------------------------------------------------------------------------
// Numeric equality
// ---------------------------------------------------------------------------

std::vector<double> chebyshev_grid(double x_max, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double theta = kPi * (2.0 * i + 1.0) / (2.0 * points);
    grid[static_cast<std::size_t>(points - 1 - i)] = 0.5 * x_max * (1.0 + std::cos(theta));
  }
  return grid;
}

std::vector<std::complex<double>> numerator_on_grid(const Operator& W, int m_extra,
                                                    const std::vector<double>& grid,
                                                    double* err_out) {
  std::vector<std::complex<double>> values(grid.size(), std::complex<double>(0.0, 0.0));
  double err = 0.0;
  for (const auto& term : W.terms()) {
    const double wmag = std::abs(term.weight);
    if (m_extra == 0) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0) continue;
        values[i] += term.weight * term.fn(grid[i]);
        err = std::max(err, wmag * term.fn.err_hint(grid[i]));
      }
      continue;
    }
    if (term.fn.exact()) {
      const exact::ExactForm lifted = term.fn.exact()->heaviside(m_extra);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] <= 0.0) continue;
        values[i] += term.weight * lifted.eval(grid[i]);
      }
      continue;
    }
    // Moment expansion of the kernel (x-t)^{m-1}:
    //   H^m*f (x) = 1/(m-1)! sum_j binom(m-1,j) (-1)^j x^{m-1-j} M_j(x).
    const double fact = factorial(m_extra - 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] <= 0.0) continue;
      double v = 0.0;
      double point_err = 0.0;
      for (int j = 0; j < m_extra; ++j) {
        double moment_err = 0.0;
        const double mj = term.fn.moment_cumulative(j, grid[i], &moment_err);
        const double scale =
            binomial(m_extra - 1, j) * std::pow(grid[i], static_cast<double>(m_extra - 1 - j));
        v += ((j % 2 == 0) ? 1.0 : -1.0) * scale * mj;
        point_err += scale * (moment_err + term.fn.err_hint(grid[i]) * grid[i]);
      }
      values[i] += term.weight * (v / fact);
      err = std::max(err, wmag * point_err / fact);
    }
  }
  if (err_out) *err_out = err;
  return values;
}

EqualsReport equals(const Operator& W, const Operator& V, double tol,
                    const EqualsOptions& options) {
  if (options.points < 64) throw PreconditionError("equals: grid needs at least 64 points");
  const std::vector<double> grid = chebyshev_grid(options.x_max, options.points);
  double err_w = 0.0, err_v = 0.0;
  const auto a = numerator_on_grid(W, V.k(), grid, &err_w);
  const auto b = numerator_on_grid(V, W.k(), grid, &err_v);

  EqualsReport report;
  double max_mag = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    max_mag = std::max({max_mag, std::abs(a[i]), std::abs(b[i])});
    const double diff = std::abs(a[i] - b[i]);
    if (diff > report.max_diff) {
      report.max_diff = diff;
      report.witness_x = grid[i];
    }
  }
  report.scale = 1.0 + max_mag;
  report.quad_err = err_w + err_v;
  report.effective_tol = tol * report.scale + report.quad_err;
  report.equal = report.max_diff <= report.effective_tol;
  return report;
}

}  // namespace opcalc::algebra
