#include "opcalc/exact_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opcalc::exact {

namespace {

void trim(std::vector<double>& poly) {
  while (!poly.empty() && poly.back() == 0.0) poly.pop_back();
}

std::vector<double> poly_add(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  trim(out);
  return out;
}

std::vector<double> poly_scale(const std::vector<double>& a, double c) {
  std::vector<double> out = a;
  for (double& v : out) v *= c;
  trim(out);
  return out;
}

std::vector<double> poly_shift_up(const std::vector<double>& a) {
  if (a.empty()) return {};
  std::vector<double> out(a.size() + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i + 1] = a[i];
  return out;
}

double poly_eval(const std::vector<double>& a, double x) {
  double v = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) v = v * x + a[i];
  return v;
}

std::vector<expr::PowerTerm> merge_powers(std::vector<expr::PowerTerm> terms) {
  std::sort(terms.begin(), terms.end(), [](const expr::PowerTerm& l, const expr::PowerTerm& r) {
    return l.exponent < r.exponent;
  });
  std::vector<expr::PowerTerm> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().exponent == t.exponent) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(t);
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const expr::PowerTerm& t) { return t.coeff == 0.0; }),
            out.end());
  return out;
}

}  // namespace

bool ExactForm::is_zero() const {
  return powers.empty() && sin_poly.empty() && cos_poly.empty();
}

double ExactForm::eval(double x) const {
  double v = 0.0;
  for (const auto& t : powers) {
    v += (t.exponent == 0.0) ? t.coeff : t.coeff * std::pow(x, t.exponent);
  }
  if (!sin_poly.empty()) v += poly_eval(sin_poly, x) * std::sin(x);
  if (!cos_poly.empty()) v += poly_eval(cos_poly, x) * std::cos(x);
  return v;
}

ExactForm ExactForm::scaled(double c) const {
  if (c == 0.0) return zero();
  ExactForm out;
  out.powers = powers;
  for (auto& t : out.powers) t.coeff *= c;
  out.sin_poly = poly_scale(sin_poly, c);
  out.cos_poly = poly_scale(cos_poly, c);
  return out;
}

ExactForm ExactForm::plus(const ExactForm& other) const {
  ExactForm out;
  out.powers = powers;
  out.powers.insert(out.powers.end(), other.powers.begin(), other.powers.end());
  out.powers = merge_powers(std::move(out.powers));
  out.sin_poly = poly_add(sin_poly, other.sin_poly);
  out.cos_poly = poly_add(cos_poly, other.cos_poly);
  return out;
}

ExactForm ExactForm::mul_by_x() const {
  ExactForm out;
  out.powers = powers;
  for (auto& t : out.powers) t.exponent += 1.0;
  out.sin_poly = poly_shift_up(sin_poly);
  out.cos_poly = poly_shift_up(cos_poly);
  return out;
}

namespace {

// integral over [0, x] of t^n sin t / t^n cos t, by the usual reduction:
//   int_0^x t^n sin t dt = -x^n cos x + n int_0^x t^{n-1} cos t dt   (+1 if n = 0)
//   int_0^x t^n cos t dt =  x^n sin x - n int_0^x t^{n-1} sin t dt
ExactForm integ_cos_mono(int n);

ExactForm integ_sin_mono(int n) {
  ExactForm out = ExactForm::cos_term(-1.0, n);
  if (n == 0) {
    out = out.plus(ExactForm::power(1.0, 0.0));
  } else {
    out = out.plus(integ_cos_mono(n - 1).scaled(static_cast<double>(n)));
  }
  return out;
}

ExactForm integ_cos_mono(int n) {
  ExactForm out = ExactForm::sin_term(1.0, n);
  if (n > 0) {
    out = out.plus(integ_sin_mono(n - 1).scaled(-static_cast<double>(n)));
  }
  return out;
}

}  // namespace

ExactForm ExactForm::cumulative() const {
  ExactForm out;
  std::vector<expr::PowerTerm> pw;
  for (const auto& t : powers) {
    // exponents are > -1 by construction, so no log case arises
    pw.push_back({t.coeff / (t.exponent + 1.0), t.exponent + 1.0});
  }
  out.powers = merge_powers(std::move(pw));
  for (std::size_t n = 0; n < sin_poly.size(); ++n) {
    if (sin_poly[n] != 0.0) {
      out = out.plus(integ_sin_mono(static_cast<int>(n)).scaled(sin_poly[n]));
    }
  }
  for (std::size_t n = 0; n < cos_poly.size(); ++n) {
    if (cos_poly[n] != 0.0) {
      out = out.plus(integ_cos_mono(static_cast<int>(n)).scaled(cos_poly[n]));
    }
  }
  return out;
}

ExactForm ExactForm::heaviside(int m) const {
  ExactForm out = *this;
  for (int j = 0; j < m; ++j) out = out.cumulative();
  return out;
}

std::optional<double> ExactForm::min_power_exponent() const {
  if (powers.empty()) return std::nullopt;
  return powers.front().exponent;  // exponent-sorted
}

double ExactForm::growth_exponent() const {
  double e = 0.0;
  bool any = false;
  if (!powers.empty()) {
    e = powers.back().exponent;
    any = true;
  }
  const double trig_deg = static_cast<double>(
      std::max(sin_poly.size(), cos_poly.size())) - 1.0;
  if (!sin_poly.empty() || !cos_poly.empty()) {
    e = any ? std::max(e, trig_deg) : trig_deg;
  }
  return std::max(e, 0.0);
}

double ExactForm::growth_scale() const {
  double c = 0.0;
  for (const auto& t : powers) c += std::abs(t.coeff);
  for (double v : sin_poly) c += std::abs(v);
  for (double v : cos_poly) c += std::abs(v);
  return std::max(c, 1e-12);
}

ExactForm ExactForm::zero() { return ExactForm{}; }

ExactForm ExactForm::power(double coeff, double exponent) {
  ExactForm out;
  if (coeff != 0.0) out.powers.push_back({coeff, exponent});
  return out;
}

ExactForm ExactForm::sin_term(double coeff, int degree) {
  ExactForm out;
  if (coeff != 0.0) {
    out.sin_poly.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    out.sin_poly[static_cast<std::size_t>(degree)] = coeff;
  }
  return out;
}

ExactForm ExactForm::cos_term(double coeff, int degree) {
  ExactForm out;
  if (coeff != 0.0) {
    out.cos_poly.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    out.cos_poly[static_cast<std::size_t>(degree)] = coeff;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Recognition
// ---------------------------------------------------------------------------

namespace {

using expr::Node;
using expr::NodeKind;
using expr::NodePtr;

std::optional<ExactForm> recognize(const NodePtr& n);

/// Integer-coefficient polynomial from a pure power sum with integer
/// exponents >= 0; used for trig multipliers.
std::optional<std::vector<double>> as_polynomial(const ExactForm& f) {
  if (!f.pure_power()) return std::nullopt;
  std::vector<double> poly;
  for (const auto& t : f.powers) {
    if (t.exponent < 0.0 || t.exponent != std::floor(t.exponent)) return std::nullopt;
    const auto deg = static_cast<std::size_t>(t.exponent);
    if (deg > 16) return std::nullopt;
    if (poly.size() <= deg) poly.resize(deg + 1, 0.0);
    poly[deg] += t.coeff;
  }
  return poly;
}

std::optional<ExactForm> recognize_product(const ExactForm& lhs, const ExactForm& rhs) {
  // power-sum x power-sum
  if (lhs.pure_power() && rhs.pure_power()) {
    std::vector<expr::PowerTerm> prod;
    if (lhs.powers.size() * rhs.powers.size() > 64) return std::nullopt;
    for (const auto& l : lhs.powers) {
      for (const auto& r : rhs.powers) {
        prod.push_back({l.coeff * r.coeff, l.exponent + r.exponent});
      }
    }
    ExactForm out;
    out.powers = merge_powers(std::move(prod));
    if (auto mn = out.min_power_exponent(); mn && *mn <= -1.0) return std::nullopt;
    return out;
  }
  // polynomial x trig form
  const ExactForm* poly_side = nullptr;
  const ExactForm* trig_side = nullptr;
  if (lhs.pure_power()) {
    poly_side = &lhs;
    trig_side = &rhs;
  } else if (rhs.pure_power()) {
    poly_side = &rhs;
    trig_side = &lhs;
  } else {
    return std::nullopt;  // trig x trig stays numeric
  }
  auto poly = as_polynomial(*poly_side);
  if (!poly) return std::nullopt;
  ExactForm out;
  // (poly)(powers + p sin + q cos): powers part only if trig_side has none.
  for (const auto& t : trig_side->powers) {
    for (std::size_t d = 0; d < poly->size(); ++d) {
      if ((*poly)[d] != 0.0) {
        out = out.plus(ExactForm::power(t.coeff * (*poly)[d],
                                        t.exponent + static_cast<double>(d)));
      }
    }
  }
  auto mul_poly = [&](const std::vector<double>& trig_poly) {
    std::vector<double> prod(trig_poly.size() + poly->size(), 0.0);
    for (std::size_t i = 0; i < trig_poly.size(); ++i) {
      for (std::size_t j = 0; j < poly->size(); ++j) {
        prod[i + j] += trig_poly[i] * (*poly)[j];
      }
    }
    trim(prod);
    return prod;
  };
  ExactForm trig_part;
  trig_part.sin_poly = mul_poly(trig_side->sin_poly);
  trig_part.cos_poly = mul_poly(trig_side->cos_poly);
  return out.plus(trig_part);
}

std::optional<ExactForm> recognize(const NodePtr& n) {
  if (!n) return std::nullopt;
  // Whole-subtree power sums are the common case; try them first.
  if (auto terms = expr::power_sum(expr::Expr{n})) {
    ExactForm out;
    out.powers = merge_powers(std::move(*terms));
    if (auto mn = out.min_power_exponent(); mn && *mn <= -1.0) return std::nullopt;
    return out;
  }
  switch (n->kind) {
    case NodeKind::add:
    case NodeKind::sub: {
      auto lhs = recognize(n->a);
      auto rhs = recognize(n->b);
      if (!lhs || !rhs) return std::nullopt;
      return lhs->plus(n->kind == NodeKind::sub ? rhs->scaled(-1.0) : *rhs);
    }
    case NodeKind::neg: {
      auto inner = recognize(n->a);
      if (!inner) return std::nullopt;
      return inner->scaled(-1.0);
    }
    case NodeKind::mul: {
      auto lhs = recognize(n->a);
      auto rhs = recognize(n->b);
      if (!lhs || !rhs) return std::nullopt;
      return recognize_product(*lhs, *rhs);
    }
    case NodeKind::div: {
      auto lhs = recognize(n->a);
      auto rhs = recognize(n->b);
      if (!lhs || !rhs) return std::nullopt;
      if (!rhs->pure_power() || rhs->powers.size() != 1 || rhs->powers[0].exponent != 0.0 ||
          rhs->powers[0].coeff == 0.0) {
        return std::nullopt;
      }
      return lhs->scaled(1.0 / rhs->powers[0].coeff);
    }
    case NodeKind::fn:
      if (n->fn == expr::FnName::sin && n->a && n->a->kind == NodeKind::var) {
        return ExactForm::sin_term(1.0);
      }
      if (n->fn == expr::FnName::cos && n->a && n->a->kind == NodeKind::var) {
        return ExactForm::cos_term(1.0);
      }
      return std::nullopt;
    case NodeKind::cumint: {
      auto inner = recognize(n->a);
      if (!inner) return std::nullopt;
      return inner->cumulative();
    }
    default: return std::nullopt;
  }
}

}  // namespace

std::optional<ExactForm> from_expr(const expr::Expr& e) { return recognize(e.root()); }

std::string to_string(const ExactForm& form) {
  if (form.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  auto sep = [&]() {
    if (!first) os << " + ";
    first = false;
  };
  for (const auto& t : form.powers) {
    sep();
    if (t.exponent == 0.0) {
      os << t.coeff;
    } else if (t.exponent == 1.0) {
      os << t.coeff << "*x";
    } else {
      os << t.coeff << "*x^" << t.exponent;
    }
  }
  auto trig = [&](const std::vector<double>& poly, const char* name) {
    for (std::size_t d = 0; d < poly.size(); ++d) {
      if (poly[d] == 0.0) continue;
      sep();
      os << poly[d];
      if (d == 1) os << "*x";
      if (d > 1) os << "*x^" << d;
      os << "*" << name << "(x)";
    }
  };
  trig(form.sin_poly, "sin");
  trig(form.cos_poly, "cos");
  return os.str();
}

}  // namespace opcalc::exact
