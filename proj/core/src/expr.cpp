#include "opcalc/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace opcalc::expr {

namespace {

bool tree_references_floor(const NodePtr& n) {
  if (!n) return false;
  if (n->kind == NodeKind::fn && n->fn == FnName::floor) return true;
  return tree_references_floor(n->a) || tree_references_floor(n->b);
}

bool tree_has_cumint(const NodePtr& n) {
  if (!n) return false;
  if (n->kind == NodeKind::cumint) return true;
  return tree_has_cumint(n->a) || tree_has_cumint(n->b);
}

}  // namespace

const char* fn_name_string(FnName fn) {
  switch (fn) {
    case FnName::exp: return "exp";
    case FnName::ln: return "ln";
    case FnName::sin: return "sin";
    case FnName::cos: return "cos";
    case FnName::sqrt: return "sqrt";
    case FnName::abs: return "abs";
    case FnName::floor: return "floor";
  }
  return "?";
}

Expr::Expr(NodePtr root)
    : root_(std::move(root)),
      references_floor_(tree_references_floor(root_)),
      has_cumint_(tree_has_cumint(root_)) {}

Expr Expr::constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::constant;
  n->value = v;
  return Expr(n);
}

Expr Expr::var() {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::var;
  return Expr(n);
}

Expr Expr::binary(NodeKind kind, const Expr& lhs, const Expr& rhs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = lhs.root();
  n->b = rhs.root();
  return Expr(n);
}

Expr Expr::negate(const Expr& e) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::neg;
  n->a = e.root();
  return Expr(n);
}

Expr Expr::function(FnName fn, const Expr& arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::fn;
  n->fn = fn;
  n->a = arg.root();
  return Expr(n);
}

Expr Expr::cumulative_integral(const Expr& arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::cumint;
  n->a = arg.root();
  return Expr(n);
}

// ---------------------------------------------------------------------------
// Parser: recursive descent with the precedence ladder
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?        (right-associative)
//   atom   := number | 'x' | name '(' expr ')' | 'I' '[' expr ']' | '(' expr ')'
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr run() {
    const Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError(pos_, "unexpected trailing input");
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!consume(c)) {
      throw ParseError(pos_, std::string("expected ") + what);
    }
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (consume('+')) {
        lhs = Expr::binary(NodeKind::add, lhs, parse_term());
      } else if (consume('-')) {
        lhs = Expr::binary(NodeKind::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (consume('*')) {
        lhs = Expr::binary(NodeKind::mul, lhs, parse_unary());
      } else if (consume('/')) {
        lhs = Expr::binary(NodeKind::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (consume('-')) return Expr::negate(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      const std::size_t caret = pos_;
      ++pos_;
      const Expr exponent = parse_unary();  // right-associative
      if (exponent.root() == nullptr || tree_has_var(exponent.root()) ||
          exponent.has_cumint()) {
        throw ParseError(caret, "exponent must be a constant expression");
      }
      return Expr::binary(NodeKind::pow, base, exponent);
    }
    return base;
  }

  static bool tree_has_var(const NodePtr& n) {
    if (!n) return false;
    if (n->kind == NodeKind::var) return true;
    return tree_has_var(n->a) || tree_has_var(n->b);
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      expect(')', "')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_identifier();
    }
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t exp_pos = pos_ + 1;
      if (exp_pos < text_.size() && (text_[exp_pos] == '+' || text_[exp_pos] == '-')) ++exp_pos;
      if (exp_pos < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_pos]))) {
        pos_ = exp_pos;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      return Expr::constant(v);
    } catch (const std::exception&) {
      throw ParseError(start, "malformed numeric literal '" + token + "'");
    }
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "x") return Expr::var();
    if (name == "I") {
      if (in_cumint_) {
        throw ParseError(start, "nested I[...] is not allowed");
      }
      expect('[', "'[' after I");
      in_cumint_ = true;
      Expr inner = parse_expr();
      in_cumint_ = false;
      expect(']', "']'");
      return Expr::cumulative_integral(inner);
    }
    static const std::pair<const char*, FnName> kFns[] = {
        {"exp", FnName::exp}, {"ln", FnName::ln},     {"sin", FnName::sin},
        {"cos", FnName::cos}, {"sqrt", FnName::sqrt}, {"abs", FnName::abs},
        {"floor", FnName::floor},
    };
    for (const auto& [fname, fval] : kFns) {
      if (name == fname) {
        expect('(', "'(' after function name");
        Expr arg = parse_expr();
        expect(')', "')'");
        return Expr::function(fval, arg);
      }
    }
    throw ParseError(start, "unknown identifier '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  bool in_cumint_ = false;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int precedence_of(NodeKind k) {
  switch (k) {
    case NodeKind::add:
    case NodeKind::sub: return 1;
    case NodeKind::mul:
    case NodeKind::div: return 2;
    case NodeKind::neg: return 3;
    case NodeKind::pow: return 4;
    default: return 5;
  }
}

void print_node(const NodePtr& n, int parent_prec, std::string& out) {
  if (!n) return;
  const int prec = precedence_of(n->kind);
  const bool parens = prec < parent_prec;
  if (parens) out += '(';
  switch (n->kind) {
    case NodeKind::constant: out += format_double(n->value); break;
    case NodeKind::var: out += 'x'; break;
    case NodeKind::add:
      print_node(n->a, prec, out);
      out += " + ";
      print_node(n->b, prec + 1, out);
      break;
    case NodeKind::sub:
      print_node(n->a, prec, out);
      out += " - ";
      print_node(n->b, prec + 1, out);
      break;
    case NodeKind::mul:
      print_node(n->a, prec, out);
      out += "*";
      print_node(n->b, prec + 1, out);
      break;
    case NodeKind::div:
      print_node(n->a, prec, out);
      out += "/";
      print_node(n->b, prec + 1, out);
      break;
    case NodeKind::pow:
      print_node(n->a, prec + 1, out);
      out += "^";
      print_node(n->b, prec, out);
      break;
    case NodeKind::neg:
      out += '-';
      print_node(n->a, prec + 1, out);
      break;
    case NodeKind::fn:
      out += fn_name_string(n->fn);
      out += '(';
      print_node(n->a, 0, out);
      out += ')';
      break;
    case NodeKind::cumint:
      out += "I[";
      print_node(n->a, 0, out);
      out += ']';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_node(e.root(), 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

double check_finite(double v, const char* what, double x) {
  if (!std::isfinite(v)) {
    throw EvalError(std::string("non-finite value from ") + what + " at x = " +
                    format_double(x));
  }
  return v;
}

std::optional<std::vector<PowerTerm>> power_sum_node(const NodePtr& n);

/// Builds the integrand for a cumulative-integral child, attaching the
/// structure hints the quadrature driver understands.
numerics::Integrand cumint_integrand(const NodePtr& child, EvalContext& ctx) {
  numerics::Integrand integrand;
  const Expr child_expr{child};
  integrand.integer_breakpoints = child_expr.references_floor();
  if (auto terms = power_sum_node(child)) {
    double min_exp = 0.0;
    bool have = false;
    for (const auto& t : *terms) {
      if (!have || t.exponent < min_exp) {
        min_exp = t.exponent;
        have = true;
      }
    }
    if (have && min_exp < 2.0 && min_exp != std::floor(min_exp)) {
      integrand.power_at_zero = min_exp;
    }
    if (have && min_exp < 0.0) integrand.power_at_zero = min_exp;
  }
  integrand.f = [child, &ctx](double t) { return eval(Expr{child}, t, ctx); };
  return integrand;
}

double eval_node(const NodePtr& n, double x, EvalContext& ctx) {
  switch (n->kind) {
    case NodeKind::constant: return n->value;
    case NodeKind::var: return x;
    case NodeKind::add:
      return check_finite(eval_node(n->a, x, ctx) + eval_node(n->b, x, ctx), "addition", x);
    case NodeKind::sub:
      return check_finite(eval_node(n->a, x, ctx) - eval_node(n->b, x, ctx), "subtraction", x);
    case NodeKind::mul:
      return check_finite(eval_node(n->a, x, ctx) * eval_node(n->b, x, ctx), "multiplication",
                          x);
    case NodeKind::div: {
      const double denom = eval_node(n->b, x, ctx);
      if (denom == 0.0) throw EvalError("division by zero at x = " + format_double(x));
      return check_finite(eval_node(n->a, x, ctx) / denom, "division", x);
    }
    case NodeKind::pow: {
      const double base = eval_node(n->a, x, ctx);
      const double exponent = eval_node(n->b, x, ctx);
      if (base < 0.0 && exponent != std::floor(exponent)) {
        throw EvalError("fractional power of negative base at x = " + format_double(x));
      }
      if (base == 0.0 && exponent < 0.0) {
        throw EvalError("negative power of zero at x = " + format_double(x));
      }
      return check_finite(std::pow(base, exponent), "power", x);
    }
    case NodeKind::neg: return -eval_node(n->a, x, ctx);
    case NodeKind::fn: {
      const double arg = eval_node(n->a, x, ctx);
      switch (n->fn) {
        case FnName::exp: return check_finite(std::exp(arg), "exp", x);
        case FnName::ln:
          if (arg <= 0.0) throw EvalError("ln of non-positive argument at x = " +
                                          format_double(x));
          return std::log(arg);
        case FnName::sin: return std::sin(arg);
        case FnName::cos: return std::cos(arg);
        case FnName::sqrt:
          if (arg < 0.0) throw EvalError("sqrt of negative argument at x = " +
                                         format_double(x));
          return std::sqrt(arg);
        case FnName::abs: return std::abs(arg);
        case FnName::floor: return std::floor(arg);
      }
      throw EvalError("unknown function");
    }
    case NodeKind::cumint: {
      auto& state = ctx.node_states[n.get()];
      const numerics::Integrand integrand = cumint_integrand(n->a, ctx);
      if (x >= 0.0) {
        return cumulative(integrand, x, state.cache, ctx.quad);
      }
      const numerics::QuadResult r = numerics::quad(integrand, x, 0.0, ctx.quad);
      return -r.value;
    }
  }
  throw EvalError("malformed expression node");
}

}  // namespace

double eval(const Expr& e, double x, EvalContext& ctx) {
  if (e.empty()) throw EvalError("empty expression");
  if (!std::isfinite(x)) throw EvalError("eval requires finite x");
  return eval_node(e.root(), x, ctx);
}

double eval(const Expr& e, double x) {
  EvalContext ctx;
  return eval(e, x, ctx);
}

// ---------------------------------------------------------------------------
// Power-sum normal form
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kMaxPowerTerms = 64;

std::optional<std::vector<PowerTerm>> merge_terms(std::vector<PowerTerm> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const PowerTerm& l, const PowerTerm& r) { return l.exponent < r.exponent; });
  std::vector<PowerTerm> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().exponent == t.exponent) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(t);
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const PowerTerm& t) { return t.coeff == 0.0; }),
            out.end());
  if (out.size() > kMaxPowerTerms) return std::nullopt;
  return out;
}

std::optional<std::vector<PowerTerm>> power_sum_node(const NodePtr& n) {
  if (!n) return std::nullopt;
  switch (n->kind) {
    case NodeKind::constant:
      if (n->value == 0.0) return std::vector<PowerTerm>{};
      return std::vector<PowerTerm>{{n->value, 0.0}};
    case NodeKind::var: return std::vector<PowerTerm>{{1.0, 1.0}};
    case NodeKind::add:
    case NodeKind::sub: {
      auto lhs = power_sum_node(n->a);
      auto rhs = power_sum_node(n->b);
      if (!lhs || !rhs) return std::nullopt;
      const double sign = n->kind == NodeKind::sub ? -1.0 : 1.0;
      for (const auto& t : *rhs) lhs->push_back({sign * t.coeff, t.exponent});
      return merge_terms(std::move(*lhs));
    }
    case NodeKind::neg: {
      auto inner = power_sum_node(n->a);
      if (!inner) return std::nullopt;
      for (auto& t : *inner) t.coeff = -t.coeff;
      return inner;
    }
    case NodeKind::mul: {
      auto lhs = power_sum_node(n->a);
      auto rhs = power_sum_node(n->b);
      if (!lhs || !rhs) return std::nullopt;
      if (lhs->size() * rhs->size() > kMaxPowerTerms) return std::nullopt;
      std::vector<PowerTerm> prod;
      for (const auto& l : *lhs) {
        for (const auto& r : *rhs) {
          prod.push_back({l.coeff * r.coeff, l.exponent + r.exponent});
        }
      }
      return merge_terms(std::move(prod));
    }
    case NodeKind::div: {
      auto lhs = power_sum_node(n->a);
      auto rhs = power_sum_node(n->b);
      if (!lhs || !rhs || rhs->size() != 1) return std::nullopt;
      const PowerTerm d = rhs->front();
      if (d.coeff == 0.0) return std::nullopt;
      for (auto& t : *lhs) {
        t.coeff /= d.coeff;
        t.exponent -= d.exponent;
      }
      return merge_terms(std::move(*lhs));
    }
    case NodeKind::pow: {
      auto base = power_sum_node(n->a);
      auto exponent = power_sum_node(n->b);
      if (!base || !exponent) return std::nullopt;
      if (exponent->size() > 1 || (!exponent->empty() && exponent->front().exponent != 0.0)) {
        return std::nullopt;
      }
      const double p = exponent->empty() ? 0.0 : exponent->front().coeff;
      if (base->size() != 1) return std::nullopt;
      const PowerTerm bt = base->front();
      if (bt.coeff < 0.0 && p != std::floor(p)) return std::nullopt;
      return std::vector<PowerTerm>{{std::pow(bt.coeff, p), bt.exponent * p}};
    }
    case NodeKind::fn:
      if (n->fn == FnName::sqrt) {
        auto inner = power_sum_node(n->a);
        if (!inner || inner->size() != 1 || inner->front().coeff < 0.0) return std::nullopt;
        return std::vector<PowerTerm>{
            {std::sqrt(inner->front().coeff), 0.5 * inner->front().exponent}};
      }
      return std::nullopt;
    case NodeKind::cumint: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::vector<PowerTerm>> power_sum(const Expr& e) {
  return power_sum_node(e.root());
}

Expr expr_from_power_terms(const std::vector<PowerTerm>& terms) {
  if (terms.empty()) return Expr::constant(0.0);
  Expr acc;
  bool first = true;
  for (const auto& t : terms) {
    Expr piece;
    if (t.exponent == 0.0) {
      piece = Expr::constant(t.coeff);
    } else {
      Expr power = (t.exponent == 1.0)
                       ? Expr::var()
                       : Expr::binary(NodeKind::pow, Expr::var(), Expr::constant(t.exponent));
      piece = (t.coeff == 1.0) ? power
                               : Expr::binary(NodeKind::mul, Expr::constant(t.coeff), power);
    }
    acc = first ? piece : Expr::binary(NodeKind::add, acc, piece);
    first = false;
  }
  return acc;
}

std::optional<Expr> antiderivative_exact(const Expr& e) {
  auto terms = power_sum(e);
  if (!terms) return std::nullopt;
  std::vector<PowerTerm> anti;
  for (const auto& t : *terms) {
    if (t.exponent == -1.0) return std::nullopt;
    anti.push_back({t.coeff / (t.exponent + 1.0), t.exponent + 1.0});
  }
  return expr_from_power_terms(anti);
}

}  // namespace opcalc::expr
