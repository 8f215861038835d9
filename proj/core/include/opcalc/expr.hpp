#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opcalc/errors.hpp"
#include "opcalc/numerics.hpp"

namespace opcalc::expr {

enum class NodeKind { constant, var, add, sub, mul, div, pow, neg, fn, cumint };

enum class FnName { exp, ln, sin, cos, sqrt, abs, floor };

const char* fn_name_string(FnName fn);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// One AST node. Trees are immutable after construction and freely shared.
struct Node {
  NodeKind kind;
  double value = 0.0;         // constant
  FnName fn = FnName::exp;    // fn
  NodePtr a;                  // unary child / left operand
  NodePtr b;                  // right operand
};

/// Immutable expression value: an AST plus tree-level facts computed once.
class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr root);

  static Expr constant(double v);
  static Expr var();
  static Expr binary(NodeKind kind, const Expr& lhs, const Expr& rhs);
  static Expr negate(const Expr& e);
  static Expr function(FnName fn, const Expr& arg);
  static Expr cumulative_integral(const Expr& arg);

  const NodePtr& root() const { return root_; }
  bool empty() const { return root_ == nullptr; }
  bool references_floor() const { return references_floor_; }
  bool has_cumint() const { return has_cumint_; }

 private:
  NodePtr root_;
  bool references_floor_ = false;
  bool has_cumint_ = false;
};

/// Parses the function DSL: infix with ^ > unary - > * / > + -, parentheses,
/// name(expr) calls, I[expr] for the one-level cumulative integral, decimal
/// and scientific literals, and the variable x. Throws ParseError with a
/// character offset on any malformed input.
Expr parse(std::string_view text);

/// Prints an expression that parses back to an equal tree; doubles are
/// emitted with round-trip precision.
std::string to_string(const Expr& e);

/// Mutable evaluation state: quadrature tolerances plus one persistent
/// prefix-integral cache per cumulative-integral node. Not thread-safe;
/// use one context per thread (results are identical).
struct EvalContext {
  numerics::QuadConfig quad;

  struct NodeState {
    numerics::CumulativeCache cache;
  };
  std::map<const Node*, NodeState> node_states;
};

/// Evaluates at x. Domain violations (ln/sqrt of a negative, poles) and any
/// non-finite intermediate raise EvalError rather than propagating silently.
double eval(const Expr& e, double x, EvalContext& ctx);

/// Convenience overload with a throwaway context (no cache reuse).
double eval(const Expr& e, double x);

/// A term c * x^a of a power-sum normal form.
struct PowerTerm {
  double coeff;
  double exponent;
};

/// Recognizes expressions that are finite sums of c * x^a terms; returns the
/// merged, exponent-sorted term list, or nullopt when the tree is not such a
/// sum.
std::optional<std::vector<PowerTerm>> power_sum(const Expr& e);

/// Closed-form antiderivative for power sums whose exponents avoid -1:
/// c x^a -> c x^{a+1}/(a+1). Returns nullopt for anything else.
std::optional<Expr> antiderivative_exact(const Expr& e);

/// Builds the expression sum of the given power terms.
Expr expr_from_power_terms(const std::vector<PowerTerm>& terms);

}  // namespace opcalc::expr
