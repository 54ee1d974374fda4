#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lsurf/jet.hpp"

// Small closed-form expression language for chart components and family
// data. Grammar (standard precedence, ^ right-associative and binding
// tighter than unary minus):
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
//
// Functions: exp, log, sqrt, sin, cos. Constants: pi, e. Variables come from
// a per-context whitelist mapping names to the two parameter slots.

namespace lsurf {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind;
  double number = 0;      // Kind::Number
  std::string name;       // Var/Call display name; "pi"/"e" for named numbers
  int slot = 0;           // Var: parameter slot 0 or 1
  ExprPtr a, b;

  static ExprPtr make_number(double v, std::string name = "");
  static ExprPtr make_var(std::string name, int slot);
  static ExprPtr make_unary(Kind k, ExprPtr x);
  static ExprPtr make_binary(Kind k, ExprPtr x, ExprPtr y);
  static ExprPtr make_call(std::string fn, ExprPtr x);
};

struct VarBinding {
  std::string name;
  int slot;
};

// Chart components: u and s address slot 0, v and t address slot 1.
std::vector<VarBinding> chart_vars();
// One-variable contexts (profile functions, coefficient data).
std::vector<VarBinding> single_var(const std::string& name);

ExprPtr parse_expr(const std::string& src, const std::vector<VarBinding>& vars);
ExprPtr parse_expr(const std::string& src);  // chart_vars()

std::string print_expr(const ExprPtr& e);
bool expr_equal(const ExprPtr& a, const ExprPtr& b);
// True when no Var node occurs (evaluates to the same value everywhere).
bool expr_is_constant(const ExprPtr& e);

double eval_value(const ExprPtr& e, double p0, double p1);
Jet eval_jet(const ExprPtr& e, const Jet& p0, const Jet& p1);
// Convenience: seeds variables at (p0, p1) and evaluates to the given order.
Jet eval_jet(const ExprPtr& e, double p0, double p1, int order);

}  // namespace lsurf
