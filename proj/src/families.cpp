#include <cmath>
#include <numbers>
#include <utility>

#include "lsurf/families.hpp"

namespace lsurf {
namespace {

Jet eval1(const ExprPtr& e, const Jet& x) { return eval_jet(e, x, x); }

std::array<ExprPtr, 4> example_components() {
  return {parse_expr("-4*sqrt(s)*cos(t) + s*sin(t) + cos(t)/2"),
          parse_expr("-4*sqrt(s)*sin(t) - s*cos(t) + sin(t)/2"),
          parse_expr("-4*sqrt(s)*sin(t) - s*cos(t) - sin(t)/2"),
          parse_expr("-4*sqrt(s)*cos(t) + s*sin(t) - cos(t)/2")};
}

}  // namespace

ChartPtr example_chart(Domain domain) {
  return std::make_shared<ExprChart>(example_components(), Coords::ST, domain,
                                     "example");
}

ChartPtr example_chart() {
  return example_chart(Domain{1.0, 9.0, 0.0, 2.0 * std::numbers::pi});
}

CoefficientJets coefficient_functions(const ExprPtr& lambda1,
                                      const ExprPtr& lambda3, double s,
                                      double t, int order,
                                      const ExprPtr& lambda2) {
  if (!lambda1 || !lambda3)
    throw Error(ErrorCode::BadInput, "non-flat family needs both profiles");
  if (order < 2 || order > Jet::kMaxOrder)
    throw Error(ErrorCode::InvalidOrder, "coefficient jet order out of range")
        .with("order", double(order));
  const Jet T = Jet::variable(t, 1, order);
  const Jet L1 = eval1(lambda1, T);
  const Jet L3 = eval1(lambda3, T);
  const Jet L2 = lambda2 ? eval1(lambda2, T) : Jet::constant(0.0, order);
  if (std::abs(L1.value()) < 1e-8 || std::abs(L3.value()) < 1e-8)
    throw Error(ErrorCode::BadInput, "profile function vanishes")
        .with("t", t)
        .with("lambda1", L1.value())
        .with("lambda3", L3.value());

  const Jet S = Jet::variable(s, 0, order);
  const Jet R = (-2.0 / 3.0) * (L1 * S + L2);
  if (R.value() <= 0)
    throw Error(ErrorCode::DomainViolation,
                "radicand of the profile radius is not positive")
        .with("s", s)
        .with("t", t)
        .with("radicand", R.value());

  CoefficientJets out;
  out.a = L3 * pow(R, -1.5);
  out.d = 1.0 / L3;
  out.c = (-9.0 / (L1 * L1)) * sqrt(R);
  out.beta2 = (3.0 / L1) * pow(R, -0.5);
  out.K = pow(R, -1.5);
  const Jet lam4 = 2.0 * (L3.dv() / L3) - 3.0 * (L1.dv() / L1);
  out.f = out.c - lam4 * S - L2.dv() / L1 -
          2.0 * (L2 / L1) * (L3.dv() / L3) + 4.0 * (L2 / L1) * (L1.dv() / L1);
  return out;
}

ChartPtr builtin_chart(const std::string& name, const Tolerances& tol) {
  if (name == "example") return example_chart();
  if (name == "flat_product")
    return bd_zero_surface(parse_expr("u*v"), Domain{-1, 1, -1, 1}, tol);
  if (name == "flat_exponential")
    return bd_zero_surface(parse_expr("exp(u + v)"), Domain{-1, 1, -1, 1},
                           tol);
  if (name == "nonflat") {
    NonFlatSpec spec;
    spec.lambda1 = parse_expr("-3/2");
    spec.lambda3 = parse_expr("1");
    return nonflat_integrate(spec, tol);
  }
  throw Error(ErrorCode::BadInput, "unknown builtin chart").with("name", name);
}

std::vector<std::string> builtin_chart_names() {
  return {"example", "flat_exponential", "flat_product", "nonflat"};
}

}  // namespace lsurf
