#include "lsurf/chart.hpp"

#include <algorithm>
#include <cmath>

#include "lsurf/error.hpp"

namespace lsurf {

const char* coords_name(Coords c) { return c == Coords::UV ? "uv" : "st"; }

JetVec4 Chart::eval(double p0, double p1, int order) const {
  if (order < 0 || order > Jet::kMaxOrder)
    throw Error(ErrorCode::InvalidOrder, "chart jet order out of range")
        .with("order", double(order));
  double slack0 = 1e-9 * std::max(1.0, std::abs(domain_.span0()));
  double slack1 = 1e-9 * std::max(1.0, std::abs(domain_.span1()));
  if (p0 < domain_.lo0 - slack0 || p0 > domain_.hi0 + slack0 ||
      p1 < domain_.lo1 - slack1 || p1 > domain_.hi1 + slack1)
    throw Error(ErrorCode::OutOfDomain, "evaluation point outside chart domain")
        .with("p0", p0)
        .with("p1", p1);
  return eval_impl(p0, p1, order);
}

Vec4 Chart::position(double p0, double p1) const {
  return value_of(eval(p0, p1, 0));
}

ExprChart::ExprChart(std::array<ExprPtr, 4> comps, Coords coords, Domain domain,
                     std::string kind)
    : Chart(coords, domain, std::move(kind)), comps_(std::move(comps)) {
  for (const auto& c : comps_)
    if (!c) throw Error(ErrorCode::BadInput, "chart component missing");
}

JetVec4 ExprChart::eval_impl(double p0, double p1, int order) const {
  JetVec4 z;
  for (int k = 0; k < 4; ++k) z[k] = eval_jet(comps_[k], p0, p1, order);
  return z;
}

ChartPtr make_expr_chart(const std::array<std::string, 4>& components,
                         Coords coords, Domain domain) {
  std::array<ExprPtr, 4> comps;
  for (int k = 0; k < 4; ++k) comps[k] = parse_expr(components[k]);
  return std::make_shared<ExprChart>(std::move(comps), coords, domain);
}

std::vector<double> grid_axis(const Chart& chart, int axis, int n,
                              double margin) {
  if (n < 1) throw Error(ErrorCode::BadInput, "grid axis needs n >= 1");
  const Domain& d = chart.domain();
  double lo = axis == 0 ? d.lo0 : d.lo1;
  double hi = axis == 0 ? d.hi0 : d.hi1;
  double pad = margin * (hi - lo);
  lo += pad;
  hi -= pad;

  std::vector<double> targets(n);
  if (n == 1) {
    targets[0] = 0.5 * (lo + hi);
  } else {
    for (int i = 0; i < n; ++i) targets[i] = lo + (hi - lo) * i / (n - 1);
  }

  std::vector<double> nodes = chart.axis_nodes(axis);
  if (nodes.empty()) return targets;

  // Snap each target to the nearest stored node, deduplicated.
  std::vector<double> out;
  out.reserve(n);
  for (double t : targets) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), t);
    double best;
    if (it == nodes.end())
      best = nodes.back();
    else if (it == nodes.begin())
      best = nodes.front();
    else
      best = (*it - t < t - *(it - 1)) ? *it : *(it - 1);
    if (out.empty() || best != out.back()) out.push_back(best);
  }
  if (out.empty())
    throw Error(ErrorCode::InsufficientSamples, "no grid nodes in range");
  return out;
}

}  // namespace lsurf
