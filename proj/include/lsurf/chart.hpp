#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lsurf/expr.hpp"
#include "lsurf/jet.hpp"

namespace lsurf {

// Coordinate conventions for a Lorentz surface patch:
//   UV: conformal null coordinates, g_uu = g_vv = 0, g_uv = -f^2 < 0
//   ST: normalized null form, g_ss = 0, g_st = -1, g_tt = 2*f free-signed
enum class Coords { UV, ST };

const char* coords_name(Coords c);

struct Domain {
  double lo0 = 0, hi0 = 1, lo1 = 0, hi1 = 1;

  bool contains(double p0, double p1, double slack = 1e-9) const {
    return p0 >= lo0 - slack && p0 <= hi0 + slack && p1 >= lo1 - slack &&
           p1 <= hi1 + slack;
  }
  double span0() const { return hi0 - lo0; }
  double span1() const { return hi1 - lo1; }
};

// A parametrized surface patch in R^4_2, evaluable to truncated jets of any
// order up to Jet::kMaxOrder. Discrete-backed charts restrict evaluation to
// their stored nodes and advertise them via axis_nodes().
class Chart {
 public:
  Chart(Coords coords, Domain domain, std::string kind)
      : coords_(coords), domain_(domain), kind_(std::move(kind)) {}
  virtual ~Chart() = default;

  Coords coords() const { return coords_; }
  const Domain& domain() const { return domain_; }
  const std::string& kind() const { return kind_; }

  JetVec4 eval(double p0, double p1, int order) const;
  Vec4 position(double p0, double p1) const;

  // Nodes along an axis for charts that only evaluate on a grid; empty means
  // the chart is continuous along that axis.
  virtual std::vector<double> axis_nodes(int axis) const {
    (void)axis;
    return {};
  }

 protected:
  virtual JetVec4 eval_impl(double p0, double p1, int order) const = 0;

 private:
  Coords coords_;
  Domain domain_;
  std::string kind_;
};

using ChartPtr = std::shared_ptr<const Chart>;

// Chart defined by four closed-form component expressions.
class ExprChart : public Chart {
 public:
  ExprChart(std::array<ExprPtr, 4> comps, Coords coords, Domain domain,
            std::string kind = "components");

  const std::array<ExprPtr, 4>& components() const { return comps_; }

 protected:
  JetVec4 eval_impl(double p0, double p1, int order) const override;

 private:
  std::array<ExprPtr, 4> comps_;
};

ChartPtr make_expr_chart(const std::array<std::string, 4>& components,
                         Coords coords, Domain domain);

// Sampling grid over a chart domain. margin trims a fraction of each span so
// samples stay interior; node-locked axes snap to the chart's nodes.
struct GridSpec {
  int n0 = 20;
  int n1 = 20;
  double margin = 0.0;
};

std::vector<double> grid_axis(const Chart& chart, int axis, int n,
                              double margin);

}  // namespace lsurf
