#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lsurf/chart.hpp"
#include "lsurf/expr.hpp"
#include "lsurf/linalg.hpp"
#include "lsurf/tolerances.hpp"

namespace lsurf {

// Closed-form reference surface on s in [1,9], t in [0,2pi]; the golden
// chart for every downstream suite.
ChartPtr example_chart();
ChartPtr example_chart(Domain domain);

// ---------------------------------------------------------------------------
// Flat family: z = (theta, (u-v)/sqrt(2), (u+v)/sqrt(2), theta) where theta
// solves theta_uv = F(theta + c1*u + c2*v) with characteristic data
// theta(u, v0) = p(u), theta(u0, v) = q(v).

struct FlatThetaSpec {
  ExprPtr F;           // one-variable profile, variable w
  double c1 = 0, c2 = 0;
  ExprPtr p, q;        // characteristic data along the two axes
  Domain domain{0.0, 1.0, 0.0, 1.0};
  int resolution = 40;      // coarsest marching grid intervals per axis
  int max_refinements = 5;  // grid doublings tried before giving up
};

// Solved theta grid: full jets (order 4) at every node, so the derived chart
// supports the frame pipeline at any node.
class ThetaField {
 public:
  ThetaField(std::vector<double> us, std::vector<double> vs,
             std::vector<Jet> jets, double residual,
             double refinement_gap = 0);

  const std::vector<double>& us() const { return us_; }
  const std::vector<double>& vs() const { return vs_; }
  const Jet& at(std::size_t i, std::size_t j) const;
  double residual() const { return residual_; }
  // Agreement between the last two extrapolated solves; 0 for rebuilt grids.
  double refinement_gap() const { return refinement_gap_; }

  // Node values only; everything else is rebuilt from the spec on load.
  void save_csv(const std::string& path) const;

 private:
  std::vector<double> us_, vs_;
  std::vector<Jet> jets_;  // row-major, jets_[i * vs.size() + j]
  double residual_ = 0;
  double refinement_gap_ = 0;
};

using ThetaFieldPtr = std::shared_ptr<const ThetaField>;

// Raw value grid, the on-disk form of a solved field.
struct ThetaGridValues {
  std::vector<double> us, vs;
  std::vector<double> values;  // row-major
};

ThetaGridValues load_theta_values_csv(const std::string& path);

// Rebuilds node jets from raw values by integrating the profile's derivative
// fields, and recomputes the integral-form residual of the defining equation
// against spec; a tampered grid surfaces as a residual above tol.goursat.
ThetaFieldPtr theta_field_from_values(const ThetaGridValues& grid,
                                      const FlatThetaSpec& spec,
                                      const Tolerances& tol = {});

// Marching Goursat solver: trapezoidal cell quadrature with per-cell Picard
// iteration, grid doubling plus Richardson extrapolation until two
// successive refinements agree to tol.goursat.
ThetaFieldPtr goursat_solve(const FlatThetaSpec& spec,
                            const Tolerances& tol = {});

// Null-graph chart over a closed-form profile or a solved field. Probes
// theta_uv over the grid and rejects profiles whose mean curvature vanishes.
ChartPtr bd_zero_surface(const ExprPtr& theta, Domain domain,
                         const Tolerances& tol = {});
ChartPtr bd_zero_surface(const ThetaFieldPtr& field,
                         const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Non-flat family: z(s,t) = -(9*l3/l1^2) sqrt(R) n1 - s*l3*n1' + xi with
// R = -(2/3) l1(t) s, where n1 and xi solve linear ODEs in t driven by the
// profile functions l1, l3.

struct NonFlatSeed {
  Vec4 n1{{1, 0, 0, 1}};
  Vec4 n1p{{0, 1, 1, 0}};
};

struct NonFlatInitialData {
  double t0 = 0;
  Vec4 n1{}, n1p{}, xi{}, xip{}, xipp{};
};

// Completes seed directions into data satisfying the full constraint set and
// its first t-derivatives at t0.
NonFlatInitialData nonflat_initial_data(const ExprPtr& lambda1,
                                        const ExprPtr& lambda3, double t0,
                                        const NonFlatSeed& seed = {});

struct NonFlatSpec {
  ExprPtr lambda1, lambda3;  // one-variable profiles, variable t
  Domain domain{1.0, 9.0, 0.0, 6.283185307179586};
  double step = 1e-3;
  bool project = false;  // re-impose constraints each step (reported, off)
  std::optional<NonFlatInitialData> init;  // default: built at domain.lo1
};

struct OdeState {
  double t = 0;
  Vec4 n1{}, n1p{}, xi{}, xip{}, xipp{};
};

struct NonflatTrace {
  std::vector<OdeState> states;  // strictly increasing t
  double max_drift = 0;
  bool projected = false;

  void save_csv(const std::string& path) const;
  static std::shared_ptr<const NonflatTrace> load_csv(const std::string& path);
};

using NonflatTracePtr = std::shared_ptr<const NonflatTrace>;

// Integrates the frame ODE system over the t-interval with fixed-step
// fourth-order stepping plus step-halving error control; monitors the
// constraint set and fails on drift beyond tol.drift.
NonflatTracePtr nonflat_trace(const NonFlatSpec& spec,
                              const Tolerances& tol = {});

// Chart over an integrated trace; re-validates the trace against the
// constraint set so a stale or edited cache cannot pass silently.
ChartPtr nonflat_chart(const NonFlatSpec& spec, const NonflatTracePtr& trace,
                       const Tolerances& tol = {});

// Convenience: trace + chart in one call.
ChartPtr nonflat_integrate(const NonFlatSpec& spec, const Tolerances& tol = {});

// Closed-form coefficient functions of the non-flat family as jets in (s,t);
// the independent oracle for frame extraction on integrated charts. lambda2
// enters only here, for formula checks; charts always use lambda2 = 0.
struct CoefficientJets {
  Jet a, c, d, beta2, f, K;
};

CoefficientJets coefficient_functions(const ExprPtr& lambda1,
                                      const ExprPtr& lambda3, double s,
                                      double t, int order = 4,
                                      const ExprPtr& lambda2 = nullptr);

// ---------------------------------------------------------------------------
// Built-in charts by name: "example", the two closed-form flat profiles
// "flat_product" (theta = u*v) and "flat_exponential" (theta = e^(u+v)), and
// "nonflat" (lambda1 = -3/2, lambda3 = 1 over the reference rectangle).
ChartPtr builtin_chart(const std::string& name, const Tolerances& tol = {});
std::vector<std::string> builtin_chart_names();

}  // namespace lsurf
