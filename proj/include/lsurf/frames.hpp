#pragma once

#include <array>

#include "lsurf/chart.hpp"
#include "lsurf/linalg.hpp"
#include "lsurf/tolerances.hpp"

namespace lsurf {

struct MetricAtPoint {
  double g00 = 0, g01 = 0, g11 = 0;
};

MetricAtPoint induced_metric(const Chart& chart, double p0, double p1);

// Frame and invariant values at a single surface point. x, y span the
// tangent plane with <x,x> = <y,y> = 0, <x,y> = -1; n1, n2 span the normal
// plane with <n1,n1> = <n2,n2> = 0, <n1,n2> = -1, and H = -n1.
struct FrameData {
  double p0 = 0, p1 = 0;
  Vec4 x{}, y{}, n1{}, n2{}, H{};
  double f = 0;         // conformal factor (UV) or half of g_tt (ST)
  double gamma1 = 0, gamma2 = 0;
  double a = 0, b = 0, c = 0, d = 0;
  double beta1 = 0, beta2 = 0;
  double K = 0, kappa = 0;
  double frame_residual = 0;  // worst pseudo-orthonormality violation
};

// Jet-valued moving frame around a point; the building block for invariant
// fields, Laplacians, and residual checks.
struct FramePipeline {
  Coords coords = Coords::UV;
  double p0 = 0, p1 = 0;
  Jet f;
  JetVec4 Z, X, Y, N1, N2;
  Jet a, b, c, d, beta1, beta2, gamma1, gamma2;
  Jet K, kappa;
  double frame_residual = 0;

  Jet dx(const Jet& w) const;
  Jet dy(const Jet& w) const;
  JetVec4 dx(const JetVec4& w) const;
  JetVec4 dy(const JetVec4& w) const;
  JetVec4 tangential(const JetVec4& w) const;
  JetVec4 normal(const JetVec4& w) const;
  // Laplace-Beltrami operator on a scalar jet field.
  Jet laplacian(const Jet& w) const;

  FrameData data() const;
};

FramePipeline run_frame_pipeline(const Chart& chart, double p0, double p1,
                                 int order, const Tolerances& tol = {});

FrameData build_frames(const Chart& chart, double p0, double p1,
                       const Tolerances& tol = {});

// Gaussian curvature straight from the induced metric, independent of the
// frame pipeline: the two routes must agree with K = ad + bc.
double gaussian_curvature_from_metric(const Chart& chart, double p0,
                                      double p1);

// Both curvature invariants from the frame pipeline next to the metric-only
// Gaussian curvature, so the two routes can be compared in one call.
struct Curvatures {
  double K = 0;
  double kappa = 0;
  double K_metric = 0;
};

Curvatures curvatures(const Chart& chart, double p0, double p1,
                      const Tolerances& tol = {});

// Residuals of the six structure equations tying the connection and shape
// coefficients together; all vanish on a genuine surface.
struct StructureResiduals {
  std::array<double, 6> r{};
  double max_abs() const;
};

enum class CoefficientName { A, B, C, D, Beta1, Beta2, Gamma1, Gamma2 };

StructureResiduals integrability_residuals(const Chart& chart, double p0,
                                           double p1,
                                           const Tolerances& tol = {});

// Same residuals after shifting one coefficient field by a constant; used to
// confirm the residuals actually react to corrupted data.
StructureResiduals integrability_residuals_perturbed(const Chart& chart,
                                                     double p0, double p1,
                                                     CoefficientName which,
                                                     double delta,
                                                     const Tolerances& tol = {});

// || Laplacian(z) + 2H ||, which vanishes identically on any surface.
double beltrami_residual(const Chart& chart, double p0, double p1,
                         const Tolerances& tol = {});

}  // namespace lsurf
