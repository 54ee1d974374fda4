#pragma once

#include <vector>

#include "lsurf/frames.hpp"

namespace lsurf {

// Gauss map value and its Laplacian at one point, computed two independent
// ways: once from the frame invariants and once by differentiating the
// wedge field directly.
struct GaussSample {
  double p0 = 0, p1 = 0;
  Bivec6 G{};
  Bivec6 lap_closed{};
  Bivec6 lap_direct{};
  double mismatch = 0;  // Euclidean gap between the two Laplacian routes
  double norm_residual = 0;  // |<G,G> + 1|
};

Bivec6 gauss_map_at(const Chart& chart, double p0, double p1,
                    const Tolerances& tol = {});

GaussSample gauss_sample(const FramePipeline& pipe);
GaussSample gauss_sample(const Chart& chart, double p0, double p1,
                         const Tolerances& tol = {});

// Everything the classifier needs from one grid point.
struct PointAnalysis {
  FrameData frame;
  GaussSample gauss;
  double beltrami = 0;  // || Laplacian(z) + 2H ||
};

PointAnalysis analyze_point(const Chart& chart, double p0, double p1,
                            const Tolerances& tol = {});

// Harmonicity of the Gauss map over a sampling grid, with the invariant
// profile that must accompany it (flat metric, parallel mean curvature).
struct HarmonicReport {
  bool harmonic = false;
  double max_lap_norm = 0;
  double max_abs_K = 0;
  double max_abs_beta = 0;
  bool invariants_consistent = false;
};

HarmonicReport harmonic_test(const Chart& chart, const GridSpec& grid,
                             const Tolerances& tol = {});

}  // namespace lsurf
