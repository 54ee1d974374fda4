#include "lsurf/gauss.hpp"

#include <algorithm>
#include <cmath>

#include "lsurf/error.hpp"

namespace lsurf {

namespace {

JetBivec6 wedge_jets(const JetVec4& a, const JetVec4& b) { return wedge(a, b); }

}  // namespace

Bivec6 gauss_map_at(const Chart& chart, double p0, double p1,
                    const Tolerances& tol) {
  FramePipeline pipe = run_frame_pipeline(chart, p0, p1, 3, tol);
  return wedge(value_of(pipe.X), value_of(pipe.Y));
}

GaussSample gauss_sample(const FramePipeline& pipe) {
  GaussSample s;
  s.p0 = pipe.p0;
  s.p1 = pipe.p1;

  Vec4 x = value_of(pipe.X);
  Vec4 y = value_of(pipe.Y);
  Vec4 n1 = value_of(pipe.N1);
  Vec4 n2 = value_of(pipe.N2);
  s.G = wedge(x, y);
  s.norm_residual = std::abs(inner6(s.G, s.G) + 1.0);

  s.lap_closed = -2.0 * pipe.K.value() * wedge(x, y) +
                 2.0 * pipe.kappa.value() * wedge(n1, n2) +
                 2.0 * pipe.beta2.value() * wedge(x, n1) -
                 2.0 * pipe.beta1.value() * wedge(y, n1);

  JetBivec6 g = wedge_jets(pipe.X, pipe.Y);
  for (int k = 0; k < 6; ++k)
    s.lap_direct[k] = pipe.laplacian(g[k]).value();

  s.mismatch = norm_e(s.lap_direct - s.lap_closed);
  return s;
}

GaussSample gauss_sample(const Chart& chart, double p0, double p1,
                         const Tolerances& tol) {
  return gauss_sample(run_frame_pipeline(chart, p0, p1, 3, tol));
}

PointAnalysis analyze_point(const Chart& chart, double p0, double p1,
                            const Tolerances& tol) {
  FramePipeline pipe = run_frame_pipeline(chart, p0, p1, 3, tol);
  PointAnalysis out;
  out.frame = pipe.data();
  out.gauss = gauss_sample(pipe);
  Vec4 lap;
  for (int k = 0; k < 4; ++k) lap[k] = pipe.laplacian(pipe.Z[k]).value();
  out.beltrami = norm_e(lap - 2.0 * value_of(pipe.N1));
  return out;
}

HarmonicReport harmonic_test(const Chart& chart, const GridSpec& grid,
                             const Tolerances& tol) {
  std::vector<double> ax0 = grid_axis(chart, 0, grid.n0, grid.margin);
  std::vector<double> ax1 = grid_axis(chart, 1, grid.n1, grid.margin);
  HarmonicReport rep;
  for (double p0 : ax0) {
    for (double p1 : ax1) {
      PointAnalysis pa = analyze_point(chart, p0, p1, tol);
      rep.max_lap_norm = std::max(
          rep.max_lap_norm,
          std::max(norm_e(pa.gauss.lap_closed), norm_e(pa.gauss.lap_direct)));
      rep.max_abs_K = std::max(rep.max_abs_K, std::abs(pa.frame.K));
      rep.max_abs_beta =
          std::max({rep.max_abs_beta, std::abs(pa.frame.beta1),
                    std::abs(pa.frame.beta2)});
    }
  }
  rep.harmonic = rep.max_lap_norm <= tol.harmonic;
  // A harmonic Gauss map forces zero curvature and vanishing normal
  // connection forms; report whether the invariants agree.
  rep.invariants_consistent =
      !rep.harmonic ||
      (rep.max_abs_K <= tol.harmonic && rep.max_abs_beta <= tol.harmonic);
  return rep;
}

}  // namespace lsurf
