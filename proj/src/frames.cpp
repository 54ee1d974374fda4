#include "lsurf/frames.hpp"

#include <algorithm>
#include <cmath>

#include "lsurf/error.hpp"

namespace lsurf {

namespace {

Jet inner4_jet(const JetVec4& a, const JetVec4& b) {
  return a[0] * b[0] + a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

JetVec4 div_comp(const JetVec4& w, const Jet& s) {
  JetVec4 out;
  for (int k = 0; k < 4; ++k) out[k] = w[k] / s;
  return out;
}

double sq(double v) { return v * v; }

}  // namespace

MetricAtPoint induced_metric(const Chart& chart, double p0, double p1) {
  JetVec4 z = chart.eval(p0, p1, 1);
  Vec4 zu = value_of(du(z));
  Vec4 zv = value_of(dv(z));
  return {inner4(zu, zu), inner4(zu, zv), inner4(zv, zv)};
}

Jet FramePipeline::dx(const Jet& w) const {
  if (coords == Coords::UV) return w.du() / f;
  return w.du();
}

Jet FramePipeline::dy(const Jet& w) const {
  if (coords == Coords::UV) return w.dv() / f;
  return f * w.du() + w.dv();
}

JetVec4 FramePipeline::dx(const JetVec4& w) const {
  JetVec4 out;
  for (int k = 0; k < 4; ++k) out[k] = dx(w[k]);
  return out;
}

JetVec4 FramePipeline::dy(const JetVec4& w) const {
  JetVec4 out;
  for (int k = 0; k < 4; ++k) out[k] = dy(w[k]);
  return out;
}

JetVec4 FramePipeline::tangential(const JetVec4& w) const {
  Jet wy = inner4_jet(w, Y);
  Jet wx = inner4_jet(w, X);
  JetVec4 out;
  for (int k = 0; k < 4; ++k) out[k] = -(wy * X[k]) - (wx * Y[k]);
  return out;
}

JetVec4 FramePipeline::normal(const JetVec4& w) const {
  JetVec4 t = tangential(w);
  JetVec4 out;
  for (int k = 0; k < 4; ++k) out[k] = w[k] - t[k];
  return out;
}

Jet FramePipeline::laplacian(const Jet& w) const {
  return dx(dy(w)) + dy(dx(w)) + gamma1 * dy(w) + gamma2 * dx(w);
}

FrameData FramePipeline::data() const {
  FrameData out;
  out.p0 = p0;
  out.p1 = p1;
  out.x = value_of(X);
  out.y = value_of(Y);
  out.n1 = value_of(N1);
  out.n2 = value_of(N2);
  out.H = -out.n1;
  out.f = f.value();
  out.gamma1 = gamma1.value();
  out.gamma2 = gamma2.value();
  out.a = a.value();
  out.b = b.value();
  out.c = c.value();
  out.d = d.value();
  out.beta1 = beta1.value();
  out.beta2 = beta2.value();
  out.K = K.value();
  out.kappa = kappa.value();
  out.frame_residual = frame_residual;
  return out;
}

FramePipeline run_frame_pipeline(const Chart& chart, double p0, double p1,
                                 int order, const Tolerances& tol) {
  if (order < 3 || order > Jet::kMaxOrder)
    throw Error(ErrorCode::InvalidOrder, "frame pipeline needs order 3 or 4")
        .with("order", double(order));

  FramePipeline pipe;
  pipe.coords = chart.coords();
  pipe.p0 = p0;
  pipe.p1 = p1;
  pipe.Z = chart.eval(p0, p1, order);

  JetVec4 zu = du(pipe.Z);
  JetVec4 zv = dv(pipe.Z);
  Jet g00 = inner4_jet(zu, zu);
  Jet g01 = inner4_jet(zu, zv);
  Jet g11 = inner4_jet(zv, zv);

  double scale_m = std::max({1.0, sq(norm_e(value_of(zu))),
                             sq(norm_e(value_of(zv)))});
  double mtol = tol.metric * scale_m;

  if (pipe.coords == Coords::UV) {
    if (std::abs(g00.value()) > mtol || std::abs(g11.value()) > mtol)
      throw Error(ErrorCode::NotNullCoordinates,
                  "coordinate curves are not null")
          .with("g00", g00.value())
          .with("g11", g11.value())
          .with("p0", p0)
          .with("p1", p1);
    if (g01.value() >= -mtol)
      throw Error(ErrorCode::NotNullCoordinates,
                  "mixed metric coefficient must be negative")
          .with("g01", g01.value())
          .with("p0", p0)
          .with("p1", p1);
    pipe.f = sqrt(-g01);
    pipe.X = div_comp(zu, pipe.f);
    pipe.Y = div_comp(zv, pipe.f);
  } else {
    if (std::abs(g00.value()) > mtol)
      throw Error(ErrorCode::NotNullCoordinates, "first coordinate not null")
          .with("g00", g00.value())
          .with("p0", p0)
          .with("p1", p1);
    if (std::abs(g01.value() + 1.0) > mtol)
      throw Error(ErrorCode::NotNullCoordinates,
                  "mixed metric coefficient must equal -1")
          .with("g01", g01.value())
          .with("p0", p0)
          .with("p1", p1);
    pipe.f = 0.5 * g11;
    pipe.X = zu;
    JetVec4 y;
    for (int k = 0; k < 4; ++k) y[k] = pipe.f * zu[k] + zv[k];
    pipe.Y = y;
  }

  pipe.N1 = pipe.normal(pipe.dx(pipe.Y));
  Vec4 n1v = value_of(pipe.N1);
  double hn = norm_e(n1v);
  if (hn <= tol.minimal)
    throw Error(ErrorCode::MinimalPoint, "mean curvature vanishes")
        .with("norm", hn)
        .with("p0", p0)
        .with("p1", p1);
  if (causal_class(n1v, tol.lightlike) != CausalClass::Lightlike)
    throw Error(ErrorCode::NotQuasiMinimal,
                "mean curvature vector is not lightlike")
        .with("HH", inner4(n1v, n1v))
        .with("p0", p0)
        .with("p1", p1);

  // Second normal direction: project a coordinate axis onto the normal
  // plane, rescale to pairing -1 with n1, then shift along n1 to make it
  // null. Pick the axis with the strongest pairing.
  int best = -1;
  double best_pair = 0;
  std::array<JetVec4, 4> proj;
  for (int k = 0; k < 4; ++k) {
    JetVec4 ek;
    for (int j = 0; j < 4; ++j)
      ek[j] = Jet::constant(j == k ? 1.0 : 0.0, pipe.Z[0].order());
    proj[k] = pipe.normal(ek);
    double pk = std::abs(inner4(value_of(proj[k]), n1v));
    if (pk > best_pair) {
      best_pair = pk;
      best = k;
    }
  }
  if (best < 0 || best_pair <= 1e-9 * std::max(1.0, hn))
    throw Error(ErrorCode::NotQuasiMinimal, "normal plane is degenerate")
        .with("pairing", best_pair)
        .with("p0", p0)
        .with("p1", p1);
  Jet pairing = inner4_jet(proj[best], pipe.N1);
  JetVec4 w0 = div_comp(proj[best], -pairing);
  Jet tau = 0.5 * inner4_jet(w0, w0);
  for (int k = 0; k < 4; ++k) pipe.N2[k] = w0[k] + tau * pipe.N1[k];

  JetVec4 dxx = pipe.dx(pipe.X);
  JetVec4 dyy = pipe.dy(pipe.Y);
  pipe.gamma1 = -inner4_jet(dxx, pipe.Y);
  pipe.gamma2 = -inner4_jet(dyy, pipe.X);
  JetVec4 hxx = pipe.normal(dxx);
  JetVec4 hyy = pipe.normal(dyy);
  pipe.a = -inner4_jet(hxx, pipe.N2);
  pipe.b = -inner4_jet(hxx, pipe.N1);
  pipe.c = -inner4_jet(hyy, pipe.N2);
  pipe.d = -inner4_jet(hyy, pipe.N1);
  pipe.beta1 = -inner4_jet(pipe.dx(pipe.N1), pipe.N2);
  pipe.beta2 = -inner4_jet(pipe.dy(pipe.N1), pipe.N2);
  pipe.K = pipe.a * pipe.d + pipe.b * pipe.c;
  pipe.kappa = pipe.a * pipe.d - pipe.b * pipe.c;

  Vec4 xv = value_of(pipe.X);
  Vec4 yv = value_of(pipe.Y);
  Vec4 n2v = value_of(pipe.N2);
  double res = 0;
  res = std::max(res, std::abs(inner4(xv, xv)));
  res = std::max(res, std::abs(inner4(yv, yv)));
  res = std::max(res, std::abs(inner4(xv, yv) + 1.0));
  res = std::max(res, std::abs(inner4(n1v, n1v)));
  res = std::max(res, std::abs(inner4(n2v, n2v)));
  res = std::max(res, std::abs(inner4(n1v, n2v) + 1.0));
  res = std::max(res, std::abs(inner4(xv, n1v)));
  res = std::max(res, std::abs(inner4(xv, n2v)));
  res = std::max(res, std::abs(inner4(yv, n1v)));
  res = std::max(res, std::abs(inner4(yv, n2v)));
  if (!std::isfinite(res))
    throw Error(ErrorCode::DegenerateSpan, "frame construction degenerated")
        .with("p0", p0)
        .with("p1", p1);
  pipe.frame_residual = res;
  return pipe;
}

FrameData build_frames(const Chart& chart, double p0, double p1,
                       const Tolerances& tol) {
  return run_frame_pipeline(chart, p0, p1, 3, tol).data();
}

double gaussian_curvature_from_metric(const Chart& chart, double p0,
                                      double p1) {
  JetVec4 z = chart.eval(p0, p1, 3);
  JetVec4 zu = du(z);
  JetVec4 zv = dv(z);
  if (chart.coords() == Coords::UV) {
    Jet g01 = inner4_jet(zu, zv);
    if (g01.value() >= 0)
      throw Error(ErrorCode::NotNullCoordinates,
                  "mixed metric coefficient must be negative")
          .with("g01", g01.value());
    Jet f = sqrt(-g01);
    double fv = f.value();
    return (2.0 * fv * f.deriv(1, 1) - 2.0 * f.deriv(1, 0) * f.deriv(0, 1)) /
           (fv * fv * fv * fv);
  }
  Jet ft = 0.5 * inner4_jet(zv, zv);
  return ft.deriv(2, 0);
}

Curvatures curvatures(const Chart& chart, double p0, double p1,
                      const Tolerances& tol) {
  FrameData fr = build_frames(chart, p0, p1, tol);
  Curvatures out;
  out.K = fr.K;
  out.kappa = fr.kappa;
  out.K_metric = gaussian_curvature_from_metric(chart, p0, p1);
  return out;
}

double StructureResiduals::max_abs() const {
  double m = 0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

namespace {

StructureResiduals residuals_from(const FramePipeline& pipe, const Jet& a,
                                  const Jet& b, const Jet& c, const Jet& d,
                                  const Jet& beta1, const Jet& beta2,
                                  const Jet& gamma1, const Jet& gamma2) {
  StructureResiduals out;
  out.r[0] = (pipe.dx(c) + c * beta1 + 2.0 * c * gamma1 - beta2).value();
  out.r[1] = (pipe.dx(d) - d * beta1 + 2.0 * d * gamma1).value();
  out.r[2] = (pipe.dy(a) + a * beta2 + 2.0 * a * gamma2 - beta1).value();
  out.r[3] = (pipe.dy(b) - b * beta2 + 2.0 * b * gamma2).value();
  out.r[4] = (pipe.dx(gamma2) + pipe.dy(gamma1) + 2.0 * gamma1 * gamma2 -
              (a * d + b * c))
                 .value();
  out.r[5] = (pipe.dx(beta2) - pipe.dy(beta1) - beta1 * gamma2 +
              beta2 * gamma1 - (a * d - b * c))
                 .value();
  return out;
}

}  // namespace

StructureResiduals integrability_residuals(const Chart& chart, double p0,
                                           double p1, const Tolerances& tol) {
  FramePipeline pipe = run_frame_pipeline(chart, p0, p1, Jet::kMaxOrder, tol);
  return residuals_from(pipe, pipe.a, pipe.b, pipe.c, pipe.d, pipe.beta1,
                        pipe.beta2, pipe.gamma1, pipe.gamma2);
}

StructureResiduals integrability_residuals_perturbed(
    const Chart& chart, double p0, double p1, CoefficientName which,
    double delta, const Tolerances& tol) {
  FramePipeline pipe = run_frame_pipeline(chart, p0, p1, Jet::kMaxOrder, tol);
  Jet a = pipe.a, b = pipe.b, c = pipe.c, d = pipe.d;
  Jet beta1 = pipe.beta1, beta2 = pipe.beta2;
  Jet gamma1 = pipe.gamma1, gamma2 = pipe.gamma2;
  Jet* target = nullptr;
  switch (which) {
    case CoefficientName::A: target = &a; break;
    case CoefficientName::B: target = &b; break;
    case CoefficientName::C: target = &c; break;
    case CoefficientName::D: target = &d; break;
    case CoefficientName::Beta1: target = &beta1; break;
    case CoefficientName::Beta2: target = &beta2; break;
    case CoefficientName::Gamma1: target = &gamma1; break;
    case CoefficientName::Gamma2: target = &gamma2; break;
  }
  *target += Jet::constant(delta, target->order());
  return residuals_from(pipe, a, b, c, d, beta1, beta2, gamma1, gamma2);
}

double beltrami_residual(const Chart& chart, double p0, double p1,
                         const Tolerances& tol) {
  FramePipeline pipe = run_frame_pipeline(chart, p0, p1, 3, tol);
  Vec4 lap;
  for (int k = 0; k < 4; ++k) lap[k] = pipe.laplacian(pipe.Z[k]).value();
  Vec4 diff = lap - 2.0 * value_of(pipe.N1);
  return norm_e(diff);
}

}  // namespace lsurf
