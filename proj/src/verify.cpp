#include "lsurf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "lsurf/error.hpp"
#include "lsurf/frames.hpp"
#include "lsurf/gauss.hpp"

namespace lsurf {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct Worst {
  double value = 0;
  double p0 = 0, p1 = 0;

  void update(double v, double p0_, double p1_) {
    if (v > value) {
      value = v;
      p0 = p0_;
      p1 = p1_;
    }
  }
  std::string note() const {
    return "worst at (" + fmt(p0) + ", " + fmt(p1) + ")";
  }
};

void for_grid(const Chart& chart, const GridSpec& grid,
              const std::function<void(double, double)>& fn) {
  auto axis0 = grid_axis(chart, 0, grid.n0, grid.margin);
  auto axis1 = grid_axis(chart, 1, grid.n1, grid.margin);
  for (double p0 : axis0)
    for (double p1 : axis1) fn(p0, p1);
}

SuiteResult suite_metric(const BuiltChart& built, const GridSpec& grid,
                         const Tolerances& tol) {
  Worst w;
  bool signs_ok = true;
  for_grid(*built.chart, grid, [&](double p0, double p1) {
    MetricAtPoint m = induced_metric(*built.chart, p0, p1);
    double res;
    if (built.chart->coords() == Coords::UV) {
      res = std::max(std::abs(m.g00), std::abs(m.g11)) /
            std::max(1.0, std::abs(m.g01));
      if (m.g01 >= 0) signs_ok = false;
    } else {
      res = std::max(std::abs(m.g00), std::abs(m.g01 + 1.0));
    }
    w.update(res, p0, p1);
  });
  SuiteResult r{"metric", signs_ok && w.value <= tol.metric, w.value,
                tol.metric, w.note()};
  if (!signs_ok) r.note = "mixed metric component lost its sign; " + r.note;
  return r;
}

SuiteResult suite_frames(const BuiltChart& built, const GridSpec& grid,
                         const Tolerances& tol) {
  Worst w;
  for_grid(*built.chart, grid, [&](double p0, double p1) {
    FrameData fd = build_frames(*built.chart, p0, p1, tol);
    w.update(fd.frame_residual, p0, p1);
  });
  return {"frames", w.value <= tol.frame, w.value, tol.frame, w.note()};
}

SuiteResult suite_integrability(const BuiltChart& built, const GridSpec& grid,
                                const Tolerances& tol) {
  Worst w;
  for_grid(*built.chart, grid, [&](double p0, double p1) {
    w.update(integrability_residuals(*built.chart, p0, p1, tol).max_abs(), p0,
             p1);
  });
  return {"integrability", w.value <= tol.integrability, w.value,
          tol.integrability, w.note()};
}

SuiteResult suite_beltrami(const BuiltChart& built, const GridSpec& grid,
                           const Tolerances& tol) {
  Worst w;
  for_grid(*built.chart, grid, [&](double p0, double p1) {
    w.update(beltrami_residual(*built.chart, p0, p1, tol), p0, p1);
  });
  return {"beltrami", w.value <= tol.beltrami, w.value, tol.beltrami,
          w.note()};
}

SuiteResult suite_laplacian(const BuiltChart& built, const GridSpec& grid,
                            const Tolerances& tol) {
  Worst w;
  for_grid(*built.chart, grid, [&](double p0, double p1) {
    GaussSample gs = gauss_sample(*built.chart, p0, p1, tol);
    double rel = gs.mismatch / std::max(1.0, norm_e(gs.lap_closed));
    w.update(rel, p0, p1);
  });
  return {"laplacian", w.value <= tol.laplacian, w.value, tol.laplacian,
          w.note()};
}

SuiteResult suite_gauss_norm(const BuiltChart& built, const GridSpec& grid,
                             const Tolerances& tol) {
  Worst w;
  for_grid(*built.chart, grid, [&](double p0, double p1) {
    w.update(gauss_sample(*built.chart, p0, p1, tol).norm_residual, p0, p1);
  });
  return {"gauss_norm", w.value <= tol.verify, w.value, tol.verify, w.note()};
}

SuiteResult suite_coefficients(const BuiltChart& built, const GridSpec& grid,
                               const Tolerances& tol) {
  ExprPtr l1 = parse_expr(built.spec.lambda1, single_var("t"));
  ExprPtr l3 = parse_expr(built.spec.lambda3, single_var("t"));
  Worst w;
  for_grid(*built.chart, grid, [&](double p0, double p1) {
    FrameData fd = build_frames(*built.chart, p0, p1, tol);
    CoefficientJets cj = coefficient_functions(l1, l3, p0, p1, 2);
    double res = 0;
    for (double gap :
         {fd.a - cj.a.value(), fd.c - cj.c.value(), fd.d - cj.d.value(),
          fd.beta2 - cj.beta2.value(), fd.f - cj.f.value(),
          fd.K - cj.K.value(), fd.b, fd.beta1})
      res = std::max(res, std::abs(gap));
    w.update(res, p0, p1);
  });
  return {"coefficients", w.value <= tol.verify, w.value, tol.verify,
          w.note()};
}

SuiteResult suite_constraints(const BuiltChart& built, const Tolerances& tol) {
  ExprPtr l3 = parse_expr(built.spec.lambda3, single_var("t"));
  Worst w;
  for (const OdeState& st : built.trace->states) {
    double target = 1.0 / eval_value(l3, st.t, st.t);
    double res = 0;
    for (double gap :
         {inner4(st.n1, st.n1), inner4(st.n1p, st.n1p), inner4(st.n1, st.n1p),
          inner4(st.n1, st.xip), inner4(st.xip, st.xip),
          inner4(st.n1p, st.xip) - target})
      res = std::max(res, std::abs(gap));
    w.update(res, st.t, 0);
  }
  SuiteResult r{"constraints", w.value <= tol.drift, w.value, tol.drift, ""};
  r.note = "worst at t = " + fmt(w.p0);
  return r;
}

SuiteResult suite_goursat(const BuiltChart& built, const Tolerances& tol) {
  double res = built.theta->residual();
  SuiteResult r{"goursat", res <= tol.goursat, res, tol.goursat, ""};
  r.note = "refinement gap " + fmt(built.theta->refinement_gap());
  return r;
}

SuiteResult suite_jets(const BuiltChart& built, const Tolerances& tol) {
  const Chart& chart = *built.chart;
  const Domain& d = chart.domain();
  FdDomain fdd{d.lo0, d.hi0, d.lo1, d.hi1};
  // Interior sampling: a stencil squeezed against the boundary measures the
  // oracle's own noise floor, not the jet.
  std::mt19937 rng(20240117u);
  std::uniform_real_distribution<double> r0(d.lo0 + 0.05 * d.span0(),
                                            d.hi0 - 0.05 * d.span0());
  std::uniform_real_distribution<double> r1(d.lo1 + 0.05 * d.span1(),
                                            d.hi1 - 0.05 * d.span1());
  Worst w;
  for (int pt = 0; pt < 20; ++pt) {
    double p0 = r0(rng), p1 = r1(rng);
    JetVec4 z = chart.eval(p0, p1, 3);
    for (int comp = 0; comp < 4; ++comp) {
      auto f = [&chart, comp](double u, double v) {
        return chart.position(u, v)[comp];
      };
      for (int iu = 0; iu <= 3; ++iu)
        for (int jv = 0; iu + jv <= 3; ++jv) {
          if (iu + jv == 0) continue;
          double fd = finite_difference_oracle(f, p0, p1, iu, jv, &fdd);
          double rel =
              std::abs(z[comp].deriv(iu, jv) - fd) / std::max(1.0, std::abs(fd));
          w.update(rel, p0, p1);
        }
    }
  }
  return {"jets", w.value <= tol.verify, w.value, tol.verify, w.note()};
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  return {"metric",     "frames",       "integrability", "beltrami",
          "laplacian",  "gauss_norm",   "coefficients",  "constraints",
          "goursat",    "jets"};
}

std::vector<std::string> applicable_suites(const BuiltChart& built) {
  std::vector<std::string> out;
  for (const std::string& name : verify_suite_names()) {
    if ((name == "coefficients" || name == "constraints") && !built.trace)
      continue;
    if (name == "goursat" && !built.theta) continue;
    if (name == "jets" && built.theta) continue;
    out.push_back(name);
  }
  return out;
}

std::vector<SuiteResult> run_verify(const BuiltChart& built,
                                    const std::vector<std::string>& suites,
                                    const GridSpec& grid,
                                    const Tolerances& tol) {
  auto known = verify_suite_names();
  auto usable = applicable_suites(built);
  std::vector<SuiteResult> out;
  for (const std::string& name : suites) {
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw Error(ErrorCode::BadInput, "unknown verification suite")
          .with("suite", name);
    if (std::find(usable.begin(), usable.end(), name) == usable.end())
      throw Error(ErrorCode::BadInput,
                  "suite does not apply to this chart kind")
          .with("suite", name)
          .with("kind", built.chart->kind());
    if (name == "metric")
      out.push_back(suite_metric(built, grid, tol));
    else if (name == "frames")
      out.push_back(suite_frames(built, grid, tol));
    else if (name == "integrability")
      out.push_back(suite_integrability(built, grid, tol));
    else if (name == "beltrami")
      out.push_back(suite_beltrami(built, grid, tol));
    else if (name == "laplacian")
      out.push_back(suite_laplacian(built, grid, tol));
    else if (name == "gauss_norm")
      out.push_back(suite_gauss_norm(built, grid, tol));
    else if (name == "coefficients")
      out.push_back(suite_coefficients(built, grid, tol));
    else if (name == "constraints")
      out.push_back(suite_constraints(built, tol));
    else if (name == "goursat")
      out.push_back(suite_goursat(built, tol));
    else
      out.push_back(suite_jets(built, tol));
  }
  return out;
}

Json suite_results_json(const std::vector<SuiteResult>& rows) {
  Json out = Json::array();
  for (const SuiteResult& r : rows) {
    Json j = Json::object();
    j["suite"] = r.suite;
    j["pass"] = r.pass;
    j["max_residual"] = r.max_residual;
    j["tolerance"] = r.tolerance;
    j["note"] = r.note;
    out.push_back(j);
  }
  return out;
}

}  // namespace lsurf
