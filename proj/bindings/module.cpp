// Python extension: chart construction, pointwise frame and Gauss-map data,
// classification, and the verification suites, mirroring the CLI surface.
// Reports cross the boundary as JSON text; the package wrapper turns them
// into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <map>
#include <string>
#include <vector>

#include "lsurf/chart_io.hpp"
#include "lsurf/classify.hpp"
#include "lsurf/error.hpp"
#include "lsurf/frames.hpp"
#include "lsurf/gauss.hpp"
#include "lsurf/verify.hpp"

namespace py = pybind11;

namespace lsurf {
namespace {

using TolMap = std::map<std::string, double>;

Tolerances tolerances_from(const TolMap& kv) {
  Tolerances t;
  for (const auto& [key, value] : kv) t.set(key, value);
  return t;
}

BuiltChart build_from_json_text(const std::string& text, const TolMap& tol) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw Error(ErrorCode::BadInput, "chart spec is not valid JSON");
  return build_chart(chart_spec_from_json(j), tolerances_from(tol));
}

py::dict frame_dict(const FrameData& fd) {
  py::dict out;
  out["p0"] = fd.p0;
  out["p1"] = fd.p1;
  out["x"] = fd.x.c;
  out["y"] = fd.y.c;
  out["n1"] = fd.n1.c;
  out["n2"] = fd.n2.c;
  out["H"] = fd.H.c;
  out["f"] = fd.f;
  out["gamma1"] = fd.gamma1;
  out["gamma2"] = fd.gamma2;
  out["a"] = fd.a;
  out["b"] = fd.b;
  out["c"] = fd.c;
  out["d"] = fd.d;
  out["beta1"] = fd.beta1;
  out["beta2"] = fd.beta2;
  out["K"] = fd.K;
  out["kappa"] = fd.kappa;
  out["frame_residual"] = fd.frame_residual;
  return out;
}

py::dict gauss_dict(const GaussSample& g) {
  py::dict out;
  out["p0"] = g.p0;
  out["p1"] = g.p1;
  out["G"] = g.G.c;
  out["lap_closed"] = g.lap_closed.c;
  out["lap_direct"] = g.lap_direct.c;
  out["mismatch"] = g.mismatch;
  out["norm_residual"] = g.norm_residual;
  return out;
}

}  // namespace
}  // namespace lsurf

PYBIND11_MODULE(_core, m) {
  using namespace lsurf;

  m.doc() = "Quasi-minimal Lorentz surface toolkit (native core)";

  static py::exception<Error> error_type(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      std::string msg =
          std::string(error_code_name(e.code())) + ": " + e.what();
      for (const auto& [key, value] : e.details())
        msg += "\n  " + key + " = " + value;
      py::set_error(error_type, msg.c_str());
    }
  });

  py::class_<BuiltChart>(m, "Chart", "A built surface chart.")
      .def_property_readonly(
          "kind", [](const BuiltChart& b) { return b.chart->kind(); })
      .def_property_readonly(
          "coords",
          [](const BuiltChart& b) {
            return std::string(coords_name(b.chart->coords()));
          })
      .def_property_readonly(
          "domain",
          [](const BuiltChart& b) {
            const Domain& d = b.chart->domain();
            return py::make_tuple(d.lo0, d.hi0, d.lo1, d.hi1);
          })
      .def_property_readonly(
          "spec_json",
          [](const BuiltChart& b) { return chart_spec_to_json(b.spec).dump(); },
          "Resolved chart spec as JSON text.")
      .def(
          "position",
          [](const BuiltChart& b, double p0, double p1) {
            return b.chart->position(p0, p1).c;
          },
          py::arg("p0"), py::arg("p1"))
      .def(
          "jet",
          [](const BuiltChart& b, double p0, double p1, int order) {
            JetVec4 z = b.chart->eval(p0, p1, order);
            py::dict out;
            for (int i = 0; i <= order; ++i)
              for (int j = 0; i + j <= order; ++j) {
                std::array<double, 4> comp{};
                for (int k = 0; k < 4; ++k) comp[k] = z[k].deriv(i, j);
                out[py::make_tuple(i, j)] = comp;
              }
            return out;
          },
          py::arg("p0"), py::arg("p1"), py::arg("order") = 3,
          "Partial derivatives of the immersion: {(i, j): [4 components]}.")
      .def(
          "axis_nodes",
          [](const BuiltChart& b, int axis) {
            return b.chart->axis_nodes(axis);
          },
          py::arg("axis"),
          "Stored nodes along an axis; empty for continuous charts.")
      .def(
          "grid_axis",
          [](const BuiltChart& b, int axis, int n, double margin) {
            return grid_axis(*b.chart, axis, n, margin);
          },
          py::arg("axis"), py::arg("n"), py::arg("margin") = 0.0);

  m.def("builtin_chart_names", &builtin_chart_names);
  m.def("suite_names", &verify_suite_names,
        "Every verification suite name in canonical order.");

  m.def("build_chart", &build_from_json_text, py::arg("spec_json"),
        py::arg("tolerances") = TolMap{},
        "Build a chart from a JSON spec string.");
  m.def(
      "builtin_chart",
      [](const std::string& name, const TolMap& tol) {
        ChartSpec spec;
        spec.builtin = name;
        return build_chart(spec, tolerances_from(tol));
      },
      py::arg("name"), py::arg("tolerances") = TolMap{});

  m.def(
      "metric",
      [](const BuiltChart& b, double p0, double p1) {
        MetricAtPoint g = induced_metric(*b.chart, p0, p1);
        py::dict out;
        out["g00"] = g.g00;
        out["g01"] = g.g01;
        out["g11"] = g.g11;
        return out;
      },
      py::arg("chart"), py::arg("p0"), py::arg("p1"),
      "Induced metric components at a point.");

  m.def(
      "frame",
      [](const BuiltChart& b, double p0, double p1, const TolMap& tol) {
        return frame_dict(build_frames(*b.chart, p0, p1, tolerances_from(tol)));
      },
      py::arg("chart"), py::arg("p0"), py::arg("p1"),
      py::arg("tolerances") = TolMap{},
      "Null frame, shape coefficients, and curvature invariants at a point.");

  m.def(
      "integrability",
      [](const BuiltChart& b, double p0, double p1, const TolMap& tol) {
        return integrability_residuals(*b.chart, p0, p1, tolerances_from(tol))
            .r;
      },
      py::arg("chart"), py::arg("p0"), py::arg("p1"),
      py::arg("tolerances") = TolMap{},
      "Residuals of the six structure equations at a point.");

  m.def(
      "beltrami",
      [](const BuiltChart& b, double p0, double p1, const TolMap& tol) {
        return beltrami_residual(*b.chart, p0, p1, tolerances_from(tol));
      },
      py::arg("chart"), py::arg("p0"), py::arg("p1"),
      py::arg("tolerances") = TolMap{},
      "|| Laplacian(z) + 2H || at a point.");

  m.def(
      "gauss",
      [](const BuiltChart& b, double p0, double p1, const TolMap& tol) {
        return gauss_dict(gauss_sample(*b.chart, p0, p1, tolerances_from(tol)));
      },
      py::arg("chart"), py::arg("p0"), py::arg("p1"),
      py::arg("tolerances") = TolMap{},
      "Gauss map and its Laplacian by both routes at a point.");

  m.def(
      "classify_json",
      [](const BuiltChart& b, int n0, int n1, double margin,
         const TolMap& tol) {
        GridSpec grid{n0, n1, margin};
        return classification_report_json(
                   classify(*b.chart, grid, tolerances_from(tol)))
            .dump();
      },
      py::arg("chart"), py::arg("n0") = 20, py::arg("n1") = 20,
      py::arg("margin") = 0.0, py::arg("tolerances") = TolMap{},
      "Classification report over a sampling grid, as JSON text.");

  m.def(
      "applicable_suites",
      [](const BuiltChart& b) { return applicable_suites(b); },
      py::arg("chart"));

  m.def(
      "verify_json",
      [](const BuiltChart& b, const std::vector<std::string>& suites, int n0,
         int n1, double margin, const TolMap& tol) {
        std::vector<std::string> wanted =
            suites.empty() ? applicable_suites(b) : suites;
        return suite_results_json(
                   run_verify(b, wanted, GridSpec{n0, n1, margin},
                              tolerances_from(tol)))
            .dump();
      },
      py::arg("chart"), py::arg("suites") = std::vector<std::string>{},
      py::arg("n0") = 20, py::arg("n1") = 20, py::arg("margin") = 0.0,
      py::arg("tolerances") = TolMap{},
      "Verification suite results over a sampling grid, as JSON text.");
}
