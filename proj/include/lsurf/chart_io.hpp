#pragma once

#include <array>
#include <string>

#include "json.hpp"
#include "lsurf/chart.hpp"
#include "lsurf/classify.hpp"
#include "lsurf/families.hpp"
#include "lsurf/tolerances.hpp"

namespace lsurf {

using Json = nlohmann::ordered_json;

// Declarative chart description, the JSON form used by chart files and the
// command line. Either a builtin name with family parameters or four raw
// component expressions.
struct ChartSpec {
  std::string builtin;  // example, flat_product, flat_exponential,
                        // flat_theta, nonflat; empty for component charts
  std::array<std::string, 4> components{};
  std::string coords = "uv";
  bool has_domain = false;
  Domain domain{};

  // flat_theta family
  std::string F = "0";
  std::string p = "exp(u)", q = "exp(v)";
  double c1 = 0, c2 = 0;
  int resolution = 40;
  int max_refinements = 5;

  // nonflat family
  std::string lambda1 = "-3/2", lambda3 = "1";
  double step = 1e-3;
  bool project = false;

  std::string cache;  // sidecar CSV with solved grid or trace data
};

ChartSpec chart_spec_from_json(const Json& j);
Json chart_spec_to_json(const ChartSpec& s);
ChartSpec load_chart_spec(const std::string& path);

// Applies one KEY=VALUE override; numeric fields parse the value, expression
// fields take it verbatim. Unknown keys are rejected.
void set_chart_param(ChartSpec& spec, const std::string& key,
                     const std::string& value);

// Domain used when the spec leaves it out, by family.
Domain default_chart_domain(const ChartSpec& spec);

// A constructed chart together with whatever backing data the family
// produced, so callers can persist and re-verify it.
struct BuiltChart {
  ChartPtr chart;
  ChartSpec spec;  // resolved: defaults and domain filled in
  ThetaFieldPtr theta;
  NonflatTracePtr trace;
};

// cache_dir: directory against which spec.cache is resolved; when the cache
// file exists it is loaded and re-validated instead of solving from scratch.
BuiltChart build_chart(const ChartSpec& spec, const Tolerances& tol = {},
                       const std::string& cache_dir = "");

// Flat serialization of a classification report; consumers add their own
// run metadata (chart kind, grid, ...) around it.
Json classification_report_json(const ClassificationReport& rep);

}  // namespace lsurf
