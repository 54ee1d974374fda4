#include "lsurf/chart_io.hpp"

#include <cstdio>
#include <filesystem>
#include <numbers>
#include <fstream>

#include "lsurf/error.hpp"

namespace lsurf {

namespace {

Domain domain_from_json(const Json& j) {
  Domain d;
  auto read_axis = [&j](const char* a, const char* b, double& lo, double& hi,
                        bool& seen) {
    for (const char* key : {a, b}) {
      if (!j.contains(key)) continue;
      const Json& v = j.at(key);
      if (!v.is_array() || v.size() != 2)
        throw Error(ErrorCode::BadInput,
                    "domain axis must be a [lo, hi] pair")
            .with("axis", key);
      lo = v.at(0).get<double>();
      hi = v.at(1).get<double>();
      seen = true;
    }
  };
  bool seen0 = false, seen1 = false;
  read_axis("u", "s", d.lo0, d.hi0, seen0);
  read_axis("v", "t", d.lo1, d.hi1, seen1);
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (key != "u" && key != "v" && key != "s" && key != "t")
      throw Error(ErrorCode::BadInput, "unknown domain key").with("key", key);
  }
  if (!seen0 || !seen1)
    throw Error(ErrorCode::BadInput,
                "domain needs both axes (u/v or s/t) as [lo, hi] pairs");
  if (!(d.hi0 > d.lo0) || !(d.hi1 > d.lo1))
    throw Error(ErrorCode::BadInput, "domain spans must be positive")
        .with("span0", d.span0())
        .with("span1", d.span1());
  return d;
}

Json domain_to_json(const Domain& d, Coords coords) {
  Json j = Json::object();
  const char* k0 = coords == Coords::ST ? "s" : "u";
  const char* k1 = coords == Coords::ST ? "t" : "v";
  j[k0] = Json::array({d.lo0, d.hi0});
  j[k1] = Json::array({d.lo1, d.hi1});
  return j;
}

Coords parse_coords(const std::string& name) {
  if (name == "uv") return Coords::UV;
  if (name == "st") return Coords::ST;
  throw Error(ErrorCode::BadInput, "coords must be uv or st")
      .with("coords", name);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double x = std::stod(value, &used);
    if (used != value.size())
      throw Error(ErrorCode::BadInput, "trailing characters in number");
    return x;
  } catch (const Error&) {
    throw Error(ErrorCode::BadInput, "parameter expects a number")
        .with("key", key)
        .with("value", value);
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadInput, "parameter expects a number")
        .with("key", key)
        .with("value", value);
  }
}

int to_int(const std::string& key, const std::string& value) {
  double x = to_double(key, value);
  int n = static_cast<int>(x);
  if (static_cast<double>(n) != x)
    throw Error(ErrorCode::BadInput, "parameter expects an integer")
        .with("key", key)
        .with("value", value);
  return n;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(ErrorCode::BadInput, "parameter expects true or false")
      .with("key", key)
      .with("value", value);
}

bool is_flat_theta(const ChartSpec& s) { return s.builtin == "flat_theta"; }
bool is_nonflat(const ChartSpec& s) { return s.builtin == "nonflat"; }

Coords spec_coords(const ChartSpec& s) {
  if (s.builtin.empty()) return parse_coords(s.coords);
  if (s.builtin == "example" || is_nonflat(s)) return Coords::ST;
  return Coords::UV;
}

}  // namespace

ChartSpec chart_spec_from_json(const Json& j) {
  if (!j.is_object())
    throw Error(ErrorCode::BadInput, "chart spec must be a JSON object");
  ChartSpec s;
  bool has_components = false;
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const Json& v = item.value();
    if (key == "builtin") {
      s.builtin = v.get<std::string>();
    } else if (key == "components") {
      if (!v.is_array() || v.size() != 4)
        throw Error(ErrorCode::BadInput,
                    "components must be an array of four expressions");
      for (std::size_t k = 0; k < 4; ++k)
        s.components[k] = v.at(k).get<std::string>();
      has_components = true;
    } else if (key == "coords") {
      s.coords = v.get<std::string>();
      parse_coords(s.coords);
    } else if (key == "domain") {
      s.domain = domain_from_json(v);
      s.has_domain = true;
    } else if (key == "F") {
      s.F = v.get<std::string>();
    } else if (key == "p") {
      s.p = v.get<std::string>();
    } else if (key == "q") {
      s.q = v.get<std::string>();
    } else if (key == "c1") {
      s.c1 = v.get<double>();
    } else if (key == "c2") {
      s.c2 = v.get<double>();
    } else if (key == "resolution") {
      s.resolution = v.get<int>();
    } else if (key == "max_refinements") {
      s.max_refinements = v.get<int>();
    } else if (key == "lambda1") {
      s.lambda1 = v.get<std::string>();
    } else if (key == "lambda3") {
      s.lambda3 = v.get<std::string>();
    } else if (key == "step") {
      s.step = v.get<double>();
    } else if (key == "project") {
      s.project = v.get<bool>();
    } else if (key == "cache") {
      s.cache = v.get<std::string>();
    } else {
      throw Error(ErrorCode::BadInput, "unknown chart spec key")
          .with("key", key);
    }
  }
  if (s.builtin.empty() && !has_components)
    throw Error(ErrorCode::BadInput,
                "chart spec needs a builtin name or four components");
  if (!s.builtin.empty() && has_components)
    throw Error(ErrorCode::BadInput,
                "chart spec cannot mix builtin and components");
  return s;
}

Json chart_spec_to_json(const ChartSpec& s) {
  Json j = Json::object();
  if (!s.builtin.empty()) {
    j["builtin"] = s.builtin;
  } else {
    j["components"] = Json::array(
        {s.components[0], s.components[1], s.components[2], s.components[3]});
    j["coords"] = s.coords;
  }
  if (s.has_domain) j["domain"] = domain_to_json(s.domain, spec_coords(s));
  if (is_flat_theta(s)) {
    j["F"] = s.F;
    j["c1"] = s.c1;
    j["c2"] = s.c2;
    j["p"] = s.p;
    j["q"] = s.q;
    j["resolution"] = s.resolution;
    j["max_refinements"] = s.max_refinements;
  }
  if (is_nonflat(s)) {
    j["lambda1"] = s.lambda1;
    j["lambda3"] = s.lambda3;
    j["step"] = s.step;
    j["project"] = s.project;
  }
  if (!s.cache.empty()) j["cache"] = s.cache;
  return j;
}

ChartSpec load_chart_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::BadInput, "cannot open chart file")
        .with("path", path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::BadInput, "chart file is not valid JSON")
        .with("path", path)
        .with("detail", e.what());
  }
  return chart_spec_from_json(j);
}

void set_chart_param(ChartSpec& spec, const std::string& key,
                     const std::string& value) {
  if (key == "F")
    spec.F = value;
  else if (key == "p")
    spec.p = value;
  else if (key == "q")
    spec.q = value;
  else if (key == "lambda1")
    spec.lambda1 = value;
  else if (key == "lambda3")
    spec.lambda3 = value;
  else if (key == "cache")
    spec.cache = value;
  else if (key == "c1")
    spec.c1 = to_double(key, value);
  else if (key == "c2")
    spec.c2 = to_double(key, value);
  else if (key == "step")
    spec.step = to_double(key, value);
  else if (key == "resolution")
    spec.resolution = to_int(key, value);
  else if (key == "max_refinements")
    spec.max_refinements = to_int(key, value);
  else if (key == "project")
    spec.project = to_bool(key, value);
  else
    throw Error(ErrorCode::BadInput, "unknown chart parameter")
        .with("key", key);
}

Domain default_chart_domain(const ChartSpec& spec) {
  if (spec.builtin == "example" || is_nonflat(spec))
    return Domain{1, 9, 0, 2 * std::numbers::pi};
  if (spec.builtin == "flat_product" || spec.builtin == "flat_exponential")
    return Domain{-1, 1, -1, 1};
  return Domain{0, 1, 0, 1};
}

namespace {

std::string resolve_cache(const std::string& cache,
                          const std::string& cache_dir) {
  std::filesystem::path p(cache);
  if (p.is_absolute() || cache_dir.empty()) return cache;
  return (std::filesystem::path(cache_dir) / p).string();
}

BuiltChart build_flat_theta(const ChartSpec& in, const Tolerances& tol,
                            const std::string& cache_dir) {
  BuiltChart out;
  out.spec = in;
  if (!out.spec.has_domain) {
    out.spec.domain = default_chart_domain(in);
    out.spec.has_domain = true;
  }
  out.spec.coords = "uv";
  FlatThetaSpec fs;
  fs.F = parse_expr(in.F, single_var("w"));
  fs.c1 = in.c1;
  fs.c2 = in.c2;
  fs.p = parse_expr(in.p);
  fs.q = parse_expr(in.q);
  fs.domain = out.spec.domain;
  fs.resolution = in.resolution;
  fs.max_refinements = in.max_refinements;

  std::string cache_path = resolve_cache(in.cache, cache_dir);
  if (!in.cache.empty() && std::filesystem::exists(cache_path)) {
    ThetaGridValues grid = load_theta_values_csv(cache_path);
    out.theta = theta_field_from_values(grid, fs, tol);
  } else {
    out.theta = goursat_solve(fs, tol);
  }
  out.chart = bd_zero_surface(out.theta, tol);
  return out;
}

BuiltChart build_nonflat(const ChartSpec& in, const Tolerances& tol,
                         const std::string& cache_dir) {
  BuiltChart out;
  out.spec = in;
  NonFlatSpec ns;
  ns.lambda1 = parse_expr(in.lambda1, single_var("t"));
  ns.lambda3 = parse_expr(in.lambda3, single_var("t"));
  ns.domain = in.has_domain ? in.domain : default_chart_domain(in);
  ns.step = in.step;
  ns.project = in.project;
  out.spec.domain = ns.domain;
  out.spec.has_domain = true;
  out.spec.coords = "st";

  std::string cache_path = resolve_cache(in.cache, cache_dir);
  if (!in.cache.empty() && std::filesystem::exists(cache_path)) {
    out.trace = NonflatTrace::load_csv(cache_path);
  } else {
    out.trace = nonflat_trace(ns, tol);
  }
  out.chart = nonflat_chart(ns, out.trace, tol);
  return out;
}

}  // namespace

BuiltChart build_chart(const ChartSpec& spec, const Tolerances& tol,
                       const std::string& cache_dir) {
  if (spec.builtin == "flat_theta") return build_flat_theta(spec, tol, cache_dir);
  if (spec.builtin == "nonflat") return build_nonflat(spec, tol, cache_dir);

  BuiltChart out;
  out.spec = spec;
  Domain d = spec.has_domain ? spec.domain : default_chart_domain(spec);
  if (spec.builtin == "example") {
    out.chart = example_chart(d);
    out.spec.coords = "st";
  } else if (spec.builtin == "flat_product" ||
             spec.builtin == "flat_exponential") {
    const char* theta =
        spec.builtin == "flat_product" ? "u*v" : "exp(u + v)";
    out.chart = bd_zero_surface(parse_expr(theta), d, tol);
    out.spec.coords = "uv";
  } else if (spec.builtin.empty()) {
    out.chart = make_expr_chart(spec.components, parse_coords(spec.coords), d);
  } else {
    throw Error(ErrorCode::BadInput, "unknown builtin chart")
        .with("name", spec.builtin);
  }
  out.spec.domain = out.chart->domain();
  out.spec.has_domain = true;
  return out;
}

Json classification_report_json(const ClassificationReport& r) {
  Json j = Json::object();
  j["verdict"] = verdict_name(r.verdict);
  j["proper"] = r.proper;
  j["samples"] = r.samples;
  j["stage"] = r.stage;
  j["phi_min"] = r.phi_min;
  j["phi_max"] = r.phi_max;
  j["phi_spread"] = r.phi_spread;
  Json c = Json::array();
  for (double x : r.C.c) c.push_back(x);
  j["C"] = c;
  j["c_norm"] = r.c_norm;
  j["drift"] = r.drift;
  j["fit_residual"] = r.fit_residual;
  Json cond = Json::array();
  for (double x : r.condition_max) cond.push_back(x);
  j["condition_max"] = cond;
  j["max_condition_residual"] = r.max_condition_residual;
  j["max_gauss_norm_residual"] = r.max_gauss_norm_residual;
  j["max_lap_mismatch"] = r.max_lap_mismatch;
  j["max_frame_residual"] = r.max_frame_residual;
  j["max_beltrami"] = r.max_beltrami;
  j["harmonic_max_lap"] = r.harmonic_max_lap;
  j["phi_vs_minus2K"] = r.phi_vs_minus2K;
  j["phi_vs_minus4K"] = r.phi_vs_minus4K;
  j["parallel_check_applicable"] = r.parallel_check_applicable;
  j["parallel_check_pass"] = r.parallel_check_pass;
  j["max_abs_beta"] = r.max_abs_beta;
  j["max_abs_kappa"] = r.max_abs_kappa;
  j["min_abs_K"] = r.min_abs_K;
  if (!r.failure_reason.empty()) {
    j["failure_reason"] = r.failure_reason;
    j["fail_p0"] = r.fail_p0;
    j["fail_p1"] = r.fail_p1;
  }
  return j;
}

}  // namespace lsurf
