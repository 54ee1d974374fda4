// Command-line front end: construct, classify, verify, and sweep runs over
// quasi-minimal Lorentz surface charts, emitting machine-readable JSON and
// CSV with deterministic formatting.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lsurf/chart_io.hpp"
#include "lsurf/classify.hpp"
#include "lsurf/error.hpp"
#include "lsurf/frames.hpp"
#include "lsurf/gauss.hpp"
#include "lsurf/verify.hpp"

namespace {

using namespace lsurf;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct CommonOpts {
  std::string builtin;
  std::string chart_file;
  std::string config_file;
  std::string grid = "20x20";
  double margin = 0;
  std::string out = ".";
  std::string domain;
  std::string axis0, axis1;
  std::vector<std::string> tols;
  std::vector<std::string> params;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool sweep_mode) {
  cmd->add_option("--builtin", o.builtin, "Builtin chart name");
  cmd->add_option("--chart-file", o.chart_file, "Chart spec JSON file");
  cmd->add_option("--config", o.config_file,
                  "Run config JSON (chart spec plus grid/tol/out keys)");
  cmd->add_option("--grid", o.grid, "Sampling grid, NxM (min 4x4)");
  cmd->add_option("--margin", o.margin,
                  "Fraction of each span trimmed from the grid edges");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--domain", o.domain, "Domain override, lo0:hi0,lo1:hi1");
  cmd->add_option("--s,--u", o.axis0, "First-axis range, lo:hi");
  cmd->add_option("--t,--v", o.axis1, "Second-axis range, lo:hi");
  cmd->add_option("--tol", o.tols, "Tolerance override, KEY=VAL");
  cmd->add_option("--param", o.params,
                  sweep_mode ? "Chart parameter KEY=VAL, or the bare "
                               "parameter name being swept"
                             : "Chart parameter override, KEY=VAL");
}

std::pair<double, double> parse_range_pair(const std::string& text,
                                           const std::string& what) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    throw Error(ErrorCode::BadInput, what + " must look like lo:hi")
        .with("value", text);
  try {
    double lo = std::stod(text.substr(0, colon));
    double hi = std::stod(text.substr(colon + 1));
    return {lo, hi};
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadInput, what + " must hold two numbers")
        .with("value", text);
  }
}

GridSpec parse_grid(const std::string& text, double margin) {
  GridSpec g;
  g.margin = margin;
  auto x = text.find('x');
  if (x == std::string::npos)
    throw Error(ErrorCode::BadInput, "grid must look like NxM")
        .with("value", text);
  try {
    g.n0 = std::stoi(text.substr(0, x));
    g.n1 = std::stoi(text.substr(x + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadInput, "grid must hold two integers")
        .with("value", text);
  }
  if (g.n0 < 4 || g.n1 < 4)
    throw Error(ErrorCode::BadInput, "grid must be at least 4x4")
        .with("value", text);
  if (margin < 0 || margin >= 0.5)
    throw Error(ErrorCode::BadInput, "margin must lie in [0, 0.5)")
        .with("margin", margin);
  return g;
}

std::pair<std::string, std::string> split_kv(const std::string& text,
                                             const std::string& what) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(ErrorCode::BadInput, what + " must look like KEY=VAL")
        .with("value", text);
  return {text.substr(0, eq), text.substr(eq + 1)};
}

// Everything a command needs after flag and config resolution.
struct Run {
  ChartSpec spec;
  GridSpec grid;
  Tolerances tol;
  std::string out;
  std::vector<std::string> suites;
};

Run resolve_run(const CommonOpts& o) {
  Run run;
  bool have_spec = false;

  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in)
      throw Error(ErrorCode::BadInput, "cannot open config file")
          .with("path", o.config_file);
    Json cfg;
    try {
      in >> cfg;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::BadInput, "config file is not valid JSON")
          .with("path", o.config_file)
          .with("detail", e.what());
    }
    if (!cfg.is_object())
      throw Error(ErrorCode::BadInput, "config must be a JSON object");
    Json chart_part = Json::object();
    for (const auto& item : cfg.items()) {
      const std::string& key = item.key();
      if (key == "grid") {
        run.grid = parse_grid(item.value().get<std::string>(), run.grid.margin);
      } else if (key == "margin") {
        run.grid.margin = item.value().get<double>();
      } else if (key == "out") {
        run.out = item.value().get<std::string>();
      } else if (key == "tol") {
        for (const auto& t : item.value().items())
          run.tol.set(t.key(), t.value().get<double>());
      } else if (key == "suites") {
        for (const auto& s : item.value()) run.suites.push_back(s.get<std::string>());
      } else {
        chart_part[key] = item.value();
      }
    }
    if (!chart_part.empty()) {
      run.spec = chart_spec_from_json(chart_part);
      have_spec = true;
    }
  }

  if (!o.chart_file.empty()) {
    if (have_spec)
      throw Error(ErrorCode::BadInput,
                  "chart described twice (config and --chart-file)");
    run.spec = load_chart_spec(o.chart_file);
    // Cached sidecar grids live next to the chart file they belong to.
    if (!run.spec.cache.empty() &&
        !std::filesystem::path(run.spec.cache).is_absolute())
      run.spec.cache = std::filesystem::absolute(
                           std::filesystem::path(o.chart_file).parent_path() /
                           run.spec.cache)
                           .string();
    have_spec = true;
  }
  if (!o.builtin.empty()) {
    if (have_spec)
      throw Error(ErrorCode::BadInput,
                  "chart described twice (--builtin plus another source)");
    run.spec.builtin = o.builtin;
    have_spec = true;
  }
  if (!have_spec)
    throw Error(ErrorCode::BadInput,
                "no chart given; use --builtin, --chart-file, or --config");

  for (const std::string& kv : o.params) {
    auto [key, val] = split_kv(kv, "--param");
    set_chart_param(run.spec, key, val);
  }

  if (!o.domain.empty()) {
    auto comma = o.domain.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::BadInput,
                  "--domain must look like lo0:hi0,lo1:hi1")
          .with("value", o.domain);
    auto [lo0, hi0] =
        parse_range_pair(o.domain.substr(0, comma), "--domain first axis");
    auto [lo1, hi1] =
        parse_range_pair(o.domain.substr(comma + 1), "--domain second axis");
    run.spec.domain = Domain{lo0, hi0, lo1, hi1};
    run.spec.has_domain = true;
  }
  if (!o.axis0.empty() || !o.axis1.empty()) {
    Domain d = run.spec.has_domain ? run.spec.domain
                                   : default_chart_domain(run.spec);
    if (!o.axis0.empty())
      std::tie(d.lo0, d.hi0) = parse_range_pair(o.axis0, "first-axis range");
    if (!o.axis1.empty())
      std::tie(d.lo1, d.hi1) = parse_range_pair(o.axis1, "second-axis range");
    run.spec.domain = d;
    run.spec.has_domain = true;
  }
  if (run.spec.has_domain &&
      (!(run.spec.domain.span0() > 0) || !(run.spec.domain.span1() > 0)))
    throw Error(ErrorCode::BadInput, "domain spans must be positive")
        .with("span0", run.spec.domain.span0())
        .with("span1", run.spec.domain.span1());

  run.grid = parse_grid(o.grid, o.margin != 0 ? o.margin : run.grid.margin);
  for (const std::string& kv : o.tols) {
    auto [key, val] = split_kv(kv, "--tol");
    try {
      run.tol.set(key, std::stod(val));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadInput, "--tol expects a number")
          .with("key", key)
          .with("value", val);
    }
  }
  if (o.out != ".") run.out = o.out;
  if (run.out.empty()) run.out = ".";
  return run;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::BadInput, "cannot write output file")
        .with("path", path.string());
  out << body;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

Json domain_json(const BuiltChart& built) {
  return chart_spec_to_json(built.spec).at("domain");
}

Json grid_json(const GridSpec& grid) {
  Json j = Json::object();
  j["n0"] = grid.n0;
  j["n1"] = grid.n1;
  j["margin"] = grid.margin;
  return j;
}

// ---------------------------------------------------------------------------
// construct

int cmd_construct(const CommonOpts& opts) {
  Run run = resolve_run(opts);
  std::filesystem::create_directories(run.out);
  BuiltChart built = build_chart(run.spec, run.tol, run.out);

  if (built.theta) {
    if (built.spec.cache.empty()) built.spec.cache = "theta.csv";
    built.theta->save_csv(
        (std::filesystem::path(run.out) / built.spec.cache).string());
  }
  if (built.trace) {
    if (built.spec.cache.empty()) built.spec.cache = "states.csv";
    built.trace->save_csv(
        (std::filesystem::path(run.out) / built.spec.cache).string());
  }
  write_json(std::filesystem::path(run.out) / "chart.json",
             chart_spec_to_json(built.spec));

  auto axis0 = grid_axis(*built.chart, 0, run.grid.n0, run.grid.margin);
  auto axis1 = grid_axis(*built.chart, 1, run.grid.n1, run.grid.margin);

  std::string csv =
      "p0,p1,f,gamma1,gamma2,a,b,c,d,beta1,beta2,K,kappa,frame_residual\n";
  double k_min = 0, k_max = 0, kap_min = 0, kap_max = 0;
  double r_frame = 0, r_integ = 0, r_beltrami = 0, r_lap = 0, r_norm = 0;
  bool first = true;
  for (double p0 : axis0) {
    for (double p1 : axis1) {
      PointAnalysis pa = analyze_point(*built.chart, p0, p1, run.tol);
      const FrameData& fd = pa.frame;
      csv += fmt(p0) + "," + fmt(p1) + "," + fmt(fd.f) + "," +
             fmt(fd.gamma1) + "," + fmt(fd.gamma2) + "," + fmt(fd.a) + "," +
             fmt(fd.b) + "," + fmt(fd.c) + "," + fmt(fd.d) + "," +
             fmt(fd.beta1) + "," + fmt(fd.beta2) + "," + fmt(fd.K) + "," +
             fmt(fd.kappa) + "," + fmt(fd.frame_residual) + "\n";
      if (first) {
        k_min = k_max = fd.K;
        kap_min = kap_max = fd.kappa;
        first = false;
      } else {
        k_min = std::min(k_min, fd.K);
        k_max = std::max(k_max, fd.K);
        kap_min = std::min(kap_min, fd.kappa);
        kap_max = std::max(kap_max, fd.kappa);
      }
      r_frame = std::max(r_frame, fd.frame_residual);
      r_beltrami = std::max(r_beltrami, pa.beltrami);
      r_lap = std::max(r_lap, pa.gauss.mismatch /
                                  std::max(1.0, norm_e(pa.gauss.lap_closed)));
      r_norm = std::max(r_norm, pa.gauss.norm_residual);
      r_integ = std::max(
          r_integ,
          integrability_residuals(*built.chart, p0, p1, run.tol).max_abs());
    }
  }
  write_text(std::filesystem::path(run.out) / "invariants.csv", csv);

  Json summary = Json::object();
  summary["kind"] = built.chart->kind();
  summary["coords"] = coords_name(built.chart->coords());
  summary["domain"] = domain_json(built);
  summary["grid"] = grid_json(run.grid);
  summary["K"] = Json::object({{"min", k_min}, {"max", k_max}});
  summary["kappa"] = Json::object({{"min", kap_min}, {"max", kap_max}});
  Json residuals = Json::object();
  residuals["frame"] = r_frame;
  residuals["integrability"] = r_integ;
  residuals["beltrami"] = r_beltrami;
  residuals["laplacian"] = r_lap;
  residuals["gauss_norm"] = r_norm;
  summary["residuals"] = residuals;
  if (built.theta) {
    summary["goursat_residual"] = built.theta->residual();
    summary["refinement_gap"] = built.theta->refinement_gap();
  }
  if (built.trace) {
    summary["max_drift"] = built.trace->max_drift;
    summary["projected"] = built.trace->projected;
  }
  write_json(std::filesystem::path(run.out) / "summary.json", summary);
  return 0;
}

// ---------------------------------------------------------------------------
// classify

Json report_json(const ClassificationReport& r, const BuiltChart& built,
                 const GridSpec& grid) {
  Json j = Json::object();
  j["kind"] = built.chart->kind();
  j["coords"] = coords_name(built.chart->coords());
  j["domain"] = domain_json(built);
  j["grid"] = grid_json(grid);
  Json fields = classification_report_json(r);
  for (auto& item : fields.items()) j[item.key()] = item.value();
  return j;
}

int cmd_classify(const CommonOpts& opts) {
  Run run = resolve_run(opts);
  std::filesystem::create_directories(run.out);
  BuiltChart built = build_chart(run.spec, run.tol, run.out);
  ClassificationReport report = classify(*built.chart, run.grid, run.tol);

  write_json(std::filesystem::path(run.out) / "report.json",
             report_json(report, built, run.grid));

  std::string csv = "p0,p1,phi,K\n";
  bool fitted = report.verdict == Verdict::Harmonic ||
                report.verdict == Verdict::Pw1FirstKind ||
                report.verdict == Verdict::Pw1SecondKind;
  if (fitted) {
    auto axis0 = grid_axis(*built.chart, 0, run.grid.n0, run.grid.margin);
    auto axis1 = grid_axis(*built.chart, 1, run.grid.n1, run.grid.margin);
    for (double p0 : axis0) {
      for (double p1 : axis1) {
        double K = build_frames(*built.chart, p0, p1, run.tol).K;
        double phi = 0;
        if (report.verdict != Verdict::Harmonic) {
          GaussSample gs = gauss_sample(*built.chart, p0, p1, run.tol);
          Bivec6 gc = gs.G + report.C;
          phi = inner6(gs.lap_closed, gc) / inner6(gc, gc);
        }
        csv += fmt(p0) + "," + fmt(p1) + "," + fmt(phi) + "," + fmt(K) + "\n";
      }
    }
  }
  write_text(std::filesystem::path(run.out) / "phi.csv", csv);
  return 0;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const CommonOpts& opts, const std::vector<std::string>& suites) {
  Run run = resolve_run(opts);
  std::filesystem::create_directories(run.out);
  std::vector<std::string> wanted = suites;
  for (const std::string& s : run.suites) wanted.push_back(s);

  Json out = Json::object();
  std::vector<SuiteResult> rows;
  BuiltChart built;
  try {
    built = build_chart(run.spec, run.tol, run.out);
  } catch (const Error& e) {
    if (run.spec.cache.empty()) throw;
    // A chart that only fails because its cached data no longer satisfies
    // the family equations is a verification failure, not a usage error.
    SuiteResult row;
    row.suite = "cache";
    row.pass = false;
    row.tolerance = 0;
    row.note = std::string(error_code_name(e.code())) + ": " + e.what();
    for (const auto& [key, value] : e.details()) {
      if (key == "residual" || key == "drift")
        row.max_residual = std::stod(value);
      if (key == "tolerance") row.tolerance = std::stod(value);
    }
    out["kind"] = run.spec.builtin;
    out["all_pass"] = false;
    out["suites"] = suite_results_json({row});
    write_json(std::filesystem::path(run.out) / "verify.json", out);
    return 1;
  }

  bool all_suites = wanted.empty();
  for (const std::string& s : wanted)
    if (s == "all") all_suites = true;
  if (all_suites) wanted = applicable_suites(built);

  rows = run_verify(built, wanted, run.grid, run.tol);
  bool all_pass = true;
  for (const SuiteResult& r : rows) all_pass = all_pass && r.pass;
  Json jrows = suite_results_json(rows);
  out["kind"] = built.chart->kind();
  out["coords"] = coords_name(built.chart->coords());
  out["domain"] = domain_json(built);
  out["grid"] = grid_json(run.grid);
  out["all_pass"] = all_pass;
  out["suites"] = jrows;
  write_json(std::filesystem::path(run.out) / "verify.json", out);
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sweep

std::vector<double> parse_sweep_range(const std::string& text) {
  std::vector<double> values;
  if (text.empty())
    throw Error(ErrorCode::BadInput, "sweep needs a non-empty --range");
  if (std::count(text.begin(), text.end(), ':') == 2) {
    auto c1 = text.find(':');
    auto c2 = text.find(':', c1 + 1);
    try {
      double lo = std::stod(text.substr(0, c1));
      double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
      int n = std::stoi(text.substr(c2 + 1));
      if (n < 2)
        throw Error(ErrorCode::BadInput,
                    "lo:hi:n range needs at least two points")
            .with("value", text);
      for (int i = 0; i < n; ++i)
        values.push_back(lo + (hi - lo) * i / (n - 1));
      return values;
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadInput, "cannot parse lo:hi:n range")
          .with("value", text);
    }
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    std::string item = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      try {
        values.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw Error(ErrorCode::BadInput, "cannot parse range value")
            .with("value", item);
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.empty())
    throw Error(ErrorCode::BadInput, "sweep needs a non-empty --range");
  return values;
}

std::string sweep_value_text(double v) {
  // Shortest decimal that round-trips, so swept expression parameters stay
  // readable in sweep.csv and in regenerated chart specs.
  for (int prec = 1; prec <= 17; ++prec) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::stod(buf) == v) return buf;
  }
  return fmt(v);
}

int cmd_sweep(const CommonOpts& opts, const std::string& range_text) {
  CommonOpts base = opts;
  std::string swept;
  base.params.clear();
  for (const std::string& p : opts.params) {
    if (p.find('=') != std::string::npos) {
      base.params.push_back(p);
      continue;
    }
    if (!swept.empty())
      throw Error(ErrorCode::BadInput,
                  "sweep takes exactly one bare --param name")
          .with("first", swept)
          .with("second", p);
    swept = p;
  }
  if (swept.empty())
    throw Error(ErrorCode::BadInput,
                "sweep needs the swept parameter as a bare --param name");
  std::vector<double> values = parse_sweep_range(range_text);

  Run run = resolve_run(base);
  std::filesystem::create_directories(run.out);

  std::string csv =
      "value,verdict,proper,phi_min,phi_max,c0,c1,c2,c3,c4,c5,drift,error\n";
  int successes = 0;
  for (double v : values) {
    ChartSpec spec = run.spec;
    std::string row = sweep_value_text(v);
    try {
      set_chart_param(spec, swept, sweep_value_text(v));
      BuiltChart built = build_chart(spec, run.tol, "");
      ClassificationReport rep = classify(*built.chart, run.grid, run.tol);
      row += std::string(",") + verdict_name(rep.verdict) + "," +
             (rep.proper ? "true" : "false") + "," + fmt(rep.phi_min) + "," +
             fmt(rep.phi_max);
      for (int i = 0; i < 6; ++i) row += "," + fmt(rep.C[i]);
      row += "," + fmt(rep.drift) + ",";
      ++successes;
    } catch (const Error& e) {
      row += ",,,,,,,,,,,," + std::string(error_code_name(e.code())) + ": " +
             e.what();
    }
    csv += row + "\n";
  }
  write_text(std::filesystem::path(run.out) / "sweep.csv", csv);
  return successes > 0 ? 0 : 2;
}

Json error_json(const Error& e) {
  Json details = Json::object();
  for (const auto& [key, value] : e.details()) details[key] = value;
  Json j = Json::object();
  j["error"] = Json::object(
      {{"code", error_code_name(e.code())}, {"message", e.what()},
       {"details", details}});
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-minimal Lorentz surface toolkit"};
  app.require_subcommand(1);

  CommonOpts o_construct, o_classify, o_verify, o_sweep;
  std::vector<std::string> suites;
  std::string range_text;

  CLI::App* c1 = app.add_subcommand(
      "construct", "Build a chart and write its invariant grid");
  add_common(c1, o_construct, false);

  CLI::App* c2 = app.add_subcommand(
      "classify", "Fit the Gauss-map Laplacian and write the verdict");
  add_common(c2, o_classify, false);

  CLI::App* c3 =
      app.add_subcommand("verify", "Run verification suites over a chart");
  add_common(c3, o_verify, false);
  c3->add_option("--suite", suites, "Suite name, or all (repeatable)");

  CLI::App* c4 = app.add_subcommand(
      "sweep", "Classify across a swept parameter range");
  add_common(c4, o_sweep, true);
  c4->add_option("--range", range_text, "Sweep values, a,b,c or lo:hi:n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Json j = Json::object();
    j["error"] = Json::object(
        {{"code", "UsageError"}, {"message", e.what()},
         {"details", Json::object()}});
    std::cout << j.dump(2) << "\n";
    return 2;
  }

  try {
    if (c1->parsed()) return cmd_construct(o_construct);
    if (c2->parsed()) return cmd_classify(o_classify);
    if (c3->parsed()) return cmd_verify(o_verify, suites);
    return cmd_sweep(o_sweep, range_text);
  } catch (const Error& e) {
    std::cout << error_json(e).dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    Json j = Json::object();
    j["error"] = Json::object(
        {{"code", "Internal"}, {"message", e.what()},
         {"details", Json::object()}});
    std::cout << j.dump(2) << "\n";
    return 2;
  }
}
