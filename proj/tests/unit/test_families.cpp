#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "lsurf/classify.hpp"
#include "lsurf/error.hpp"
#include "lsurf/families.hpp"
#include "lsurf/frames.hpp"
#include "lsurf/gauss.hpp"

using namespace lsurf;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("reference chart golden values") {
  ChartPtr ch = example_chart();
  CHECK(ch->coords() == Coords::ST);
  CHECK(ch->kind() == "example");
  CHECK(ch->domain().lo0 == 1.0);
  CHECK(ch->domain().hi0 == 9.0);
  CHECK(ch->domain().hi1 == doctest::Approx(kTwoPi).epsilon(1e-15));

  Vec4 z = ch->position(1.0, 0.0);
  CHECK(z.c[0] == doctest::Approx(-3.5).epsilon(1e-14));
  CHECK(z.c[1] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(z.c[2] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(z.c[3] == doctest::Approx(-4.5).epsilon(1e-14));

  JetVec4 j = ch->eval(1.0, 0.0, 1);
  CHECK(j[0].deriv(1, 0) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(j[1].deriv(1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(j[2].deriv(1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(j[3].deriv(1, 0) == doctest::Approx(-2.0).epsilon(1e-14));

  for (double s : {1.0, 4.0, 9.0}) {
    for (double t : {0.0, 1.3, 5.0}) {
      FrameData fr = build_frames(*ch, s, t);
      CHECK(fr.K == doctest::Approx(std::pow(s, -1.5)).epsilon(1e-10));
      CHECK(fr.kappa == doctest::Approx(std::pow(s, -1.5)).epsilon(1e-10));
      CHECK(fr.beta2 ==
            doctest::Approx(-2.0 / std::sqrt(s)).epsilon(1e-10));
      CHECK(std::abs(fr.n1.c[0] - std::cos(t)) <= 1e-10);
      CHECK(std::abs(fr.n1.c[1] - std::sin(t)) <= 1e-10);
      CHECK(std::abs(fr.n1.c[2] - std::sin(t)) <= 1e-10);
      CHECK(std::abs(fr.n1.c[3] - std::cos(t)) <= 1e-10);
      CHECK(std::abs(fr.H.c[0] + fr.n1.c[0]) <= 1e-12);
      CHECK(std::abs(fr.H.c[3] + fr.n1.c[3]) <= 1e-12);
    }
  }
}

TEST_CASE("goursat solver reproduces the product profile exactly") {
  FlatThetaSpec spec;
  spec.F = parse_expr("1");
  spec.resolution = 8;
  ThetaFieldPtr field = goursat_solve(spec);

  CHECK(field->residual() <= 1e-12);
  CHECK(field->refinement_gap() <= 1e-12);
  for (std::size_t i = 0; i < field->us().size(); i += 3) {
    for (std::size_t j = 0; j < field->vs().size(); j += 3) {
      const Jet& th = field->at(i, j);
      double u = field->us()[i], v = field->vs()[j];
      CHECK(std::abs(th.value() - u * v) <= 1e-12);
      CHECK(std::abs(th.deriv(1, 0) - v) <= 1e-12);
      CHECK(std::abs(th.deriv(0, 1) - u) <= 1e-12);
      CHECK(std::abs(th.deriv(1, 1) - 1.0) <= 1e-12);
      CHECK(std::abs(th.deriv(2, 0)) <= 1e-12);
      CHECK(std::abs(th.deriv(2, 1)) <= 1e-12);
      CHECK(std::abs(th.deriv(2, 2)) <= 1e-12);
    }
  }

  ChartPtr ch = bd_zero_surface(field);
  CHECK(ch->kind() == "flat_theta");
  ClassificationReport rep = classify(*ch, GridSpec{5, 5});
  CHECK(rep.verdict == Verdict::Harmonic);
}

TEST_CASE("goursat solver reconstructs the exponential solution") {
  FlatThetaSpec spec;
  spec.F = parse_expr("w", single_var("w"));
  spec.p = parse_expr("exp(u)");
  spec.q = parse_expr("exp(v)");
  ThetaFieldPtr field = goursat_solve(spec);

  CHECK(field->residual() <= 1e-9);
  CHECK(field->refinement_gap() <= 1e-9);
  double worst = 0, worst_d1 = 0, worst_d2 = 0;
  for (std::size_t i = 0; i < field->us().size(); i += 5) {
    for (std::size_t j = 0; j < field->vs().size(); j += 5) {
      double u = field->us()[i], v = field->vs()[j];
      double e = std::exp(u + v);
      const Jet& th = field->at(i, j);
      worst = std::max(worst, std::abs(th.value() - e));
      worst_d1 = std::max({worst_d1, std::abs(th.deriv(1, 0) - e),
                           std::abs(th.deriv(0, 1) - e)});
      worst_d2 = std::max({worst_d2, std::abs(th.deriv(1, 1) - e),
                           std::abs(th.deriv(2, 1) - e),
                           std::abs(th.deriv(2, 2) - e),
                           std::abs(th.deriv(0, 4) - e)});
    }
  }
  CHECK(worst <= 1e-9);
  CHECK(worst_d1 <= 1e-7);
  CHECK(worst_d2 <= 1e-7);

  // The grid-locked chart classifies exactly like the closed-form graph.
  ChartPtr ch = bd_zero_surface(field);
  ClassificationReport rep = classify(*ch, GridSpec{6, 6});
  CHECK(rep.verdict == Verdict::Pw1SecondKind);
  CHECK_FALSE(rep.proper);
  CHECK(rep.stage == "constant_phi");
  CHECK(rep.phi_min == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(rep.phi_max == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(rep.C.c[0] == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(rep.C.c[3] == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(rep.max_condition_residual <= 1e-6);
}

TEST_CASE("goursat solver rejects mismatched corner data") {
  FlatThetaSpec spec;
  spec.F = parse_expr("1");
  spec.p = parse_expr("0");
  spec.q = parse_expr("1");
  try {
    goursat_solve(spec);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CornerMismatch);
  }
}

TEST_CASE("vanishing mean curvature is rejected") {
  try {
    bd_zero_surface(parse_expr("0"), Domain{0, 1, 0, 1});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::QuasiMinimalityViolated);
  }
  CHECK_NOTHROW(bd_zero_surface(parse_expr("u*v"), Domain{-1, 1, -1, 1}));
}

TEST_CASE("theta grid round-trips through csv and rejects tampering") {
  FlatThetaSpec spec;
  spec.F = parse_expr("w", single_var("w"));
  spec.p = parse_expr("exp(u)");
  spec.q = parse_expr("exp(v)");
  spec.domain = Domain{0.0, 0.5, 0.0, 0.5};
  spec.resolution = 8;
  ThetaFieldPtr field = goursat_solve(spec);

  const std::string path = temp_path("lsurf_theta_roundtrip.csv");
  field->save_csv(path);
  ThetaGridValues grid = load_theta_values_csv(path);
  CHECK(grid.us.size() == field->us().size());
  CHECK(grid.vs.size() == field->vs().size());

  ThetaFieldPtr rebuilt = theta_field_from_values(grid, spec);
  for (std::size_t i = 0; i < grid.us.size(); i += 4) {
    for (std::size_t j = 0; j < grid.vs.size(); j += 4) {
      CHECK(rebuilt->at(i, j).value() == field->at(i, j).value());
      CHECK(rebuilt->at(i, j).deriv(2, 1) ==
            doctest::Approx(field->at(i, j).deriv(2, 1)).epsilon(1e-13));
    }
  }

  ThetaGridValues bad = grid;
  bad.values[bad.values.size() / 2] += 1e-5;
  try {
    theta_field_from_values(bad, spec);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadInput);
  }
  std::filesystem::remove(path);
}

TEST_CASE("grid-locked charts evaluate only at stored nodes") {
  FlatThetaSpec spec;
  spec.F = parse_expr("1");
  spec.resolution = 8;
  ChartPtr ch = bd_zero_surface(goursat_solve(spec));
  std::vector<double> nodes = ch->axis_nodes(0);
  REQUIRE(nodes.size() >= 17);
  CHECK_NOTHROW(ch->eval(nodes[3], nodes[5], 2));
  try {
    ch->eval(0.5 * (nodes[3] + nodes[4]), nodes[5], 2);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
}

TEST_CASE("shifted-argument profile fits the predicted constant direction") {
  FlatThetaSpec spec;
  spec.F = parse_expr("exp(w)", single_var("w"));
  spec.c1 = 0.3;
  spec.c2 = -0.2;
  ThetaFieldPtr field = goursat_solve(spec);
  ChartPtr ch = bd_zero_surface(field);

  ClassificationReport rep = classify(*ch, GridSpec{6, 6});
  CHECK(rep.verdict == Verdict::Pw1SecondKind);
  CHECK(rep.proper);
  CHECK(rep.stage == "pairwise");
  CHECK(rep.phi_min > 0);

  const double q = 1.0 / std::numbers::sqrt2;
  // c1*(e0^e2) - c2*(e0^e1) - e1^e2 in the bivector basis.
  Bivec6 expected{{spec.c1 * (-q) - spec.c2 * q, spec.c1 * q - spec.c2 * q, 0,
                   -1.0, spec.c1 * q + spec.c2 * q,
                   spec.c1 * (-q) + spec.c2 * q}};
  for (int k = 0; k < 6; ++k)
    CHECK(std::abs(rep.C.c[k] - expected.c[k]) <= 1e-6);
  CHECK(rep.drift <= 1e-6);
  CHECK(rep.max_condition_residual <= 1e-6);
}

TEST_CASE("initial data completion hits the frozen values") {
  ExprPtr l1 = parse_expr("-3/2");
  ExprPtr l3 = parse_expr("1");
  NonFlatInitialData d = nonflat_initial_data(l1, l3, 0.0);

  CHECK(d.t0 == 0.0);
  CHECK(d.xi.c[0] == 0.0);
  CHECK(d.xip.c[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(d.xip.c[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d.xip.c[2] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(d.xip.c[3] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(d.xipp.c[0] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(d.xipp.c[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(d.xipp.c[2] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(d.xipp.c[3] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK(std::abs(inner4(d.n1, d.n1)) <= 1e-14);
  CHECK(std::abs(inner4(d.n1p, d.n1p)) <= 1e-14);
  CHECK(std::abs(inner4(d.n1, d.xip)) <= 1e-14);
  CHECK(std::abs(inner4(d.xip, d.xip)) <= 1e-14);
  CHECK(std::abs(inner4(d.n1p, d.xip) - 1.0) <= 1e-14);
  CHECK(std::abs(inner4(d.n1, d.xipp) + 1.0) <= 1e-14);
  CHECK(std::abs(inner4(d.xip, d.xipp)) <= 1e-14);
  CHECK(std::abs(inner4(d.n1p, d.xipp)) <= 1e-14);

  // Profile vanishing at t0 is a precondition failure.
  try {
    nonflat_initial_data(l1, parse_expr("t"), 0.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadInput);
  }

  // A degenerate seed propagates the span error.
  NonFlatSeed seed;
  seed.n1p = seed.n1;
  try {
    nonflat_initial_data(l1, l3, 0.0, seed);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSpan);
  }
}

TEST_CASE("integrated chart matches the reference surface") {
  NonFlatSpec spec;
  spec.lambda1 = parse_expr("-3/2");
  spec.lambda3 = parse_expr("1");
  NonflatTracePtr trace = nonflat_trace(spec);
  CHECK(trace->max_drift <= 1e-6);
  CHECK(trace->states.back().t == doctest::Approx(kTwoPi).epsilon(1e-15));

  ChartPtr ch = nonflat_chart(spec, trace);
  CHECK(ch->coords() == Coords::ST);
  CHECK(ch->kind() == "nonflat");

  ChartPtr ref = example_chart();
  // The integrated surface differs from the reference chart by a constant
  // translation fixed by the seed.
  Vec4 shift{{-0.5, 0.0, 0.0, 0.5}};
  for (double s : {1.0, 4.0, 9.0}) {
    for (double t : {0.0, 1.3, 5.0}) {
      Vec4 zi = ch->position(s, t);
      Vec4 zr = ref->position(s, t);
      for (int k = 0; k < 4; ++k)
        CHECK(std::abs(zi.c[k] - (zr.c[k] + shift.c[k])) <= 1e-8);

      FrameData fi = build_frames(*ch, s, t);
      FrameData fr = build_frames(*ref, s, t);
      CHECK(std::abs(fi.K - fr.K) <= 1e-6);
      CHECK(std::abs(fi.kappa - fr.kappa) <= 1e-6);
      CHECK(std::abs(fi.beta2 - fr.beta2) <= 1e-6);
      CHECK(std::abs(fi.f - fr.f) <= 1e-6);
      for (int k = 0; k < 4; ++k)
        CHECK(std::abs(fi.n1.c[k] - std::array<double, 4>{
                                        std::cos(t), std::sin(t), std::sin(t),
                                        std::cos(t)}[k]) <= 1e-7);

      MetricAtPoint g = induced_metric(*ch, s, t);
      CHECK(std::abs(g.g00) <= 1e-7);
      CHECK(std::abs(g.g01 + 1.0) <= 1e-7);
    }
  }

  ClassificationReport rep = classify(*ch, GridSpec{6, 6});
  CHECK(rep.verdict == Verdict::Pw1SecondKind);
  CHECK(rep.proper);
  CHECK(rep.phi_vs_minus4K <= 1e-6);

  // Out-of-domain evaluation is refused.
  try {
    ch->position(0.5, 1.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
}

TEST_CASE("positive first profile violates the radicand condition") {
  NonFlatSpec spec;
  spec.lambda1 = parse_expr("3/2");
  spec.lambda3 = parse_expr("1");
  try {
    nonflat_trace(spec);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainViolation);
  }
}

TEST_CASE("trace csv round-trips and corrupted caches are rejected") {
  NonFlatSpec spec;
  spec.lambda1 = parse_expr("-3/2");
  spec.lambda3 = parse_expr("1");
  spec.domain = Domain{1.0, 9.0, 0.0, 0.25};
  NonflatTracePtr trace = nonflat_trace(spec);

  const std::string path = temp_path("lsurf_trace_roundtrip.csv");
  trace->save_csv(path);
  NonflatTracePtr loaded = NonflatTrace::load_csv(path);
  REQUIRE(loaded->states.size() == trace->states.size());
  for (std::size_t k = 0; k < trace->states.size(); k += 50) {
    CHECK(loaded->states[k].t == trace->states[k].t);
    for (int c = 0; c < 4; ++c) {
      CHECK(loaded->states[k].n1.c[c] == trace->states[k].n1.c[c]);
      CHECK(loaded->states[k].xipp.c[c] == trace->states[k].xipp.c[c]);
    }
  }
  CHECK_NOTHROW(nonflat_chart(spec, loaded));

  auto corrupted = std::make_shared<NonflatTrace>(*loaded);
  corrupted->states[corrupted->states.size() / 2].n1.c[0] += 1e-3;
  try {
    nonflat_chart(spec, corrupted);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConstraintDrift);
  }
  std::filesystem::remove(path);
}

TEST_CASE("closed-form coefficient functions hit pinned values") {
  ExprPtr l1 = parse_expr("-3/2");
  ExprPtr l3 = parse_expr("1");

  CoefficientJets cj = coefficient_functions(l1, l3, 4.0, 1.0);
  CHECK(cj.a.value() == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(cj.c.value() == doctest::Approx(-8.0).epsilon(1e-13));
  CHECK(cj.d.value() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(cj.beta2.value() == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(cj.f.value() == doctest::Approx(-8.0).epsilon(1e-13));
  CHECK(cj.K.value() == doctest::Approx(0.125).epsilon(1e-13));

  CoefficientJets c1 = coefficient_functions(l1, l3, 1.0, 0.0);
  CHECK(c1.K.value() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(c1.beta2.value() == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(c1.c.value() == doctest::Approx(-4.0).epsilon(1e-13));

  try {
    coefficient_functions(parse_expr("3/2"), l3, 4.0, 1.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainViolation);
  }
}

TEST_CASE("coefficient jets satisfy the in-plane structure system") {
  // The relations c_s = beta2, d_s = 0, (beta2)_s = K, f_ss = K hold for any
  // admissible profile triple, including a nonzero second profile.
  ExprPtr l1 = parse_expr("-3/2 - t/4");
  ExprPtr l3 = parse_expr("1 + t/8");
  ExprPtr l2 = parse_expr("t/5");
  for (double s : {1.5, 4.0}) {
    for (double t : {0.2, 0.9}) {
      CoefficientJets cj = coefficient_functions(l1, l3, s, t, 4, l2);
      CHECK(std::abs((cj.c.du() - cj.beta2).value()) <= 1e-10);
      CHECK(std::abs((cj.c.du() - cj.beta2).deriv(0, 1)) <= 1e-10);
      CHECK(std::abs(cj.d.du().value()) <= 1e-12);
      CHECK(std::abs((cj.beta2.du() - cj.K).value()) <= 1e-10);
      CHECK(std::abs((cj.beta2.du() - cj.K).deriv(1, 0)) <= 1e-10);
      CHECK(std::abs((cj.f.du().du() - cj.K).value()) <= 1e-10);
    }
  }

  // And the frame pipeline on the integrated chart agrees with the closed
  // forms pointwise.
  NonFlatSpec spec;
  spec.lambda1 = parse_expr("-3/2");
  spec.lambda3 = parse_expr("1");
  spec.domain = Domain{1.0, 9.0, 0.0, 1.5};
  ChartPtr ch = nonflat_integrate(spec);
  for (double s : {2.0, 6.5}) {
    CoefficientJets cj =
        coefficient_functions(spec.lambda1, spec.lambda3, s, 0.8);
    FrameData fr = build_frames(*ch, s, 0.8);
    CHECK(std::abs(fr.a - cj.a.value()) <= 1e-7);
    CHECK(std::abs(fr.c - cj.c.value()) <= 1e-7);
    CHECK(std::abs(fr.d - cj.d.value()) <= 1e-7);
    CHECK(std::abs(fr.beta2 - cj.beta2.value()) <= 1e-7);
    CHECK(std::abs(fr.f - cj.f.value()) <= 1e-7);
    CHECK(std::abs(fr.K - cj.K.value()) <= 1e-7);
    CHECK(std::abs(fr.b) <= 1e-7);
    CHECK(std::abs(fr.beta1) <= 1e-7);
  }
}

TEST_CASE("builtin chart registry") {
  std::vector<std::string> names = builtin_chart_names();
  REQUIRE(names.size() == 4);
  CHECK(builtin_chart("example")->kind() == "example");
  CHECK(builtin_chart("flat_product")->kind() == "flat_theta");
  CHECK(builtin_chart("flat_exponential")->kind() == "flat_theta");
  try {
    builtin_chart("no_such_chart");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadInput);
  }
}
