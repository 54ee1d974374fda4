#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "lsurf/chart.hpp"
#include "lsurf/error.hpp"
#include "lsurf/frames.hpp"

using namespace lsurf;

namespace {

ChartPtr reference_chart() {
  return make_expr_chart(
      {"-4*sqrt(s)*cos(t) + s*sin(t) + cos(t)/2",
       "-4*sqrt(s)*sin(t) - s*cos(t) + sin(t)/2",
       "-4*sqrt(s)*sin(t) - s*cos(t) - sin(t)/2",
       "-4*sqrt(s)*cos(t) + s*sin(t) - cos(t)/2"},
      Coords::ST, Domain{1.0, 9.0, 0.0, 2.0 * 3.141592653589793});
}

ChartPtr flat_graph_chart(const std::string& theta) {
  return make_expr_chart({theta, "(u - v)/sqrt(2)", "(u + v)/sqrt(2)", theta},
                         Coords::UV, Domain{-1.0, 1.0, -1.0, 1.0});
}

}  // namespace

TEST_CASE("induced metric of the reference chart") {
  ChartPtr ch = reference_chart();
  MetricAtPoint m = induced_metric(*ch, 1.0, 0.7);
  CHECK(m.g00 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.g01 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(m.g11 == doctest::Approx(-8.0).epsilon(1e-12));
  MetricAtPoint m4 = induced_metric(*ch, 4.0, 2.1);
  CHECK(m4.g11 == doctest::Approx(-16.0).epsilon(1e-12));
}

TEST_CASE("frames and invariants of the reference chart") {
  ChartPtr ch = reference_chart();
  FrameData fr = build_frames(*ch, 4.0, 1.3);

  CHECK(fr.f == doctest::Approx(-8.0).epsilon(1e-12));
  CHECK(fr.a == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(fr.b == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(fr.c == doctest::Approx(-8.0).epsilon(1e-12));
  CHECK(fr.d == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fr.beta1 == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(fr.beta2 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fr.gamma1 == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(fr.gamma2 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fr.K == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(fr.kappa == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(fr.frame_residual <= 1e-10);

  double ct = std::cos(1.3), st = std::sin(1.3);
  CHECK(fr.n1.c[0] == doctest::Approx(ct).epsilon(1e-11));
  CHECK(fr.n1.c[1] == doctest::Approx(st).epsilon(1e-11));
  CHECK(fr.n1.c[2] == doctest::Approx(st).epsilon(1e-11));
  CHECK(fr.n1.c[3] == doctest::Approx(ct).epsilon(1e-11));
  CHECK(norm_e(fr.H + fr.n1) <= 1e-12);

  FrameData at0 = build_frames(*ch, 4.0, 0.0);
  CHECK(at0.n1.c[0] == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(at0.n1.c[1] == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(at0.n1.c[2] == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(at0.n1.c[3] == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(at0.beta2 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(at0.a == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(at0.d == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("curvature routes agree") {
  ChartPtr ch = reference_chart();
  Curvatures c4 = curvatures(*ch, 4.0, 1.3);
  CHECK(c4.K == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(c4.K_metric == doctest::Approx(0.125).epsilon(1e-10));
  Curvatures c9 = curvatures(*ch, 9.0, 5.0);
  CHECK(c9.K == doctest::Approx(1.0 / 27.0).epsilon(1e-12));
  CHECK(c9.kappa == doctest::Approx(1.0 / 27.0).epsilon(1e-12));
  CHECK(c9.K_metric == doctest::Approx(1.0 / 27.0).epsilon(1e-10));

  ChartPtr flat = flat_graph_chart("exp(u + v)");
  Curvatures cf = curvatures(*flat, 0.3, -0.2);
  CHECK(std::abs(cf.K) <= 1e-12);
  CHECK(std::abs(cf.K_metric) <= 1e-10);
}

TEST_CASE("flat graph chart with product profile") {
  ChartPtr ch = flat_graph_chart("u*v");
  FrameData fr = build_frames(*ch, 0.4, -0.3);
  CHECK(fr.f == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fr.n1.c[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fr.n1.c[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fr.n1.c[2] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fr.n1.c[3] == doctest::Approx(1.0).epsilon(1e-12));
  for (double coef : {fr.a, fr.b, fr.c, fr.d, fr.beta1, fr.beta2, fr.gamma1,
                      fr.gamma2, fr.K, fr.kappa})
    CHECK(std::abs(coef) <= 1e-11);
  CHECK(fr.frame_residual <= 1e-11);
}

TEST_CASE("flat graph chart with exponential profile") {
  ChartPtr ch = flat_graph_chart("exp(u + v)");
  FrameData fr = build_frames(*ch, 0.3, -0.2);
  double zeta = std::exp(0.1);
  CHECK(fr.f == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fr.a == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(fr.b == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(fr.c == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(fr.d == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(fr.beta1 == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(fr.beta2 == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(fr.gamma1 == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(fr.gamma2 == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(std::abs(fr.K) <= 1e-11);
  CHECK(std::abs(fr.kappa) <= 1e-11);
  CHECK(fr.n1.c[0] == doctest::Approx(zeta).epsilon(1e-11));
  CHECK(fr.n1.c[3] == doctest::Approx(zeta).epsilon(1e-11));
  CHECK(fr.frame_residual <= 1e-10);
}

TEST_CASE("integrability residuals vanish on genuine surfaces") {
  ChartPtr ref = reference_chart();
  const std::vector<std::pair<double, double>> pts = {
      {1.5, 0.4}, {4.0, 1.3}, {8.5, 6.0}};
  for (auto [s, t] : pts) {
    StructureResiduals r = integrability_residuals(*ref, s, t);
    CHECK(r.max_abs() <= 1e-7);
  }
  ChartPtr flat = flat_graph_chart("exp(u + v)");
  StructureResiduals rf = integrability_residuals(*flat, 0.3, 0.2);
  CHECK(rf.max_abs() <= 1e-7);
}

TEST_CASE("laplace identity for the position vector") {
  ChartPtr ref = reference_chart();
  CHECK(beltrami_residual(*ref, 2.0, 0.9) <= 1e-8);
  CHECK(beltrami_residual(*ref, 7.0, 4.4) <= 1e-8);
  ChartPtr flat = flat_graph_chart("u*v");
  CHECK(beltrami_residual(*flat, 0.1, 0.6) <= 1e-12);
}

TEST_CASE("perturbed coefficients are detected on the exponential profile") {
  ChartPtr ch = flat_graph_chart("exp(u + v)");
  const double s = 0.3, t = 0.2;
  CHECK(integrability_residuals(*ch, s, t).max_abs() <= 1e-7);
  for (CoefficientName which :
       {CoefficientName::A, CoefficientName::B, CoefficientName::C,
        CoefficientName::D, CoefficientName::Beta1, CoefficientName::Beta2,
        CoefficientName::Gamma1, CoefficientName::Gamma2}) {
    StructureResiduals r =
        integrability_residuals_perturbed(*ch, s, t, which, 0.1);
    CHECK(r.max_abs() >= 0.05);
  }
}

TEST_CASE("perturbed coefficients on the reference chart") {
  ChartPtr ch = reference_chart();
  const double s = 4.0, t = 1.3;
  CHECK(integrability_residuals(*ch, s, t).max_abs() <= 1e-7);
  for (CoefficientName which :
       {CoefficientName::A, CoefficientName::B, CoefficientName::D,
        CoefficientName::Beta1, CoefficientName::Beta2,
        CoefficientName::Gamma1, CoefficientName::Gamma2}) {
    StructureResiduals r =
        integrability_residuals_perturbed(*ch, s, t, which, 0.1);
    CHECK(r.max_abs() >= 0.01);
  }
  // Shifting c by a constant is invisible here: every term multiplying c in
  // the structure equations vanishes identically on this chart.
  StructureResiduals rc = integrability_residuals_perturbed(
      *ch, s, t, CoefficientName::C, 0.1);
  CHECK(rc.max_abs() <= 1e-7);
}

TEST_CASE("non-null parametrizations are rejected") {
  ChartPtr bad = make_expr_chart({"u", "v", "0", "0"}, Coords::UV,
                                 Domain{0.0, 1.0, 0.0, 1.0});
  try {
    build_frames(*bad, 0.5, 0.5);
    FAIL("expected NotNullCoordinates");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotNullCoordinates);
  }
}

TEST_CASE("minimal points are rejected") {
  ChartPtr plane = make_expr_chart(
      {"0", "(u - v)/sqrt(2)", "(u + v)/sqrt(2)", "0"}, Coords::UV,
      Domain{-1.0, 1.0, -1.0, 1.0});
  try {
    build_frames(*plane, 0.2, 0.1);
    FAIL("expected MinimalPoint");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MinimalPoint);
  }
}

TEST_CASE("non-lightlike mean curvature is rejected") {
  ChartPtr torus = make_expr_chart(
      {"cos(u - v)", "sin(u - v)", "2*cos((u + v)/2)", "2*sin((u + v)/2)"},
      Coords::UV, Domain{-3.0, 3.0, -3.0, 3.0});
  MetricAtPoint m = induced_metric(*torus, 0.4, -0.7);
  CHECK(m.g00 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.g01 == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(m.g11 == doctest::Approx(0.0).epsilon(1e-12));
  try {
    build_frames(*torus, 0.4, -0.7);
    FAIL("expected NotQuasiMinimal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotQuasiMinimal);
  }
}

TEST_CASE("domain is enforced") {
  ChartPtr ch = reference_chart();
  CHECK_NOTHROW(ch->eval(9.0, 0.0, 2));
  try {
    ch->eval(10.0, 0.0, 2);
    FAIL("expected OutOfDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
}

TEST_CASE("grid axis sampling") {
  ChartPtr ch = reference_chart();
  std::vector<double> ax = grid_axis(*ch, 0, 5, 0.0);
  REQUIRE(ax.size() == 5);
  CHECK(ax.front() == doctest::Approx(1.0));
  CHECK(ax[2] == doctest::Approx(5.0));
  CHECK(ax.back() == doctest::Approx(9.0));
  std::vector<double> trimmed = grid_axis(*ch, 0, 3, 0.125);
  CHECK(trimmed.front() == doctest::Approx(2.0));
  CHECK(trimmed.back() == doctest::Approx(8.0));
}
