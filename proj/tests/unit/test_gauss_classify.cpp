#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "lsurf/chart.hpp"
#include "lsurf/classify.hpp"
#include "lsurf/error.hpp"
#include "lsurf/frames.hpp"
#include "lsurf/gauss.hpp"

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

TEST_CASE("gauss map of the exponential graph") {
  ChartPtr ch = flat_graph_chart("exp(u + v)");
  double u = 0.3, v = -0.2;
  double theta = std::exp(u + v);
  double r2 = std::sqrt(2.0);

  GaussSample gs = gauss_sample(*ch, u, v);
  CHECK(gs.G.c[0] == doctest::Approx(-r2 * theta).epsilon(1e-12));
  CHECK(gs.G.c[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gs.G.c[2] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gs.G.c[3] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gs.G.c[4] == doctest::Approx(r2 * theta).epsilon(1e-12));
  CHECK(gs.G.c[5] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gs.norm_residual <= 1e-10);

  CHECK(gs.lap_closed.c[0] == doctest::Approx(-2 * r2 * theta).epsilon(1e-11));
  CHECK(gs.lap_closed.c[3] == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(gs.lap_closed.c[4] == doctest::Approx(2 * r2 * theta).epsilon(1e-11));
  CHECK(gs.mismatch <= 1e-6 * std::max(1.0, norm_e(gs.lap_closed)));
}

TEST_CASE("gauss map pairing identity over the reference chart") {
  ChartPtr ch = reference_chart();
  const std::vector<std::pair<double, double>> pts = {
      {1.5, 0.4}, {4.0, 1.3}, {7.5, 5.2}};
  for (auto [s, t] : pts) {
    PointAnalysis pa = analyze_point(*ch, s, t);
    CHECK(pa.gauss.norm_residual <= 1e-9);
    double paired = inner6(pa.gauss.G, pa.gauss.lap_closed);
    CHECK(paired == doctest::Approx(2.0 * pa.frame.K).epsilon(1e-9));
    CHECK(pa.gauss.mismatch <=
          1e-6 * std::max(1.0, norm_e(pa.gauss.lap_closed)));
    CHECK(pa.beltrami <= 1e-7);
  }
}

TEST_CASE("harmonicity detection") {
  HarmonicReport flat = harmonic_test(*flat_graph_chart("u*v"), GridSpec{6, 6});
  CHECK(flat.harmonic);
  CHECK(flat.invariants_consistent);
  CHECK(flat.max_lap_norm <= 1e-10);

  HarmonicReport ref = harmonic_test(*reference_chart(), GridSpec{6, 6});
  CHECK_FALSE(ref.harmonic);
}

TEST_CASE("fit recovers the constant-ratio structure of the exponential graph") {
  ChartPtr ch = flat_graph_chart("exp(u + v)");
  std::vector<GaussSample> samples;
  for (double u : {-0.8, -0.2, 0.4, 0.9})
    for (double v : {-0.7, 0.1, 0.6}) samples.push_back(gauss_sample(*ch, u, v));

  FitResult fit = fit_phi_and_C(samples);
  CHECK(fit.stage == "constant_phi");
  REQUIRE(fit.phi.size() == samples.size());
  for (double p : fit.phi) CHECK(p == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.C.c[3] == doctest::Approx(-1.0).epsilon(1e-9));
  for (int k : {0, 1, 2, 4, 5})
    CHECK(fit.C.c[k] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fit.max_rel_residual <= 1e-9);
  CHECK(fit.drift <= 1e-9);

  KindInfo kind = kind_and_properness(fit);
  CHECK_FALSE(kind.first_kind);
  CHECK_FALSE(kind.proper);
}

TEST_CASE("fit recognizes a pure curvature multiple as first kind") {
  ChartPtr ch = reference_chart();
  std::vector<GaussSample> samples;
  std::vector<double> want_phi;
  for (double s : {1.0, 2.5, 4.0, 6.5, 9.0}) {
    for (double t : {0.5, 2.9, 4.7}) {
      GaussSample gs = gauss_sample(*ch, s, t);
      double k_synth = std::pow(s, -1.5) * (1.0 + 0.3 * std::sin(t));
      gs.lap_closed = (-2.0 * k_synth) * gs.G;
      gs.lap_direct = gs.lap_closed;
      gs.mismatch = 0;
      samples.push_back(gs);
      want_phi.push_back(-2.0 * k_synth);
    }
  }
  FitResult fit = fit_phi_and_C(samples);
  CHECK(fit.stage == "first_kind");
  CHECK(fit.c_norm <= 1e-12);
  REQUIRE(fit.phi.size() == want_phi.size());
  for (std::size_t i = 0; i < want_phi.size(); ++i)
    CHECK(fit.phi[i] == doctest::Approx(want_phi[i]).epsilon(1e-7));
  KindInfo kind = kind_and_properness(fit);
  CHECK(kind.first_kind);
  CHECK(kind.proper);
}

TEST_CASE("fit input validation") {
  ChartPtr ch = flat_graph_chart("exp(u + v)");
  std::vector<GaussSample> two = {gauss_sample(*ch, 0.1, 0.2),
                                  gauss_sample(*ch, 0.3, -0.1)};
  try {
    fit_phi_and_C(two);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamples);
  }
}

TEST_CASE("degenerate sample placement is rejected") {
  GaussSample s;
  s.G = Bivec6{{0, 0, 0, 1, 0, 0}};
  s.lap_closed = Bivec6{{1, 0, 0, 0, 0, 0}};
  std::vector<GaussSample> samples = {s, s, s};
  try {
    fit_phi_and_C(samples);
    FAIL("expected IllConditionedFit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllConditionedFit);
  }
}

TEST_CASE("classification of the exponential graph") {
  ClassificationReport rep =
      classify(*flat_graph_chart("exp(u + v)"), GridSpec{5, 5});
  CHECK(rep.verdict == Verdict::Pw1SecondKind);
  CHECK_FALSE(rep.proper);
  CHECK(rep.stage == "constant_phi");
  CHECK(rep.phi_min == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(rep.phi_max == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(rep.C.c[3] == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(rep.max_condition_residual <= 1e-6);
  CHECK(rep.max_lap_mismatch <= 1e-6);
  CHECK_FALSE(rep.parallel_check_applicable);  // K vanishes identically here
}

TEST_CASE("classification of the product graph is harmonic") {
  ClassificationReport rep =
      classify(*flat_graph_chart("u*v"), GridSpec{5, 5});
  CHECK(rep.verdict == Verdict::Harmonic);
}

TEST_CASE("classification of the reference chart") {
  ChartPtr ch = reference_chart();
  ClassificationReport rep = classify(*ch, GridSpec{8, 8});
  CHECK(rep.verdict == Verdict::Pw1SecondKind);
  CHECK(rep.proper);
  CHECK(rep.samples == 64);
  CHECK(rep.phi_min == doctest::Approx(-4.0).epsilon(1e-6));
  CHECK(rep.phi_max == doctest::Approx(-4.0 / 27.0).epsilon(1e-6));
  CHECK(rep.phi_vs_minus4K <= 1e-6);
  CHECK(rep.phi_vs_minus2K >= 0.5);
  CHECK(rep.drift <= 1e-6 * std::max(1.0, rep.c_norm));
  CHECK(rep.max_condition_residual <= 1e-6);
  CHECK(rep.max_gauss_norm_residual <= 1e-9);
  CHECK(rep.max_frame_residual <= 1e-9);

  // The fitted displacement must equal its frame-coefficient expression,
  // which is the same constant bivector at every sample.
  const std::vector<std::pair<double, double>> probes = {{1.0, 0.0},
                                                         {4.0, 1.3}};
  for (auto [s, t] : probes) {
    FrameData fr = build_frames(*ch, s, t);
    Bivec6 cexp = -0.5 * (wedge(fr.x, fr.y) + wedge(fr.n1, fr.n2) +
                          (fr.beta2 / fr.K) * wedge(fr.x, fr.n1));
    CHECK(norm_e(rep.C - cexp) <= 1e-6);
  }

  // Flat normal connection + curvature bounded from zero forces the
  // connection form to vanish; here kappa = K > 0 so the check is idle.
  CHECK_FALSE(rep.parallel_check_applicable);
}

TEST_CASE("classification rejects a non-lightlike mean curvature surface") {
  ChartPtr torus = make_expr_chart(
      {"cos(u - v)", "sin(u - v)", "2*cos((u + v)/2)", "2*sin((u + v)/2)"},
      Coords::UV, Domain{-3.0, 3.0, -3.0, 3.0});
  ClassificationReport rep = classify(*torus, GridSpec{4, 4});
  CHECK(rep.verdict == Verdict::NotQuasiMinimal);
  CHECK_FALSE(rep.failure_reason.empty());
}

TEST_CASE("classification needs a dense enough grid") {
  try {
    classify(*reference_chart(), GridSpec{3, 5});
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamples);
  }
}

TEST_CASE("pointwise condition residuals vanish for the reference fit") {
  ChartPtr ch = reference_chart();
  FrameData fr = build_frames(*ch, 4.0, 1.3);
  double phi = -4.0 * fr.K;
  Bivec6 C = -0.5 * (wedge(fr.x, fr.y) + wedge(fr.n1, fr.n2) +
                     (fr.beta2 / fr.K) * wedge(fr.x, fr.n1));
  ConditionResiduals cr = condition_residuals(fr, phi, C);
  CHECK(cr.max_abs() <= 1e-9);
}

TEST_CASE("verdict names") {
  CHECK(std::string(verdict_name(Verdict::NotQuasiMinimal)) ==
        "not_quasi_minimal");
  CHECK(std::string(verdict_name(Verdict::Harmonic)) == "harmonic");
  CHECK(std::string(verdict_name(Verdict::Pw1FirstKind)) == "pw1_first_kind");
  CHECK(std::string(verdict_name(Verdict::Pw1SecondKind)) ==
        "pw1_second_kind");
  CHECK(std::string(verdict_name(Verdict::NotPw1)) == "not_pw1");
}
