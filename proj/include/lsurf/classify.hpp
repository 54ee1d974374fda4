#pragma once

#include <string>
#include <vector>

#include "lsurf/gauss.hpp"

namespace lsurf {

enum class Verdict {
  NotQuasiMinimal,
  Harmonic,
  Pw1FirstKind,
  Pw1SecondKind,
  NotPw1,
};

const char* verdict_name(Verdict v);

// Result of fitting lap(G) = phi * (G + C) over a set of samples, with phi
// allowed to vary pointwise and C a single constant bivector.
struct FitResult {
  std::vector<double> phi;
  Bivec6 C{};
  double c_norm = 0;
  double drift = 0;              // spread of the per-pair C estimates
  double max_rel_residual = 0;   // worst ||lap - phi (G + C)|| / max(1, ||lap||)
  std::string stage;             // harmonic | first_kind | constant_phi | pairwise
  bool harmonic = false;
};

FitResult fit_phi_and_C(const std::vector<GaussSample>& samples,
                        const Tolerances& tol = {});

struct KindInfo {
  bool first_kind = false;
  bool proper = false;
  double phi_min = 0, phi_max = 0, phi_spread = 0;
};

KindInfo kind_and_properness(const FitResult& fit, const Tolerances& tol = {});

// Residuals of the six bivector-component conditions a pointwise fit must
// satisfy at one point, given phi there and the constant C.
struct ConditionResiduals {
  std::array<double, 6> e{};
  double max_abs() const;
};

ConditionResiduals condition_residuals(const FrameData& frame, double phi,
                                       const Bivec6& C);

struct ClassificationReport {
  Verdict verdict = Verdict::NotPw1;
  bool proper = false;
  std::size_t samples = 0;
  std::string stage;

  double phi_min = 0, phi_max = 0, phi_spread = 0;
  Bivec6 C{};
  double c_norm = 0;
  double drift = 0;
  double fit_residual = 0;

  std::array<double, 6> condition_max{};  // per-condition maxima over the grid
  double max_condition_residual = 0;

  double max_gauss_norm_residual = 0;  // |<G,G> + 1|
  double max_lap_mismatch = 0;         // direct vs closed-form Laplacian
  double max_frame_residual = 0;
  double max_beltrami = 0;
  double harmonic_max_lap = 0;

  // How closely the fitted phi tracks the two natural curvature multiples.
  double phi_vs_minus2K = 0;  // max |phi + 2K| / max(1, |phi|)
  double phi_vs_minus4K = 0;  // max |phi + 4K| / max(1, |phi|)

  // A flat normal connection with K bounded away from zero forces the
  // connection form to vanish for any pointwise fit; recorded when the
  // hypothesis holds on the grid.
  bool parallel_check_applicable = false;
  bool parallel_check_pass = true;
  double max_abs_beta = 0;
  double max_abs_kappa = 0;
  double min_abs_K = 0;

  std::string failure_reason;  // set for not_quasi_minimal verdicts
  double fail_p0 = 0, fail_p1 = 0;
};

ClassificationReport classify(const Chart& chart, const GridSpec& grid,
                              const Tolerances& tol = {});

}  // namespace lsurf
