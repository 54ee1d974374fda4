#include "lsurf/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsurf/error.hpp"

namespace lsurf {

namespace {

double dot_e6(const Bivec6& a, const Bivec6& b) {
  double s = 0;
  for (int i = 0; i < 6; ++i) s += a.c[i] * b.c[i];
  return s;
}

Bivec6 mean_bivec(const std::vector<Bivec6>& v) {
  Bivec6 m{};
  for (const Bivec6& b : v) m = m + b;
  return (1.0 / double(v.size())) * m;
}

// phi minimizing ||lap - phi * w|| in the Euclidean sense.
double project_phi(const Bivec6& lap, const Bivec6& w) {
  double den = dot_e6(w, w);
  if (den <= 1e-300) return 0.0;
  return dot_e6(lap, w) / den;
}

double fit_residual(const std::vector<GaussSample>& samples,
                    const std::vector<double>& phi, const Bivec6& C) {
  double worst = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const GaussSample& s = samples[i];
    Bivec6 model = phi[i] * (s.G + C);
    double rel = norm_e(s.lap_closed - model) /
                 std::max(1.0, norm_e(s.lap_closed));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::NotQuasiMinimal: return "not_quasi_minimal";
    case Verdict::Harmonic: return "harmonic";
    case Verdict::Pw1FirstKind: return "pw1_first_kind";
    case Verdict::Pw1SecondKind: return "pw1_second_kind";
    case Verdict::NotPw1: return "not_pw1";
  }
  return "unknown";
}

FitResult fit_phi_and_C(const std::vector<GaussSample>& samples,
                        const Tolerances& tol) {
  if (samples.size() < 3)
    throw Error(ErrorCode::InsufficientSamples,
                "fit needs at least three samples")
        .with("count", double(samples.size()));

  const std::size_t n = samples.size();
  FitResult out;
  out.phi.assign(n, 0.0);

  double scale = 0;
  for (const GaussSample& s : samples)
    scale = std::max(scale, norm_e(s.lap_closed));
  if (scale <= 1e-10) {
    out.harmonic = true;
    out.stage = "harmonic";
    return out;
  }

  // Stage 1: C = 0, phi free per point.
  {
    double worst = 0;
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) {
      const GaussSample& s = samples[i];
      phi[i] = project_phi(s.lap_closed, s.G);
      double rel = norm_e(s.lap_closed - phi[i] * s.G) /
                   std::max(1.0, norm_e(s.lap_closed));
      worst = std::max(worst, rel);
    }
    if (worst <= tol.first_kind) {
      out.phi = std::move(phi);
      out.stage = "first_kind";
      out.max_rel_residual = worst;
      return out;
    }
  }

  // Stage 2a: constant phi. Minimizing sum || alpha lap_p - G_p - C ||^2 in
  // (alpha, C) reduces to one scalar regression on centered samples.
  {
    std::vector<Bivec6> laps, gs;
    laps.reserve(n);
    gs.reserve(n);
    for (const GaussSample& s : samples) {
      laps.push_back(s.lap_closed);
      gs.push_back(s.G);
    }
    Bivec6 lbar = mean_bivec(laps);
    Bivec6 gbar = mean_bivec(gs);
    double var = 0, cov = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Bivec6 dl = laps[i] - lbar;
      var += dot_e6(dl, dl);
      cov += dot_e6(dl, gs[i] - gbar);
    }
    if (var > 1e-20 * scale * scale) {
      double alpha = cov / var;
      if (std::abs(alpha) > 1e-12) {
        Bivec6 C = alpha * lbar - gbar;
        std::vector<double> phi(n, 1.0 / alpha);
        double worst = fit_residual(samples, phi, C);
        if (worst <= tol.fit) {
          out.phi = std::move(phi);
          out.C = C;
          out.c_norm = norm_e(C);
          out.stage = "constant_phi";
          out.max_rel_residual = worst;
          for (std::size_t i = 0; i < n; ++i) {
            double dev = norm_e((alpha * laps[i] - gs[i]) - C);
            out.drift = std::max(out.drift, dev);
          }
          return out;
        }
      }
    }
  }

  // Stage 2b: pointwise phi. Each pair (p*, q) determines C from a 6x2
  // least-squares system; the estimates are averaged and phi re-projected.
  {
    std::size_t pstar = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (norm_e(samples[i].lap_closed) > norm_e(samples[pstar].lap_closed))
        pstar = i;
    const Bivec6& lp = samples[pstar].lap_closed;
    const Bivec6& gp = samples[pstar].G;

    std::vector<Bivec6> cs;
    for (std::size_t q = 0; q < n; ++q) {
      if (q == pstar) continue;
      const Bivec6& lq = samples[q].lap_closed;
      Bivec6 rhs = gp - samples[q].G;
      double a11 = dot_e6(lp, lp);
      double a12 = -dot_e6(lp, lq);
      double a22 = dot_e6(lq, lq);
      double b1 = dot_e6(lp, rhs);
      double b2 = -dot_e6(lq, rhs);
      double tr = a11 + a22;
      double det = a11 * a22 - a12 * a12;
      if (det <= 0) continue;
      double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
      double lo = (tr - disc) / 2.0;
      if (lo <= 0 || (tr + disc) / 2.0 > 1e24 * lo) continue;
      double alpha = (a22 * b1 - a12 * b2) / det;
      cs.push_back(alpha * lp - gp);
    }
    if (cs.empty())
      throw Error(ErrorCode::IllConditionedFit,
                  "all sample pairs are degenerate");

    Bivec6 cbar = mean_bivec(cs);
    for (const Bivec6& c : cs)
      out.drift = std::max(out.drift, norm_e(c - cbar));
    for (std::size_t i = 0; i < n; ++i)
      out.phi[i] = project_phi(samples[i].lap_closed, samples[i].G + cbar);
    out.C = cbar;
    out.c_norm = norm_e(cbar);
    out.stage = "pairwise";
    out.max_rel_residual = fit_residual(samples, out.phi, cbar);
    return out;
  }
}

KindInfo kind_and_properness(const FitResult& fit, const Tolerances& tol) {
  KindInfo info;
  info.first_kind = fit.c_norm <= tol.c_zero;
  if (!fit.phi.empty()) {
    auto [mn, mx] = std::minmax_element(fit.phi.begin(), fit.phi.end());
    info.phi_min = *mn;
    info.phi_max = *mx;
    double scale = std::max({1.0, std::abs(*mn), std::abs(*mx)});
    info.phi_spread = (*mx - *mn) / scale;
    info.proper = info.phi_spread > tol.phi_spread;
  }
  return info;
}

double ConditionResiduals::max_abs() const {
  double m = 0;
  for (double v : e) m = std::max(m, std::abs(v));
  return m;
}

ConditionResiduals condition_residuals(const FrameData& fr, double phi,
                                       const Bivec6& C) {
  ConditionResiduals out;
  if (phi == 0) {
    for (auto& v : out.e) v = std::numeric_limits<double>::infinity();
    return out;
  }
  Bivec6 xy = wedge(fr.x, fr.y);
  Bivec6 nn = wedge(fr.n1, fr.n2);
  Bivec6 xn1 = wedge(fr.x, fr.n1);
  Bivec6 yn1 = wedge(fr.y, fr.n1);
  Bivec6 xn2 = wedge(fr.x, fr.n2);
  Bivec6 yn2 = wedge(fr.y, fr.n2);
  out.e[0] = inner6(C, xy) - (1.0 + 2.0 * fr.K / phi);
  out.e[1] = inner6(C, nn) + 2.0 * fr.kappa / phi;
  out.e[2] = inner6(C, xn1);
  out.e[3] = inner6(C, yn1);
  out.e[4] = inner6(C, xn2) + 2.0 * fr.beta1 / phi;
  out.e[5] = inner6(C, yn2) - 2.0 * fr.beta2 / phi;
  return out;
}

ClassificationReport classify(const Chart& chart, const GridSpec& grid,
                              const Tolerances& tol) {
  std::vector<double> ax0 = grid_axis(chart, 0, grid.n0, grid.margin);
  std::vector<double> ax1 = grid_axis(chart, 1, grid.n1, grid.margin);
  if (ax0.size() < 4 || ax1.size() < 4)
    throw Error(ErrorCode::InsufficientSamples,
                "classification needs at least a 4x4 grid")
        .with("n0", double(ax0.size()))
        .with("n1", double(ax1.size()));

  ClassificationReport rep;
  std::vector<GaussSample> samples;
  std::vector<FrameData> frames;
  samples.reserve(ax0.size() * ax1.size());

  for (double p0 : ax0) {
    for (double p1 : ax1) {
      try {
        PointAnalysis pa = analyze_point(chart, p0, p1, tol);
        samples.push_back(pa.gauss);
        frames.push_back(pa.frame);
        rep.max_gauss_norm_residual =
            std::max(rep.max_gauss_norm_residual, pa.gauss.norm_residual);
        rep.max_lap_mismatch = std::max(rep.max_lap_mismatch, pa.gauss.mismatch);
        rep.max_frame_residual =
            std::max(rep.max_frame_residual, pa.frame.frame_residual);
        rep.max_beltrami = std::max(rep.max_beltrami, pa.beltrami);
        rep.max_abs_beta = std::max({rep.max_abs_beta,
                                     std::abs(pa.frame.beta1),
                                     std::abs(pa.frame.beta2)});
        rep.max_abs_kappa = std::max(rep.max_abs_kappa,
                                     std::abs(pa.frame.kappa));
        double absK = std::abs(pa.frame.K);
        rep.min_abs_K = samples.size() == 1 ? absK
                                            : std::min(rep.min_abs_K, absK);
        rep.harmonic_max_lap =
            std::max(rep.harmonic_max_lap, norm_e(pa.gauss.lap_closed));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::MinimalPoint ||
            e.code() == ErrorCode::NotQuasiMinimal) {
          rep.verdict = Verdict::NotQuasiMinimal;
          rep.failure_reason = std::string(error_code_name(e.code())) + ": " +
                               e.what();
          rep.fail_p0 = p0;
          rep.fail_p1 = p1;
          return rep;
        }
        throw;
      }
    }
  }
  rep.samples = samples.size();

  if (rep.harmonic_max_lap <= tol.harmonic) {
    rep.verdict = Verdict::Harmonic;
    rep.stage = "harmonic";
    return rep;
  }

  FitResult fit = fit_phi_and_C(samples, tol);
  rep.stage = fit.stage;
  rep.C = fit.C;
  rep.c_norm = fit.c_norm;
  rep.drift = fit.drift;
  rep.fit_residual = fit.max_rel_residual;

  if (fit.harmonic) {
    rep.verdict = Verdict::Harmonic;
    return rep;
  }

  KindInfo kind = kind_and_properness(fit, tol);
  rep.proper = kind.proper;
  rep.phi_min = kind.phi_min;
  rep.phi_max = kind.phi_max;
  rep.phi_spread = kind.phi_spread;

  double min_abs_phi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    min_abs_phi = std::min(min_abs_phi, std::abs(fit.phi[i]));
    double den = std::max(1.0, std::abs(fit.phi[i]));
    rep.phi_vs_minus2K = std::max(
        rep.phi_vs_minus2K, std::abs(fit.phi[i] + 2.0 * frames[i].K) / den);
    rep.phi_vs_minus4K = std::max(
        rep.phi_vs_minus4K, std::abs(fit.phi[i] + 4.0 * frames[i].K) / den);
  }

  bool pw1 = fit.max_rel_residual <= tol.fit && min_abs_phi >= 1e-9 &&
             fit.drift <= tol.drift * std::max(1.0, fit.c_norm);
  if (pw1) {
    rep.verdict = kind.first_kind ? Verdict::Pw1FirstKind
                                  : Verdict::Pw1SecondKind;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      ConditionResiduals cr =
          condition_residuals(frames[i], fit.phi[i], fit.C);
      for (int k = 0; k < 6; ++k)
        rep.condition_max[k] =
            std::max(rep.condition_max[k], std::abs(cr.e[k]));
    }
    rep.max_condition_residual =
        *std::max_element(rep.condition_max.begin(), rep.condition_max.end());
    if (rep.max_abs_kappa <= 1e-7 && rep.min_abs_K >= 1e-6) {
      rep.parallel_check_applicable = true;
      rep.parallel_check_pass = rep.max_abs_beta <= 1e-6;
    }
  } else {
    rep.verdict = Verdict::NotPw1;
  }
  return rep;
}

}  // namespace lsurf
