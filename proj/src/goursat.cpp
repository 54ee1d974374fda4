#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "lsurf/families.hpp"

namespace lsurf {
namespace {

// One-variable expression evaluated along a single jet direction, whichever
// parameter slot the variable was bound to.
Jet eval1(const ExprPtr& e, const Jet& x) { return eval_jet(e, x, x); }

ExprPtr zero_expr() {
  static ExprPtr z = parse_expr("0");
  return z;
}

std::array<double, 5> axis_derivs(const ExprPtr& e, double x) {
  Jet j = eval1(e, Jet::variable(x, 0, 4));
  return {j.deriv(0, 0), j.deriv(1, 0), j.deriv(2, 0), j.deriv(3, 0),
          j.deriv(4, 0)};
}

std::vector<double> linspace(double a, double b, int intervals) {
  std::vector<double> out(intervals + 1);
  for (int i = 0; i <= intervals; ++i)
    out[i] = a + (b - a) * i / double(intervals);
  out.back() = b;
  return out;
}

struct ValueGrid {
  std::vector<double> us, vs;
  std::vector<double> th;  // row-major, th[i * vs.size() + j]

  double& at(std::size_t i, std::size_t j) { return th[i * vs.size() + j]; }
  double at(std::size_t i, std::size_t j) const {
    return th[i * vs.size() + j];
  }
};

// Marching solve of the characteristic problem on an n x n cell grid:
// trapezoidal quadrature over each cell, the implicit corner value resolved
// by Picard iteration.
ValueGrid march(const FlatThetaSpec& spec, int intervals) {
  ValueGrid g;
  g.us = linspace(spec.domain.lo0, spec.domain.hi0, intervals);
  g.vs = linspace(spec.domain.lo1, spec.domain.hi1, intervals);
  const std::size_t nu = g.us.size(), nv = g.vs.size();
  g.th.assign(nu * nv, 0.0);
  std::vector<double> fv(nu * nv, 0.0);

  auto profile = [&](double w) { return eval_value(spec.F, w, w); };
  auto shift = [&](std::size_t i, std::size_t j) {
    return spec.c1 * g.us[i] + spec.c2 * g.vs[j];
  };

  for (std::size_t i = 0; i < nu; ++i)
    g.at(i, 0) = eval_value(spec.p, g.us[i], g.us[i]);
  for (std::size_t j = 1; j < nv; ++j)
    g.at(0, j) = eval_value(spec.q, g.vs[j], g.vs[j]);
  for (std::size_t i = 0; i < nu; ++i) fv[i * nv] = profile(g.at(i, 0) + shift(i, 0));
  for (std::size_t j = 1; j < nv; ++j) fv[j] = profile(g.at(0, j) + shift(0, j));

  for (std::size_t i = 1; i < nu; ++i) {
    for (std::size_t j = 1; j < nv; ++j) {
      const double cell = 0.25 * (g.us[i] - g.us[i - 1]) * (g.vs[j] - g.vs[j - 1]);
      const double base = g.at(i - 1, j) + g.at(i, j - 1) - g.at(i - 1, j - 1) +
                          cell * (fv[(i - 1) * nv + j - 1] +
                                  fv[(i - 1) * nv + j] + fv[i * nv + j - 1]);
      const double s = shift(i, j);
      double x = base + cell * profile(base + s);
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        const double next = base + cell * profile(x + s);
        if (!std::isfinite(next)) break;
        if (std::abs(next - x) <= 1e-12 * std::max(1.0, std::abs(next))) {
          x = next;
          converged = true;
          break;
        }
        x = next;
      }
      if (!converged || !std::isfinite(x))
        throw Error(ErrorCode::PicardDivergence,
                    "cell iteration failed to converge")
            .with("u", g.us[i])
            .with("v", g.vs[j]);
      g.at(i, j) = x;
      fv[i * nv + j] = profile(x + s);
    }
  }
  return g;
}

// Eliminates the leading quadrature error by combining a solve with its
// half-step refinement; the result lives on the coarse grid.
ValueGrid extrapolate(const ValueGrid& coarse, const ValueGrid& fine) {
  ValueGrid e;
  e.us = coarse.us;
  e.vs = coarse.vs;
  e.th.resize(coarse.th.size());
  const std::size_t nv = coarse.vs.size();
  for (std::size_t i = 0; i < coarse.us.size(); ++i)
    for (std::size_t j = 0; j < nv; ++j)
      e.th[i * nv + j] = (4.0 * fine.at(2 * i, 2 * j) - coarse.at(i, j)) / 3.0;
  return e;
}

double shared_node_gap(const ValueGrid& prev, const ValueGrid& cur) {
  double gap = 0;
  for (std::size_t i = 0; i < prev.us.size(); ++i)
    for (std::size_t j = 0; j < prev.vs.size(); ++j)
      gap = std::max(gap, std::abs(cur.at(2 * i, 2 * j) - prev.at(i, j)));
  return gap;
}

// Cumulative integral of uniformly sampled values with fourth-order interval
// weights; out[0] = 0, out[k] = integral up to node k.
void cumulative(const double* f, std::size_t n, double h, double* out) {
  out[0] = 0.0;
  const std::size_t m = n - 1;
  for (std::size_t k = 0; k < m; ++k) {
    double seg;
    if (k == 0)
      seg = (h / 24.0) * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]);
    else if (k == m - 1)
      seg = (h / 24.0) * (f[m - 3] - 5 * f[m - 2] + 19 * f[m - 1] + 9 * f[m]);
    else
      seg = (h / 24.0) * (-f[k - 1] + 13 * f[k] + 13 * f[k + 1] - f[k + 2]);
    out[k + 1] = out[k] + seg;
  }
}

struct FieldBuild {
  std::vector<Jet> jets;
  double residual = 0;
};

// Completes a value grid to order-4 node jets. Pure u-derivatives integrate
// the differentiated characteristic relation along v (and symmetrically);
// mixed partials come from composing the profile with the partially built
// jet, one total order at a time. The residual compares the values against
// the integral form of the defining equation through an independent
// quadrature.
FieldBuild complete_field(const std::vector<double>& us,
                          const std::vector<double>& vs,
                          const std::vector<double>& val,
                          const FlatThetaSpec& spec) {
  const std::size_t nu = us.size(), nv = vs.size();
  const double hu = (us.back() - us.front()) / double(nu - 1);
  const double hv = (vs.back() - vs.front()) / double(nv - 1);

  std::vector<std::array<double, 5>> fd(nu * nv);
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nv; ++j)
      fd[i * nv + j] = axis_derivs(
          spec.F, val[i * nv + j] + spec.c1 * us[i] + spec.c2 * vs[j]);

  std::vector<std::array<double, 5>> pd(nu), qd(nv);
  for (std::size_t i = 0; i < nu; ++i) pd[i] = axis_derivs(spec.p, us[i]);
  for (std::size_t j = 0; j < nv; ++j) qd[j] = axis_derivs(spec.q, vs[j]);

  // d2u[k] holds the k-th pure u-derivative field, and symmetrically for v.
  std::array<std::vector<double>, 5> du_f, dv_f;
  du_f[0] = val;
  dv_f[0] = val;
  std::vector<double> integrand(std::max(nu, nv)), acc(std::max(nu, nv));

  for (int k = 1; k <= 4; ++k) {
    du_f[k].assign(nu * nv, 0.0);
    for (std::size_t i = 0; i < nu; ++i) {
      for (std::size_t j = 0; j < nv; ++j) {
        const auto& F = fd[i * nv + j];
        double g = 0;
        const double psi1 = k >= 2 ? du_f[1][i * nv + j] + spec.c1 : 0;
        const double psi2 = k >= 3 ? du_f[2][i * nv + j] : 0;
        const double psi3 = k >= 4 ? du_f[3][i * nv + j] : 0;
        switch (k) {
          case 1: g = F[0]; break;
          case 2: g = F[1] * psi1; break;
          case 3: g = F[2] * psi1 * psi1 + F[1] * psi2; break;
          default:
            g = F[3] * psi1 * psi1 * psi1 + 3 * F[2] * psi1 * psi2 +
                F[1] * psi3;
        }
        integrand[j] = g;
      }
      cumulative(integrand.data(), nv, hv, acc.data());
      for (std::size_t j = 0; j < nv; ++j)
        du_f[k][i * nv + j] = pd[i][k] + acc[j];
    }

    dv_f[k].assign(nu * nv, 0.0);
    for (std::size_t j = 0; j < nv; ++j) {
      for (std::size_t i = 0; i < nu; ++i) {
        const auto& F = fd[i * nv + j];
        double g = 0;
        const double psi1 = k >= 2 ? dv_f[1][i * nv + j] + spec.c2 : 0;
        const double psi2 = k >= 3 ? dv_f[2][i * nv + j] : 0;
        const double psi3 = k >= 4 ? dv_f[3][i * nv + j] : 0;
        switch (k) {
          case 1: g = F[0]; break;
          case 2: g = F[1] * psi1; break;
          case 3: g = F[2] * psi1 * psi1 + F[1] * psi2; break;
          default:
            g = F[3] * psi1 * psi1 * psi1 + 3 * F[2] * psi1 * psi2 +
                F[1] * psi3;
        }
        integrand[i] = g;
      }
      cumulative(integrand.data(), nu, hu, acc.data());
      for (std::size_t i = 0; i < nu; ++i)
        dv_f[k][i * nv + j] = qd[j][k] + acc[i];
    }
  }

  FieldBuild out;
  out.jets.assign(nu * nv, Jet(4));
  for (std::size_t i = 0; i < nu; ++i) {
    for (std::size_t j = 0; j < nv; ++j) {
      Jet& th = out.jets[i * nv + j];
      th.raw(Jet::index(0, 0)) = val[i * nv + j];
      for (int k = 1; k <= 4; ++k) {
        th.raw(Jet::index(k, 0)) = du_f[k][i * nv + j];
        th.raw(Jet::index(0, k)) = dv_f[k][i * nv + j];
      }
      // psi carries the chain-rule data; only derivatives of total order
      // below the slot being filled enter each composition pass.
      for (int pass = 2; pass <= 4; ++pass) {
        Jet psi = th + spec.c1 * Jet::variable(us[i], 0, 4) +
                  spec.c2 * Jet::variable(vs[j], 1, 4);
        Jet fpsi = psi.compose(fd[i * nv + j]);
        for (int a = 1; a <= pass - 1; ++a) {
          int b = pass - a;
          if (b >= 1) th.raw(Jet::index(a, b)) = fpsi.deriv(a - 1, b - 1);
        }
      }
    }
  }

  // Integral-form residual: theta - [p + q - p(u0) + iint F], the double
  // integral accumulated by the same fourth-order rule in each direction.
  std::vector<double> inner(nu * nv), full(nu * nv);
  for (std::size_t i = 0; i < nu; ++i) {
    for (std::size_t j = 0; j < nv; ++j) integrand[j] = fd[i * nv + j][0];
    cumulative(integrand.data(), nv, hv, acc.data());
    for (std::size_t j = 0; j < nv; ++j) inner[i * nv + j] = acc[j];
  }
  for (std::size_t j = 0; j < nv; ++j) {
    for (std::size_t i = 0; i < nu; ++i) integrand[i] = inner[i * nv + j];
    cumulative(integrand.data(), nu, hu, acc.data());
    for (std::size_t i = 0; i < nu; ++i) full[i * nv + j] = acc[i];
  }
  const double corner = pd[0][0];
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nv; ++j)
      out.residual = std::max(
          out.residual, std::abs(val[i * nv + j] - (pd[i][0] + qd[j][0] -
                                                    corner + full[i * nv + j])));
  return out;
}

FlatThetaSpec normalized(FlatThetaSpec spec) {
  if (!spec.F)
    throw Error(ErrorCode::BadInput, "flat family needs a profile function");
  if (!spec.p) spec.p = zero_expr();
  if (!spec.q) spec.q = zero_expr();
  return spec;
}

class ThetaFieldChart : public Chart {
 public:
  ThetaFieldChart(ThetaFieldPtr field, Domain domain)
      : Chart(Coords::UV, domain, "flat_theta"), field_(std::move(field)) {}

  std::vector<double> axis_nodes(int axis) const override {
    return axis == 0 ? field_->us() : field_->vs();
  }

 protected:
  JetVec4 eval_impl(double u, double v, int order) const override {
    const auto& us = field_->us();
    const auto& vs = field_->vs();
    const std::size_t i = nearest(us, u), j = nearest(vs, v);
    const double su = 1e-9 * std::max(1.0, std::abs(us.back() - us.front()));
    const double sv = 1e-9 * std::max(1.0, std::abs(vs.back() - vs.front()));
    if (std::abs(us[i] - u) > su || std::abs(vs[j] - v) > sv)
      throw Error(ErrorCode::OutOfDomain,
                  "grid-backed chart evaluates only at stored nodes")
          .with("p0", u)
          .with("p1", v);

    Jet th(order);
    const Jet& full = field_->at(i, j);
    for (int a = 0; a <= order; ++a)
      for (int b = 0; a + b <= order; ++b)
        th.raw(Jet::index(a, b)) = full.deriv(a, b);

    const Jet U = Jet::variable(us[i], 0, order);
    const Jet V = Jet::variable(vs[j], 1, order);
    const double r = 1.0 / std::numbers::sqrt2;
    return JetVec4{th, (U - V) * r, (U + V) * r, th};
  }

 private:
  static std::size_t nearest(const std::vector<double>& xs, double x) {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return xs.size() - 1;
    if (it == xs.begin()) return 0;
    std::size_t hi = std::size_t(it - xs.begin());
    return (*it - x < x - xs[hi - 1]) ? hi : hi - 1;
  }

  ThetaFieldPtr field_;
};

}  // namespace

ThetaField::ThetaField(std::vector<double> us, std::vector<double> vs,
                       std::vector<Jet> jets, double residual,
                       double refinement_gap)
    : us_(std::move(us)),
      vs_(std::move(vs)),
      jets_(std::move(jets)),
      residual_(residual),
      refinement_gap_(refinement_gap) {
  if (us_.size() < 4 || vs_.size() < 4 || jets_.size() != us_.size() * vs_.size())
    throw Error(ErrorCode::BadInput, "theta grid needs at least 4x4 nodes");
}

const Jet& ThetaField::at(std::size_t i, std::size_t j) const {
  if (i >= us_.size() || j >= vs_.size())
    throw Error(ErrorCode::OutOfDomain, "theta grid index out of range");
  return jets_[i * vs_.size() + j];
}

void ThetaField::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::BadInput, "cannot open file for writing")
        .with("path", path);
  out << "i,j,u,v,theta\n";
  char buf[96];
  for (std::size_t i = 0; i < us_.size(); ++i) {
    for (std::size_t j = 0; j < vs_.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g\n", i, j,
                    us_[i], vs_[j], jets_[i * vs_.size() + j].value());
      out << buf;
    }
  }
}

ThetaGridValues load_theta_values_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::BadInput, "cannot open file").with("path", path);
  std::string line;
  std::getline(in, line);  // header
  struct Row {
    std::size_t i, j;
    double u, v, th;
  };
  std::vector<Row> rows;
  std::size_t nu = 0, nv = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row r;
    if (std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf,%lf", &r.i, &r.j, &r.u,
                    &r.v, &r.th) != 5)
      throw Error(ErrorCode::BadInput, "malformed theta grid row")
          .with("path", path);
    nu = std::max(nu, r.i + 1);
    nv = std::max(nv, r.j + 1);
    rows.push_back(r);
  }
  if (rows.size() != nu * nv || nu < 4 || nv < 4)
    throw Error(ErrorCode::BadInput, "incomplete theta grid").with("path", path);
  ThetaGridValues g;
  g.us.assign(nu, std::numeric_limits<double>::quiet_NaN());
  g.vs.assign(nv, std::numeric_limits<double>::quiet_NaN());
  g.values.assign(nu * nv, std::numeric_limits<double>::quiet_NaN());
  for (const Row& r : rows) {
    g.us[r.i] = r.u;
    g.vs[r.j] = r.v;
    g.values[r.i * nv + r.j] = r.th;
  }
  for (double x : g.values)
    if (!std::isfinite(x))
      throw Error(ErrorCode::BadInput, "theta grid has holes").with("path", path);
  return g;
}

ThetaFieldPtr theta_field_from_values(const ThetaGridValues& grid,
                                      const FlatThetaSpec& raw_spec,
                                      const Tolerances& tol) {
  FlatThetaSpec spec = normalized(raw_spec);
  const std::size_t nu = grid.us.size(), nv = grid.vs.size();
  if (nu < 4 || nv < 4 || grid.values.size() != nu * nv)
    throw Error(ErrorCode::BadInput, "theta grid needs at least 4x4 nodes");
  for (auto axis : {&grid.us, &grid.vs}) {
    const auto& xs = *axis;
    const double h = (xs.back() - xs.front()) / double(xs.size() - 1);
    if (!(h > 0))
      throw Error(ErrorCode::BadInput, "theta grid axis not increasing");
    for (std::size_t k = 0; k + 1 < xs.size(); ++k)
      if (std::abs(xs[k + 1] - xs[k] - h) > 1e-9 * std::max(1.0, std::abs(h)))
        throw Error(ErrorCode::BadInput, "theta grid axis not uniform");
  }
  FieldBuild b = complete_field(grid.us, grid.vs, grid.values, spec);
  if (b.residual > tol.goursat)
    throw Error(ErrorCode::BadInput,
                "stored grid fails the integral-form residual check")
        .with("residual", b.residual)
        .with("tolerance", tol.goursat);
  return std::make_shared<ThetaField>(grid.us, grid.vs, std::move(b.jets),
                                      b.residual);
}

ThetaFieldPtr goursat_solve(const FlatThetaSpec& raw_spec,
                            const Tolerances& tol) {
  FlatThetaSpec spec = normalized(raw_spec);
  if (spec.resolution < 4)
    throw Error(ErrorCode::BadInput, "marching grid needs at least 4 intervals")
        .with("resolution", double(spec.resolution));
  if (spec.max_refinements < 1)
    throw Error(ErrorCode::BadInput, "need at least one refinement");
  if (!(spec.domain.span0() > 0) || !(spec.domain.span1() > 0))
    throw Error(ErrorCode::BadInput, "degenerate domain rectangle");

  const double pc = eval_value(spec.p, spec.domain.lo0, spec.domain.lo0);
  const double qc = eval_value(spec.q, spec.domain.lo1, spec.domain.lo1);
  if (std::abs(pc - qc) > 1e-12 * std::max(1.0, std::abs(pc)))
    throw Error(ErrorCode::CornerMismatch,
                "characteristic data disagrees at the corner")
        .with("p_corner", pc)
        .with("q_corner", qc);

  ValueGrid coarse = march(spec, spec.resolution);
  ValueGrid fine = march(spec, 2 * spec.resolution);
  ValueGrid prev = extrapolate(coarse, fine);
  double gap = std::numeric_limits<double>::infinity();

  for (int k = 1; k <= spec.max_refinements; ++k) {
    ValueGrid finer = march(spec, (2 << k) * spec.resolution);
    ValueGrid cur = extrapolate(fine, finer);
    gap = shared_node_gap(prev, cur);
    if (gap <= tol.goursat) {
      FieldBuild b = complete_field(cur.us, cur.vs, cur.th, spec);
      if (b.residual <= tol.goursat)
        return std::make_shared<ThetaField>(cur.us, cur.vs, std::move(b.jets),
                                            b.residual, gap);
      // fall through: keep refining until the independent residual agrees
    }
    prev = std::move(cur);
    fine = std::move(finer);
  }
  throw Error(ErrorCode::PicardDivergence,
              "grid refinement did not reach the requested agreement")
      .with("gap", gap)
      .with("tolerance", tol.goursat);
}

ChartPtr bd_zero_surface(const ThetaFieldPtr& field, const Tolerances& tol) {
  if (!field) throw Error(ErrorCode::BadInput, "missing theta field");
  double min_mix = std::numeric_limits<double>::infinity();
  double at_u = 0, at_v = 0;
  for (std::size_t i = 0; i < field->us().size(); ++i) {
    for (std::size_t j = 0; j < field->vs().size(); ++j) {
      const double m = std::abs(field->at(i, j).deriv(1, 1));
      if (m < min_mix) {
        min_mix = m;
        at_u = field->us()[i];
        at_v = field->vs()[j];
      }
    }
  }
  if (min_mix <= tol.minimal)
    throw Error(ErrorCode::QuasiMinimalityViolated,
                "mean curvature vanishes on the grid")
        .with("theta_uv", min_mix)
        .with("u", at_u)
        .with("v", at_v);
  Domain d{field->us().front(), field->us().back(), field->vs().front(),
           field->vs().back()};
  return std::make_shared<ThetaFieldChart>(field, d);
}

ChartPtr bd_zero_surface(const ExprPtr& theta, Domain domain,
                         const Tolerances& tol) {
  if (!theta) throw Error(ErrorCode::BadInput, "missing profile");
  double min_mix = std::numeric_limits<double>::infinity();
  double at_u = 0, at_v = 0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double u = domain.lo0 + domain.span0() * i / 20.0;
      const double v = domain.lo1 + domain.span1() * j / 20.0;
      const double m = std::abs(eval_jet(theta, u, v, 2).deriv(1, 1));
      if (m < min_mix) {
        min_mix = m;
        at_u = u;
        at_v = v;
      }
    }
  }
  if (min_mix <= tol.minimal)
    throw Error(ErrorCode::QuasiMinimalityViolated,
                "mean curvature vanishes on the grid")
        .with("theta_uv", min_mix)
        .with("u", at_u)
        .with("v", at_v);
  std::array<ExprPtr, 4> comps{theta, parse_expr("(u - v)/sqrt(2)"),
                               parse_expr("(u + v)/sqrt(2)"), theta};
  return std::make_shared<ExprChart>(std::move(comps), Coords::UV, domain,
                                     "flat_theta");
}

}  // namespace lsurf
