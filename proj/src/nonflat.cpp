#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <utility>

#include "lsurf/families.hpp"

namespace lsurf {
namespace {

Jet eval1(const ExprPtr& e, const Jet& x) { return eval_jet(e, x, x); }

// t-derivative arrays of the ODE coefficient functions, index = order.
// n1'' = A n1' + B n1; xi''' = -a2 xi'' - a1 xi' + cn n1 + cm n1'.
struct OdeCoeffs {
  std::array<double, 4> A{}, B{}, a1{}, a2{}, cn{}, cm{};
};

void fill_derivs(const Jet& j, std::array<double, 4>& a) {
  for (int k = 0; k <= std::min(3, j.order()); ++k) a[k] = j.deriv(0, k);
}

void check_profiles(double l1, double l3, double t) {
  if (std::abs(l1) < 1e-8 || std::abs(l3) < 1e-8)
    throw Error(ErrorCode::BadInput, "profile function vanishes")
        .with("t", t)
        .with("lambda1", l1)
        .with("lambda3", l3);
}

OdeCoeffs ode_coeffs(const ExprPtr& l1e, const ExprPtr& l3e, double t,
                     int order) {
  const Jet T = Jet::variable(t, 1, order);
  const Jet L1 = eval1(l1e, T), L3 = eval1(l3e, T);
  check_profiles(L1.value(), L3.value(), t);
  const Jet L1p = L1.dv(), L3p = L3.dv();
  const Jet L1pp = L1p.dv(), L3pp = L3p.dv();

  OdeCoeffs c;
  fill_derivs(L3p / L3 - 3.0 * (L1p / L1), c.A);
  fill_derivs(-1.0 / L3, c.B);
  fill_derivs(3.0 * (L3p / L3 - L1p / L1), c.a2);
  fill_derivs((-3.0 * L1 * (L1p * L3p + L3 * L1pp) + 3.0 * L3 * L1p * L1p +
               L1 * L1 * (2.0 * L3pp + 1.0)) /
                  (L1 * L1 * L3),
              c.a1);
  fill_derivs(81.0 *
                  (8.0 * L1p * L1p * L3 * L3 - 2.0 * L1 * L1pp * L3 * L3 +
                   L1 * L1 * L3 * L3pp - 7.0 * L1 * L1p * L3 * L3p +
                   L1 * L1 * L3p * L3p) /
                  (L1 * L1 * L1 * L1 * L1 * L3),
              c.cn);
  fill_derivs(162.0 * (L1 * L3p - 2.0 * L3 * L1p) / (L1 * L1 * L1 * L1), c.cm);
  return c;
}

using State = std::array<double, 20>;

State pack(const OdeState& s) {
  State y{};
  for (int k = 0; k < 4; ++k) {
    y[k] = s.n1.c[k];
    y[4 + k] = s.n1p.c[k];
    y[8 + k] = s.xi.c[k];
    y[12 + k] = s.xip.c[k];
    y[16 + k] = s.xipp.c[k];
  }
  return y;
}

OdeState unpack(double t, const State& y) {
  OdeState s;
  s.t = t;
  for (int k = 0; k < 4; ++k) {
    s.n1.c[k] = y[k];
    s.n1p.c[k] = y[4 + k];
    s.xi.c[k] = y[8 + k];
    s.xip.c[k] = y[12 + k];
    s.xipp.c[k] = y[16 + k];
  }
  return s;
}

State rhs(const ExprPtr& l1e, const ExprPtr& l3e, double t, const State& y) {
  const OdeCoeffs c = ode_coeffs(l1e, l3e, t, 2);
  State d;
  for (int k = 0; k < 4; ++k) {
    d[k] = y[4 + k];
    d[4 + k] = c.A[0] * y[4 + k] + c.B[0] * y[k];
    d[8 + k] = y[12 + k];
    d[12 + k] = y[16 + k];
    d[16 + k] = -c.a2[0] * y[16 + k] - c.a1[0] * y[12 + k] + c.cn[0] * y[k] +
                c.cm[0] * y[4 + k];
  }
  return d;
}

State rk4_step(const ExprPtr& l1e, const ExprPtr& l3e, double t, double h,
               const State& y) {
  auto axpy = [](const State& a, double f, const State& b) {
    State r;
    for (int k = 0; k < 20; ++k) r[k] = a[k] + f * b[k];
    return r;
  };
  const State k1 = rhs(l1e, l3e, t, y);
  const State k2 = rhs(l1e, l3e, t + h / 2, axpy(y, h / 2, k1));
  const State k3 = rhs(l1e, l3e, t + h / 2, axpy(y, h / 2, k2));
  const State k4 = rhs(l1e, l3e, t + h, axpy(y, h, k3));
  State out;
  for (int k = 0; k < 20; ++k)
    out[k] = y[k] + (h / 6) * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
  return out;
}

double max_abs(const State& y) {
  double m = 0;
  for (double x : y) m = std::max(m, std::abs(x));
  return m;
}

// Fourth-order stepping with full-versus-two-half-steps error control; the
// step only shrinks within an interval, and collapse below 1e-12 aborts.
State advance(const ExprPtr& l1e, const ExprPtr& l3e, double t, double target,
              State y) {
  constexpr double kLocalTol = 1e-10;
  double h = target - t;
  if (h == 0) return y;
  const double dir = h > 0 ? 1.0 : -1.0;
  while (dir * (target - t) > 1e-14 * std::max(1.0, std::abs(target))) {
    if (dir * h > dir * (target - t)) h = target - t;
    const State full = rk4_step(l1e, l3e, t, h, y);
    State half = rk4_step(l1e, l3e, t, h / 2, y);
    half = rk4_step(l1e, l3e, t + h / 2, h / 2, half);
    double err = 0;
    for (int k = 0; k < 20; ++k)
      err = std::max(err, std::abs(full[k] - half[k]));
    if (err <= kLocalTol * std::max(1.0, max_abs(half))) {
      y = half;
      t += h;
    } else {
      h /= 2;
      if (std::abs(h) < 1e-12)
        throw Error(ErrorCode::DomainError, "step size collapsed")
            .with("t", t);
    }
  }
  return y;
}

// The six monitored quantities: null conditions on n1, n1', xi' and the
// normalized pairing <n1', xi'> = 1/lambda3.
std::array<double, 6> trace_residuals(const OdeState& s, double l3) {
  return {inner4(s.n1, s.n1),   inner4(s.n1p, s.n1p), inner4(s.n1, s.n1p),
          inner4(s.n1, s.xip),  inner4(s.xip, s.xip),
          inner4(s.n1p, s.xip) - 1.0 / l3};
}

double max_residual(const std::array<double, 6>& r) {
  double m = 0;
  for (double x : r) m = std::max(m, std::abs(x));
  return m;
}

// First-order least-norm touch-up of the constraint set, n1 first, then n1'
// against it, then xi' against both.
OdeState project_state(const OdeState& s, double l3) {
  OdeState out = s;
  {
    Vec4 rows[1] = {out.n1};
    double b[1] = {-0.5 * inner4(out.n1, out.n1)};
    out.n1 = out.n1 + least_norm_solve(rows, b, 1);
  }
  {
    Vec4 rows[2] = {out.n1p, out.n1};
    double b[2] = {-0.5 * inner4(out.n1p, out.n1p), -inner4(out.n1, out.n1p)};
    out.n1p = out.n1p + least_norm_solve(rows, b, 2);
  }
  {
    Vec4 rows[3] = {out.xip, out.n1, out.n1p};
    double b[3] = {-0.5 * inner4(out.xip, out.xip), -inner4(out.n1, out.xip),
                   1.0 / l3 - inner4(out.n1p, out.xip)};
    out.xip = out.xip + least_norm_solve(rows, b, 3);
  }
  return out;
}

struct LambdaValues {
  double l1, l3, l1p, l3p;
};

LambdaValues lambda_values(const ExprPtr& l1e, const ExprPtr& l3e, double t) {
  const Jet T = Jet::variable(t, 1, 1);
  const Jet L1 = eval1(l1e, T), L3 = eval1(l3e, T);
  check_profiles(L1.value(), L3.value(), t);
  return {L1.value(), L3.value(), L1.deriv(0, 1), L3.deriv(0, 1)};
}

void check_radicand(const NonFlatSpec& spec, double t, double l1) {
  for (double s : {spec.domain.lo0, spec.domain.hi0}) {
    const double R = -(2.0 / 3.0) * l1 * s;
    if (R <= 0)
      throw Error(ErrorCode::DomainViolation,
                  "radicand of the profile radius is not positive")
          .with("s", s)
          .with("t", t)
          .with("radicand", R);
  }
}

void validate_spec(const NonFlatSpec& spec) {
  if (!spec.lambda1 || !spec.lambda3)
    throw Error(ErrorCode::BadInput, "non-flat family needs both profiles");
  if (!(spec.step > 0))
    throw Error(ErrorCode::BadInput, "step must be positive");
  if (!(spec.domain.span0() > 0) || !(spec.domain.span1() > 0))
    throw Error(ErrorCode::BadInput, "degenerate domain rectangle");
}

void validate_initial(const NonFlatSpec& spec, const NonFlatInitialData& d) {
  if (std::abs(d.t0 - spec.domain.lo1) > 1e-12 * std::max(1.0, std::abs(d.t0)))
    throw Error(ErrorCode::BadInput,
                "initial data must sit at the start of the t-interval")
        .with("t0", d.t0);
  const LambdaValues lv = lambda_values(spec.lambda1, spec.lambda3, d.t0);
  OdeState st;
  st.t = d.t0;
  st.n1 = d.n1;
  st.n1p = d.n1p;
  st.xi = d.xi;
  st.xip = d.xip;
  st.xipp = d.xipp;
  double r = max_residual(trace_residuals(st, lv.l3));
  r = std::max(r, std::abs(inner4(d.n1, d.xipp) + 1.0 / lv.l3));
  r = std::max(r, std::abs(inner4(d.xip, d.xipp)));
  r = std::max(r, std::abs(inner4(d.n1p, d.xipp) -
                           (3.0 * lv.l1p / lv.l1 - 2.0 * lv.l3p / lv.l3) /
                               lv.l3));
  double scale = std::max({1.0, norm_e(d.n1), norm_e(d.n1p), norm_e(d.xip),
                           norm_e(d.xipp)});
  if (r > 1e-12 * scale * scale)
    throw Error(ErrorCode::BadInput,
                "initial data violates the constraint set")
        .with("residual", r);
}

class NonflatChart : public Chart {
 public:
  NonflatChart(NonFlatSpec spec, NonflatTracePtr trace)
      : Chart(Coords::ST, spec.domain, "nonflat"),
        spec_(std::move(spec)),
        trace_(std::move(trace)) {}

 protected:
  JetVec4 eval_impl(double s, double t, int order) const override {
    const OdeState st = state_at(t);
    const OdeCoeffs c = ode_coeffs(spec_.lambda1, spec_.lambda3, t, 4);

    // Taylor coefficients in t from the two linear ODEs, by Leibniz
    // differentiation of the right-hand sides.
    std::array<std::array<double, 6>, 4> n;   // n[comp][k] = k-th derivative
    std::array<std::array<double, 5>, 4> xi;  // xi[comp][k]
    for (int k = 0; k < 4; ++k) {
      auto& d = n[k];
      d[0] = st.n1.c[k];
      d[1] = st.n1p.c[k];
      d[2] = c.A[0] * d[1] + c.B[0] * d[0];
      d[3] = c.A[0] * d[2] + (c.A[1] + c.B[0]) * d[1] + c.B[1] * d[0];
      d[4] = c.A[0] * d[3] + 2 * c.A[1] * d[2] + c.A[2] * d[1] +
             c.B[0] * d[2] + 2 * c.B[1] * d[1] + c.B[2] * d[0];
      d[5] = c.A[0] * d[4] + 3 * c.A[1] * d[3] + 3 * c.A[2] * d[2] +
             c.A[3] * d[1] + c.B[0] * d[3] + 3 * c.B[1] * d[2] +
             3 * c.B[2] * d[1] + c.B[3] * d[0];
      auto& e = xi[k];
      e[0] = st.xi.c[k];
      e[1] = st.xip.c[k];
      e[2] = st.xipp.c[k];
      e[3] = -c.a2[0] * e[2] - c.a1[0] * e[1] + c.cn[0] * d[0] +
             c.cm[0] * d[1];
      e[4] = -c.a2[1] * e[2] - c.a2[0] * e[3] - c.a1[1] * e[1] -
             c.a1[0] * e[2] + c.cn[1] * d[0] + c.cn[0] * d[1] +
             c.cm[1] * d[1] + c.cm[0] * d[2];
    }

    auto lift = [order](const double* vals) {
      Jet j(order);
      for (int k = 0; k <= order; ++k) j.raw(Jet::index(0, k)) = vals[k];
      return j;
    };

    const Jet T = Jet::variable(t, 1, order);
    const Jet L1 = eval1(spec_.lambda1, T), L3 = eval1(spec_.lambda3, T);
    check_profiles(L1.value(), L3.value(), t);
    const Jet S = Jet::variable(s, 0, order);
    const Jet R = (-2.0 / 3.0) * L1 * S;
    if (R.value() <= 0)
      throw Error(ErrorCode::DomainViolation,
                  "radicand of the profile radius is not positive")
          .with("s", s)
          .with("t", t)
          .with("radicand", R.value());
    const Jet W = sqrt(R);
    const Jet head = -(9.0 * L3 / (L1 * L1)) * W;
    const Jet mid = S * L3;

    JetVec4 z;
    for (int k = 0; k < 4; ++k)
      z[k] = head * lift(n[k].data()) - mid * lift(&n[k][1]) +
             lift(xi[k].data());
    return z;
  }

 private:
  OdeState state_at(double t) const {
    const auto& states = trace_->states;
    const double t0 = states.front().t;
    std::size_t idx = 0;
    if (states.size() > 1) {
      const double step = states[1].t - t0;
      double raw = std::floor((t - t0) / step + 1e-12);
      raw = std::max(0.0, std::min(raw, double(states.size() - 1)));
      idx = std::size_t(raw);
    }
    const OdeState& base = states[idx];
    if (std::abs(t - base.t) < 1e-14 * std::max(1.0, std::abs(t))) return base;
    State y = advance(spec_.lambda1, spec_.lambda3, base.t, t, pack(base));
    return unpack(t, y);
  }

  NonFlatSpec spec_;
  NonflatTracePtr trace_;
};

}  // namespace

NonFlatInitialData nonflat_initial_data(const ExprPtr& lambda1,
                                        const ExprPtr& lambda3, double t0,
                                        const NonFlatSeed& seed) {
  if (!lambda1 || !lambda3)
    throw Error(ErrorCode::BadInput, "non-flat family needs both profiles");
  const LambdaValues lv = lambda_values(lambda1, lambda3, t0);

  NonFlatInitialData d;
  d.t0 = t0;
  d.n1 = seed.n1;
  d.n1p = seed.n1p;
  d.xi = Vec4{{0, 0, 0, 0}};
  d.xip = null_frame_completion(seed.n1, seed.n1p, 1.0 / lv.l3).w;
  Vec4 rows[3] = {seed.n1, d.xip, seed.n1p};
  double b[3] = {-1.0 / lv.l3, 0.0,
                 (3.0 * lv.l1p / lv.l1 - 2.0 * lv.l3p / lv.l3) / lv.l3};
  d.xipp = least_norm_solve(rows, b, 3);
  return d;
}

void NonflatTrace::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::BadInput, "cannot open file for writing")
        .with("path", path);
  out << "t,n1_0,n1_1,n1_2,n1_3,n1p_0,n1p_1,n1p_2,n1p_3,xi_0,xi_1,xi_2,xi_3,"
         "xip_0,xip_1,xip_2,xip_3,xipp_0,xipp_1,xipp_2,xipp_3\n";
  char buf[64];
  for (const OdeState& s : states) {
    const State y = pack(s);
    std::snprintf(buf, sizeof buf, "%.17g", s.t);
    out << buf;
    for (double x : y) {
      std::snprintf(buf, sizeof buf, ",%.17g", x);
      out << buf;
    }
    out << '\n';
  }
}

std::shared_ptr<const NonflatTrace> NonflatTrace::load_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::BadInput, "cannot open file").with("path", path);
  auto trace = std::make_shared<NonflatTrace>();
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t;
    State y;
    int consumed = 0;
    const char* p = line.c_str();
    if (std::sscanf(p, "%lf%n", &t, &consumed) != 1)
      throw Error(ErrorCode::BadInput, "malformed trace row").with("path", path);
    p += consumed;
    for (int k = 0; k < 20; ++k) {
      if (std::sscanf(p, ",%lf%n", &y[k], &consumed) != 1)
        throw Error(ErrorCode::BadInput, "malformed trace row")
            .with("path", path);
      p += consumed;
    }
    trace->states.push_back(unpack(t, y));
  }
  if (trace->states.size() < 2)
    throw Error(ErrorCode::BadInput, "trace needs at least two states")
        .with("path", path);
  for (std::size_t k = 0; k + 1 < trace->states.size(); ++k)
    if (!(trace->states[k + 1].t > trace->states[k].t))
      throw Error(ErrorCode::BadInput, "trace states must increase in t")
          .with("path", path);
  return trace;
}

NonflatTracePtr nonflat_trace(const NonFlatSpec& spec, const Tolerances& tol) {
  validate_spec(spec);
  NonFlatInitialData init =
      spec.init ? *spec.init
                : nonflat_initial_data(spec.lambda1, spec.lambda3,
                                       spec.domain.lo1);
  validate_initial(spec, init);

  auto trace = std::make_shared<NonflatTrace>();
  trace->projected = spec.project;
  const double span = spec.domain.span1();
  const std::size_t steps = std::size_t(std::ceil(span / spec.step - 1e-12));

  OdeState cur;
  cur.t = init.t0;
  cur.n1 = init.n1;
  cur.n1p = init.n1p;
  cur.xi = init.xi;
  cur.xip = init.xip;
  cur.xipp = init.xipp;

  for (std::size_t k = 0; k <= steps; ++k) {
    const double tk = k == steps ? spec.domain.hi1
                                 : spec.domain.lo1 + double(k) * spec.step;
    if (k > 0) {
      State y = advance(spec.lambda1, spec.lambda3, trace->states.back().t, tk,
                        pack(trace->states.back()));
      cur = unpack(tk, y);
    }
    const LambdaValues lv = lambda_values(spec.lambda1, spec.lambda3, tk);
    check_radicand(spec, tk, lv.l1);
    const double drift = max_residual(trace_residuals(cur, lv.l3));
    trace->max_drift = std::max(trace->max_drift, drift);
    if (drift > tol.drift)
      throw Error(ErrorCode::ConstraintDrift,
                  "constraint set drifted beyond tolerance")
          .with("t", tk)
          .with("drift", drift)
          .with("tolerance", tol.drift);
    if (spec.project) cur = project_state(cur, lv.l3);
    trace->states.push_back(cur);
  }
  return trace;
}

ChartPtr nonflat_chart(const NonFlatSpec& spec, const NonflatTracePtr& trace,
                       const Tolerances& tol) {
  validate_spec(spec);
  if (!trace || trace->states.size() < 2)
    throw Error(ErrorCode::BadInput, "trace needs at least two states");
  const double slack = 1e-9 * std::max(1.0, spec.domain.span1());
  if (trace->states.front().t > spec.domain.lo1 + slack ||
      trace->states.back().t < spec.domain.hi1 - slack)
    throw Error(ErrorCode::BadInput, "trace does not cover the t-interval")
        .with("t_first", trace->states.front().t)
        .with("t_last", trace->states.back().t);
  for (const OdeState& s : trace->states) {
    const LambdaValues lv = lambda_values(spec.lambda1, spec.lambda3, s.t);
    check_radicand(spec, s.t, lv.l1);
    const double drift = max_residual(trace_residuals(s, lv.l3));
    if (drift > tol.drift)
      throw Error(ErrorCode::ConstraintDrift,
                  "cached trace violates the constraint set")
          .with("t", s.t)
          .with("drift", drift)
          .with("tolerance", tol.drift);
  }
  return std::make_shared<NonflatChart>(spec, trace);
}

ChartPtr nonflat_integrate(const NonFlatSpec& spec, const Tolerances& tol) {
  return nonflat_chart(spec, nonflat_trace(spec, tol), tol);
}

}  // namespace lsurf
