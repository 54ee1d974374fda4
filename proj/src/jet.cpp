#include "lsurf/jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lsurf {

namespace {

constexpr double kBinom[5][5] = {
    {1, 0, 0, 0, 0},
    {1, 1, 0, 0, 0},
    {1, 2, 1, 0, 0},
    {1, 3, 3, 1, 0},
    {1, 4, 6, 4, 1},
};

constexpr double kFactorial[5] = {1, 1, 2, 6, 24};

}  // namespace

Jet::Jet(int ord) : ord_(ord) {
  if (ord < 0 || ord > kMaxOrder)
    throw Error(ErrorCode::InvalidOrder, "jet order out of range")
        .with("order", static_cast<double>(ord));
}

Jet Jet::constant(double v, int ord) {
  Jet j(ord);
  j.c_[0] = v;
  return j;
}

Jet Jet::variable(double v, int slot, int ord) {
  if (slot != 0 && slot != 1)
    throw Error(ErrorCode::BadInput, "jet variable slot must be 0 or 1");
  Jet j(ord);
  j.c_[0] = v;
  if (ord >= 1) j.c_[index(1 - slot, slot)] = 1.0;
  return j;
}

double Jet::deriv(int i, int j) const {
  if (i < 0 || j < 0 || i + j > ord_)
    throw Error(ErrorCode::InvalidOrder, "jet derivative order exceeds data")
        .with("i", static_cast<double>(i))
        .with("j", static_cast<double>(j))
        .with("jet_order", static_cast<double>(ord_));
  return c_[index(i, j)];
}

Jet Jet::du() const {
  if (ord_ < 1)
    throw Error(ErrorCode::InvalidOrder, "cannot differentiate an order-0 jet");
  Jet r(ord_ - 1);
  for (int m = 0; m <= r.ord_; ++m)
    for (int j = 0; j <= m; ++j)
      r.c_[index(m - j, j)] = c_[index(m - j + 1, j)];
  return r;
}

Jet Jet::dv() const {
  if (ord_ < 1)
    throw Error(ErrorCode::InvalidOrder, "cannot differentiate an order-0 jet");
  Jet r(ord_ - 1);
  for (int m = 0; m <= r.ord_; ++m)
    for (int j = 0; j <= m; ++j)
      r.c_[index(m - j, j)] = c_[index(m - j, j + 1)];
  return r;
}

Jet Jet::operator-() const {
  Jet r(ord_);
  for (int k = 0; k < kSlots; ++k) r.c_[k] = -c_[k];
  return r;
}

Jet Jet::operator+(const Jet& o) const {
  Jet r(std::min(ord_, o.ord_));
  for (int k = 0; k < kSlots; ++k) r.c_[k] = c_[k] + o.c_[k];
  return r;
}

Jet Jet::operator-(const Jet& o) const {
  Jet r(std::min(ord_, o.ord_));
  for (int k = 0; k < kSlots; ++k) r.c_[k] = c_[k] - o.c_[k];
  return r;
}

Jet Jet::operator*(const Jet& o) const {
  Jet r(std::min(ord_, o.ord_));
  for (int m = 0; m <= r.ord_; ++m) {
    for (int j = 0; j <= m; ++j) {
      int i = m - j;
      double acc = 0;
      for (int k = 0; k <= i; ++k)
        for (int l = 0; l <= j; ++l)
          acc += kBinom[i][k] * kBinom[j][l] * c_[index(k, l)] *
                 o.c_[index(i - k, j - l)];
      r.c_[index(i, j)] = acc;
    }
  }
  return r;
}

Jet Jet::compose(const std::array<double, kMaxOrder + 1>& outer) const {
  // Horner evaluation of sum_k outer[k]/k! * (g - g0)^k in jet arithmetic.
  Jet dg = *this;
  dg.c_[0] = 0.0;
  Jet w = Jet::constant(outer[ord_] / kFactorial[ord_], ord_);
  for (int k = ord_ - 1; k >= 0; --k)
    w = w * dg + Jet::constant(outer[k] / kFactorial[k], ord_);
  return w;
}

Jet Jet::operator/(const Jet& o) const {
  double b0 = o.c_[0];
  if (std::abs(b0) < 1e-300)
    throw Error(ErrorCode::DivisionBySingularJet,
                "divisor jet has zero value part");
  std::array<double, kMaxOrder + 1> rec{};
  double p = 1.0 / b0;
  for (int k = 0; k <= kMaxOrder; ++k) {
    rec[k] = kFactorial[k] * p * ((k % 2) ? -1.0 : 1.0);
    p /= b0;
  }
  return *this * o.compose(rec);
}

Jet exp(const Jet& g) {
  double e = std::exp(g.value());
  return g.compose({e, e, e, e, e});
}

Jet log(const Jet& g) {
  double g0 = g.value();
  if (!(g0 > 0))
    throw Error(ErrorCode::DomainError, "log requires a positive value part")
        .with("value", g0);
  std::array<double, Jet::kMaxOrder + 1> d{};
  d[0] = std::log(g0);
  double p = 1.0 / g0;
  for (int k = 1; k <= Jet::kMaxOrder; ++k) {
    d[k] = kFactorial[k - 1] * p * ((k % 2) ? 1.0 : -1.0);
    p /= g0;
  }
  return g.compose(d);
}

static Jet pow_noninteger(const Jet& g, double r) {
  double g0 = g.value();
  if (!(g0 > 0))
    throw Error(ErrorCode::DomainError,
                "fractional power requires a positive value part")
        .with("value", g0)
        .with("exponent", r);
  std::array<double, Jet::kMaxOrder + 1> d{};
  double coef = 1.0;
  for (int k = 0; k <= Jet::kMaxOrder; ++k) {
    d[k] = coef * std::pow(g0, r - k);
    coef *= (r - k);
  }
  return g.compose(d);
}

Jet sqrt(const Jet& g) {
  double g0 = g.value();
  if (!(g0 > 0))
    throw Error(ErrorCode::DomainError, "sqrt requires a positive value part")
        .with("value", g0);
  return pow_noninteger(g, 0.5);
}

Jet sin(const Jet& g) {
  double s = std::sin(g.value()), c = std::cos(g.value());
  return g.compose({s, c, -s, -c, s});
}

Jet cos(const Jet& g) {
  double s = std::sin(g.value()), c = std::cos(g.value());
  return g.compose({c, -s, -c, s, c});
}

Jet pow(const Jet& g, double r) {
  double rr = std::round(r);
  if (rr == r && std::abs(rr) <= 32) {
    int n = static_cast<int>(rr);
    if (n == 0) return Jet::constant(1.0, g.order());
    Jet acc = Jet::constant(1.0, g.order());
    for (int k = 0; k < std::abs(n); ++k) acc = acc * g;
    if (n < 0) acc = Jet::constant(1.0, g.order()) / acc;
    return acc;
  }
  return pow_noninteger(g, r);
}

Vec4 value_of(const JetVec4& v) {
  return {{v.c[0].value(), v.c[1].value(), v.c[2].value(), v.c[3].value()}};
}

Bivec6 value_of(const JetBivec6& b) {
  Bivec6 r;
  for (int i = 0; i < 6; ++i) r.c[i] = b.c[i].value();
  return r;
}

JetVec4 du(const JetVec4& v) {
  return {{v.c[0].du(), v.c[1].du(), v.c[2].du(), v.c[3].du()}};
}

JetVec4 dv(const JetVec4& v) {
  return {{v.c[0].dv(), v.c[1].dv(), v.c[2].dv(), v.c[3].dv()}};
}

JetBivec6 du(const JetBivec6& b) {
  JetBivec6 r;
  for (int i = 0; i < 6; ++i) r.c[i] = b.c[i].du();
  return r;
}

JetBivec6 dv(const JetBivec6& b) {
  JetBivec6 r;
  for (int i = 0; i < 6; ++i) r.c[i] = b.c[i].dv();
  return r;
}

namespace {

struct Stencil {
  int npts;
  double offset[4];
  double weight[4];
};

// Central stencils; weights are applied after division by h^order.
const Stencil kStencils[4] = {
    {1, {0}, {1.0}},
    {2, {-1, 1}, {-0.5, 0.5}},
    {3, {-1, 0, 1}, {1.0, -2.0, 1.0}},
    {4, {-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}},
};

double apply_stencils(const std::function<double(double, double)>& f, double u,
                      double v, int iu, int jv, double hu, double hv) {
  const Stencil& su = kStencils[iu];
  const Stencil& sv = kStencils[jv];
  double acc = 0;
  for (int a = 0; a < su.npts; ++a)
    for (int b = 0; b < sv.npts; ++b)
      acc += su.weight[a] * sv.weight[b] *
             f(u + su.offset[a] * hu, v + sv.offset[b] * hv);
  return acc / (std::pow(hu, iu) * std::pow(hv, jv));
}

}  // namespace

double finite_difference_oracle(const std::function<double(double, double)>& f,
                                double u, double v, int iu, int jv,
                                const FdDomain* domain) {
  if (iu < 0 || jv < 0 || iu + jv > 3)
    throw Error(ErrorCode::InvalidOrder,
                "finite-difference order limited to total order 3")
        .with("iu", static_cast<double>(iu))
        .with("jv", static_cast<double>(jv));
  int order = iu + jv;
  double eps = std::numeric_limits<double>::epsilon();
  // Balances roundoff eps/h^order against the post-Richardson h^4 truncation.
  double h = std::pow(eps, 1.0 / (order + 4));
  double hu = h * std::max(1.0, std::abs(u));
  double hv = h * std::max(1.0, std::abs(v));
  if (domain) {
    // Widest stencil reaches 2h; shrink until it fits.
    double ru = std::min(u - domain->u0, domain->u1 - u);
    double rv = std::min(v - domain->v0, domain->v1 - v);
    int guard = 0;
    while ((iu > 0 && 2 * hu > ru) || (jv > 0 && 2 * hv > rv)) {
      hu *= 0.5;
      hv *= 0.5;
      if (++guard > 40)
        throw Error(ErrorCode::OutOfDomain,
                    "stencil cannot fit inside the chart domain")
            .with("u", u)
            .with("v", v);
    }
  }
  if (order == 0) return f(u, v);
  double coarse = apply_stencils(f, u, v, iu, jv, hu, hv);
  double fine = apply_stencils(f, u, v, iu, jv, hu / 2, hv / 2);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace lsurf
