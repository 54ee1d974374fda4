#pragma once

#include <array>
#include <functional>

#include "lsurf/error.hpp"
#include "lsurf/linalg.hpp"

// Truncated Taylor arithmetic in two parameters. A Jet stores the derivative
// values d^(i+j)f/du^i dv^j for i+j <= order at a point, in graded
// lexicographic layout: (0,0); (1,0),(0,1); (2,0),(1,1),(0,2); ...
// Binary operations truncate to the smaller operand order. Constants carry
// the maximal order so they never limit a computation.

namespace lsurf {

class Jet {
 public:
  static constexpr int kMaxOrder = 4;
  static constexpr int kSlots = (kMaxOrder + 1) * (kMaxOrder + 2) / 2;

  Jet() : ord_(kMaxOrder) {}
  explicit Jet(int ord);

  static Jet constant(double v, int ord = kMaxOrder);
  // slot 0 seeds d/du = 1, slot 1 seeds d/dv = 1
  static Jet variable(double v, int slot, int ord);

  int order() const { return ord_; }
  double value() const { return c_[0]; }
  double deriv(int i, int j) const;

  static int index(int i, int j) { return (i + j) * (i + j + 1) / 2 + j; }
  double raw(int k) const { return c_[k]; }
  double& raw(int k) { return c_[k]; }

  // Derivative fields: one order lower, entries shifted.
  Jet du() const;
  Jet dv() const;

  Jet operator-() const;
  Jet operator+(const Jet& o) const;
  Jet operator-(const Jet& o) const;
  Jet operator*(const Jet& o) const;
  Jet operator/(const Jet& o) const;

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator+(double s, const Jet& j) { return Jet::constant(s) + j; }
  friend Jet operator+(const Jet& j, double s) { return j + Jet::constant(s); }
  friend Jet operator-(double s, const Jet& j) { return Jet::constant(s) - j; }
  friend Jet operator-(const Jet& j, double s) { return j - Jet::constant(s); }
  friend Jet operator*(double s, const Jet& j) { return Jet::constant(s) * j; }
  friend Jet operator*(const Jet& j, double s) { return j * Jet::constant(s); }
  friend Jet operator/(double s, const Jet& j) { return Jet::constant(s) / j; }
  friend Jet operator/(const Jet& j, double s) { return j / Jet::constant(s); }

  // Composition with a univariate function given by its derivative values
  // at this jet's value part.
  Jet compose(const std::array<double, kMaxOrder + 1>& outer_derivs) const;

 private:
  std::array<double, kSlots> c_{};
  int ord_;
};

Jet exp(const Jet& g);
Jet log(const Jet& g);
Jet sqrt(const Jet& g);
Jet sin(const Jet& g);
Jet cos(const Jet& g);
// Integer exponents run as repeated multiplication (any base); fractional
// exponents require a positive base value.
Jet pow(const Jet& g, double r);

using JetVec4 = Vec4T<Jet>;
using JetBivec6 = Bivec6T<Jet>;

Vec4 value_of(const JetVec4& v);
Bivec6 value_of(const JetBivec6& b);
JetVec4 du(const JetVec4& v);
JetVec4 dv(const JetVec4& v);
JetBivec6 du(const JetBivec6& b);
JetBivec6 dv(const JetBivec6& b);

// Central-difference derivative estimate with one Richardson extrapolation
// level, for cross-checking jet output. order = (iu, jv) with iu + jv <= 3.
// When a domain rectangle is supplied the step shrinks to keep the stencil
// inside; OutOfDomain if impossible.
struct FdDomain {
  double u0, u1, v0, v1;
};
double finite_difference_oracle(const std::function<double(double, double)>& f,
                                double u, double v, int iu, int jv,
                                const FdDomain* domain = nullptr);

}  // namespace lsurf
