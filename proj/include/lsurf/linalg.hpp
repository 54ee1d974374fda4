#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "lsurf/error.hpp"

// Linear algebra for R^4 with the neutral metric diag(+1,+1,-1,-1) and for
// its bivector space, identified with R^6 over the basis
//   e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4
// which diagonalizes the induced pairing with signature (+,-,-,-,-,+).
// Everything is templated on the scalar so the same formulas run on plain
// doubles and on truncated jets.

namespace lsurf {

template <class T>
struct Vec4T {
  std::array<T, 4> c{};

  T& operator[](std::size_t i) { return c[i]; }
  const T& operator[](std::size_t i) const { return c[i]; }

  Vec4T operator+(const Vec4T& o) const {
    return {{c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2], c[3] + o.c[3]}};
  }
  Vec4T operator-(const Vec4T& o) const {
    return {{c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2], c[3] - o.c[3]}};
  }
  Vec4T operator-() const { return {{-c[0], -c[1], -c[2], -c[3]}}; }
};

template <class T, class S>
Vec4T<T> operator*(const S& s, const Vec4T<T>& v) {
  return {{s * v.c[0], s * v.c[1], s * v.c[2], s * v.c[3]}};
}

using Vec4 = Vec4T<double>;

template <class T>
struct Bivec6T {
  std::array<T, 6> c{};

  T& operator[](std::size_t i) { return c[i]; }
  const T& operator[](std::size_t i) const { return c[i]; }

  Bivec6T operator+(const Bivec6T& o) const {
    Bivec6T r;
    for (int i = 0; i < 6; ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }
  Bivec6T operator-(const Bivec6T& o) const {
    Bivec6T r;
    for (int i = 0; i < 6; ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
  Bivec6T operator-() const {
    Bivec6T r;
    for (int i = 0; i < 6; ++i) r.c[i] = -c[i];
    return r;
  }
};

template <class T, class S>
Bivec6T<T> operator*(const S& s, const Bivec6T<T>& b) {
  Bivec6T<T> r;
  for (int i = 0; i < 6; ++i) r.c[i] = s * b.c[i];
  return r;
}

using Bivec6 = Bivec6T<double>;

template <class T>
T inner4(const Vec4T<T>& a, const Vec4T<T>& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] - a.c[2] * b.c[2] - a.c[3] * b.c[3];
}

template <class T>
Bivec6T<T> wedge(const Vec4T<T>& u, const Vec4T<T>& v) {
  Bivec6T<T> r;
  r.c[0] = u.c[0] * v.c[1] - u.c[1] * v.c[0];  // e1^e2
  r.c[1] = u.c[0] * v.c[2] - u.c[2] * v.c[0];  // e1^e3
  r.c[2] = u.c[0] * v.c[3] - u.c[3] * v.c[0];  // e1^e4
  r.c[3] = u.c[1] * v.c[2] - u.c[2] * v.c[1];  // e2^e3
  r.c[4] = u.c[1] * v.c[3] - u.c[3] * v.c[1];  // e2^e4
  r.c[5] = u.c[2] * v.c[3] - u.c[3] * v.c[2];  // e3^e4
  return r;
}

template <class T>
T inner6(const Bivec6T<T>& a, const Bivec6T<T>& b) {
  return a.c[0] * b.c[0] - a.c[1] * b.c[1] - a.c[2] * b.c[2] - a.c[3] * b.c[3] -
         a.c[4] * b.c[4] + a.c[5] * b.c[5];
}

// Euclidean norms, used for scale-aware tolerances only.
double norm_e(const Vec4& v);
double norm_e(const Bivec6& b);

enum class CausalClass { Spacelike, Timelike, Lightlike };

const char* causal_class_name(CausalClass c);

// |<v,v>| <= tol * max(1, |v|_E^2) counts as lightlike.
CausalClass causal_class(const Vec4& v, double tol = 1e-10);

struct NullCompletion {
  Vec4 w;    // <n1,w> = 0, <w,w> = 0, <n1p,w> = target
  Vec4 aux;  // same with the roles of n1 and n1p swapped
};

// Completes the pair {n1, n1p} (both lightlike, mutually orthogonal,
// independent) with a lightlike w having prescribed pairing against n1p.
// Deterministic: w is built from the least-norm solution of the two linear
// conditions. Throws DegenerateSpan when the preconditions fail.
NullCompletion null_frame_completion(const Vec4& n1, const Vec4& n1p,
                                     double target);

// Least-norm w solving inner4(a[i], w) = b[i] for m constraints (m <= 3).
// Throws DegenerateSpan when the constraint Gram matrix is numerically
// singular.
Vec4 least_norm_solve(const Vec4* a, const double* b, int m);

}  // namespace lsurf
