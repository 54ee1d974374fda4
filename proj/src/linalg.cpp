#include "lsurf/linalg.hpp"

#include <algorithm>
#include <cstdio>

namespace lsurf {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::ConstraintDrift: return "ConstraintDrift";
    case ErrorCode::CornerMismatch: return "CornerMismatch";
    case ErrorCode::DegenerateSpan: return "DegenerateSpan";
    case ErrorCode::DivisionBySingularJet: return "DivisionBySingularJet";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::MinimalPoint: return "MinimalPoint";
    case ErrorCode::NotNullCoordinates: return "NotNullCoordinates";
    case ErrorCode::NotQuasiMinimal: return "NotQuasiMinimal";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::PicardDivergence: return "PicardDivergence";
    case ErrorCode::QuasiMinimalityViolated: return "QuasiMinimalityViolated";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
  }
  return "Unknown";
}

Error& Error::with(const std::string& key, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  details_.emplace_back(key, buf);
  return *this;
}

double norm_e(const Vec4& v) {
  return std::sqrt(v.c[0] * v.c[0] + v.c[1] * v.c[1] + v.c[2] * v.c[2] +
                   v.c[3] * v.c[3]);
}

double norm_e(const Bivec6& b) {
  double s = 0;
  for (int i = 0; i < 6; ++i) s += b.c[i] * b.c[i];
  return std::sqrt(s);
}

const char* causal_class_name(CausalClass c) {
  switch (c) {
    case CausalClass::Spacelike: return "spacelike";
    case CausalClass::Timelike: return "timelike";
    case CausalClass::Lightlike: return "lightlike";
  }
  return "unknown";
}

CausalClass causal_class(const Vec4& v, double tol) {
  double n = norm_e(v);
  double q = inner4(v, v);
  double bound = tol * std::max(1.0, n * n);
  if (std::abs(q) <= bound) return CausalClass::Lightlike;
  return q > 0 ? CausalClass::Spacelike : CausalClass::Timelike;
}

static double dot_e(const Vec4& a, const Vec4& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2] + a.c[3] * b.c[3];
}

Vec4 least_norm_solve(const Vec4* a, const double* b, int m) {
  // Constraints inner4(a[i], w) = b[i] are Euclidean rows r[i] = G a[i];
  // the least-norm solution is w = R^T (R R^T)^{-1} b and the Gram matrix
  // R R^T has entries dot_e(a[i], a[j]).
  double K[3][3];
  double rhs[3];
  double scale = 0;
  for (int i = 0; i < m; ++i) {
    rhs[i] = b[i];
    for (int j = 0; j < m; ++j) K[i][j] = dot_e(a[i], a[j]);
    scale = std::max(scale, K[i][i]);
  }
  if (scale <= 0)
    throw Error(ErrorCode::DegenerateSpan, "constraint vectors are zero");

  // Gaussian elimination with partial pivoting on the m x m Gram system.
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(K[perm[r]][col]) > std::abs(K[perm[piv]][col])) piv = r;
    std::swap(perm[col], perm[piv]);
    double p = K[perm[col]][col];
    if (std::abs(p) <= 1e-13 * scale)
      throw Error(ErrorCode::DegenerateSpan,
                  "constraint Gram matrix is numerically singular");
    for (int r = col + 1; r < m; ++r) {
      double f = K[perm[r]][col] / p;
      for (int cc = col; cc < m; ++cc) K[perm[r]][cc] -= f * K[perm[col]][cc];
      rhs[perm[r]] -= f * rhs[perm[col]];
    }
  }
  double y[3] = {0, 0, 0};
  for (int row = m - 1; row >= 0; --row) {
    double s = rhs[perm[row]];
    for (int cc = row + 1; cc < m; ++cc) s -= K[perm[row]][cc] * y[cc];
    y[row] = s / K[perm[row]][row];
  }

  Vec4 w{{0, 0, 0, 0}};
  for (int i = 0; i < m; ++i) {
    Vec4 r{{a[i].c[0], a[i].c[1], -a[i].c[2], -a[i].c[3]}};
    w = w + y[i] * r;
  }
  return w;
}

static Vec4 complete_one(const Vec4& n1, const Vec4& n1p, double target) {
  Vec4 rows[2] = {n1, n1p};
  double rhs[2] = {0.0, target};
  Vec4 w0 = least_norm_solve(rows, rhs, 2);
  // Adding multiples of n1p keeps both linear conditions; pick the one that
  // kills <w,w>.
  double gamma = -inner4(w0, w0) / (2.0 * target);
  return w0 + gamma * n1p;
}

NullCompletion null_frame_completion(const Vec4& n1, const Vec4& n1p,
                                     double target) {
  double s1 = norm_e(n1), s2 = norm_e(n1p);
  double scale = std::max({1.0, s1 * s1, s2 * s2, s1 * s2});
  if (target == 0.0)
    throw Error(ErrorCode::DegenerateSpan, "target pairing must be nonzero");
  if (std::abs(inner4(n1, n1)) > 1e-10 * scale)
    throw Error(ErrorCode::DegenerateSpan, "n1 is not lightlike")
        .with("inner4_n1_n1", inner4(n1, n1));
  if (std::abs(inner4(n1p, n1p)) > 1e-10 * scale)
    throw Error(ErrorCode::DegenerateSpan, "n1p is not lightlike")
        .with("inner4_n1p_n1p", inner4(n1p, n1p));
  if (std::abs(inner4(n1, n1p)) > 1e-10 * scale)
    throw Error(ErrorCode::DegenerateSpan, "n1 and n1p are not orthogonal")
        .with("inner4_n1_n1p", inner4(n1, n1p));
  // Independence: Euclidean Gram determinant of the pair.
  double g = s1 * s1 * s2 * s2 - dot_e(n1, n1p) * dot_e(n1, n1p);
  if (g <= 1e-12 * scale * scale)
    throw Error(ErrorCode::DegenerateSpan, "n1 and n1p are linearly dependent");

  NullCompletion out;
  out.w = complete_one(n1, n1p, target);
  out.aux = complete_one(n1p, n1, target);
  return out;
}

}  // namespace lsurf
