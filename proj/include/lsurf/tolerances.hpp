#pragma once

#include <string>
#include <vector>

namespace lsurf {

// Numerical thresholds used across the pipeline. Every value can be
// overridden by key at runtime; keys match the field names.
struct Tolerances {
  double metric = 1e-9;        // null/normalization conditions on the metric
  double lightlike = 1e-10;    // causal-type test for the mean curvature
  double minimal = 1e-9;       // ||H|| below this counts as a minimal point
  double frame = 1e-9;         // pseudo-orthonormal frame product residuals
  double integrability = 1e-6; // structure-equation residual gate
  double beltrami = 1e-6;      // Laplacian-of-position cross-check
  double laplacian = 1e-6;     // direct vs closed-form Gauss-map Laplacian
  double harmonic = 1e-7;      // max ||ΔG|| treated as harmonic
  double fit = 1e-6;           // relative residual of the (phi, C) fit
  double first_kind = 1e-7;    // relative residual for the C = 0 fit
  double c_zero = 1e-8;        // ||C|| below this counts as first kind
  double phi_spread = 1e-6;    // relative phi variation marking properness
  double drift = 1e-6;         // ODE constraint drift bound
  double goursat = 1e-9;       // hyperbolic solver agreement/residual bound
  double verify = 1e-6;        // default gate for verification suites

  void set(const std::string& key, double value);
  std::vector<std::pair<std::string, double>> entries() const;
};

}  // namespace lsurf
