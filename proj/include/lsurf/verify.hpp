#pragma once

#include <string>
#include <vector>

#include "lsurf/chart_io.hpp"
#include "lsurf/tolerances.hpp"

namespace lsurf {

struct SuiteResult {
  std::string suite;
  bool pass = false;
  double max_residual = 0;
  double tolerance = 0;
  std::string note;
};

// Every suite name in canonical order.
std::vector<std::string> verify_suite_names();

// Suites that make sense for this chart: coefficient and constraint checks
// need integrated frame data, the hyperbolic-solver check needs a solved
// grid, and the finite-difference jet check needs a chart evaluable off its
// nodes.
std::vector<std::string> applicable_suites(const BuiltChart& built);

// Runs the named suites over the sampling grid; requesting a suite the
// chart cannot support is an input error.
std::vector<SuiteResult> run_verify(const BuiltChart& built,
                                    const std::vector<std::string>& suites,
                                    const GridSpec& grid,
                                    const Tolerances& tol = {});

Json suite_results_json(const std::vector<SuiteResult>& rows);

}  // namespace lsurf
