#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "steamreg/numeric.hpp"

namespace steamreg {

// Objective value at x; writes the gradient into *grad when it is non-null.
using Objective = std::function<double(const Vector& x, Vector* grad)>;

// Called after every cycle with the current point and its objective value.
// Returning false stops the optimizer.
using ScgCallback = std::function<bool(std::size_t cycle, const Vector& x, double f)>;

struct ScgOptions {
  std::size_t max_cycles = 100;
  double sigma0 = 1e-4;   // finite-difference step scale for curvature
  double lambda0 = 1e-6;  // initial scale (trust-region) parameter
  double tol_x = 1e-12;
  double tol_f = 1e-15;
};

struct ScgResult {
  Vector x;
  double f = 0.0;
  std::size_t cycles = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  std::string stop_reason;
};

// Moller's scaled conjugate gradient. A cycle either accepts a step that
// does not increase f or keeps x and raises the scale parameter, so the
// accepted objective sequence is non-increasing.
ScgResult scg_minimize(const Objective& objective, Vector x0, const ScgOptions& options,
                       const ScgCallback& callback = {});

}  // namespace steamreg
