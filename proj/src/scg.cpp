#include "steamreg/scg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "steamreg/errors.hpp"

namespace steamreg {
namespace {

constexpr double kLambdaMin = 1e-15;
constexpr double kLambdaMax = 1e100;

bool finite(const Vector& v) { return v.allFinite(); }

}  // namespace

ScgResult scg_minimize(const Objective& objective, Vector x0, const ScgOptions& options,
                       const ScgCallback& callback) {
  ScgResult out;
  Vector x = std::move(x0);
  const auto n = x.size();

  Vector grad_new(n);
  double f_old = objective(x, &grad_new);
  ++out.evaluations;
  if (!std::isfinite(f_old) || !finite(grad_new)) {
    throw TrainingError("scg: objective is not finite at the starting point");
  }
  double f_now = f_old;
  Vector grad_old = grad_new;
  Vector d = -grad_new;
  Vector grad_plus(n);

  bool success = true;
  Eigen::Index n_success = 0;
  double lambda = options.lambda0;
  double mu = 0.0, kappa = 0.0, theta = 0.0;

  auto finish = [&](bool converged, const char* reason) {
    out.x = x;
    out.f = f_now;
    out.converged = converged;
    out.stop_reason = reason;
    return out;
  };

  if (grad_new.squaredNorm() == 0.0) return finish(true, "zero gradient");

  for (std::size_t cycle = 1; cycle <= options.max_cycles; ++cycle) {
    if (success) {
      mu = d.dot(grad_new);
      if (mu >= 0.0) {
        d = -grad_new;
        mu = d.dot(grad_new);
      }
      kappa = d.squaredNorm();
      if (kappa < std::numeric_limits<double>::min()) {
        return finish(true, "search direction vanished");
      }
      const double sigma = options.sigma0 / std::sqrt(kappa);
      objective(x + sigma * d, &grad_plus);
      ++out.evaluations;
      theta = d.dot(grad_plus - grad_new) / sigma;
      if (!std::isfinite(theta)) throw TrainingError("scg: non-finite curvature estimate");
    }

    // Scale the curvature so the quadratic model is positive definite.
    double delta = theta + lambda * kappa;
    if (delta <= 0.0) {
      delta = lambda * kappa;
      lambda = lambda - theta / kappa;
    }
    const double step = -mu / delta;
    const Vector x_new = x + step * d;
    const double f_new = objective(x_new, nullptr);
    ++out.evaluations;

    // Comparison of actual and predicted reduction.
    const double ratio = std::isfinite(f_new) ? 2.0 * (f_new - f_old) / (step * mu) : -1.0;
    if (ratio >= 0.0) {
      success = true;
      ++n_success;
      x = x_new;
      f_now = f_new;
    } else {
      success = false;
      f_now = f_old;
    }
    out.cycles = cycle;

    if (success) {
      if ((step * d).cwiseAbs().maxCoeff() < options.tol_x &&
          std::abs(f_new - f_old) < options.tol_f) {
        if (callback) callback(cycle, x, f_now);
        return finish(true, "step and change below tolerance");
      }
      f_old = f_new;
      grad_old = grad_new;
      objective(x, &grad_new);
      ++out.evaluations;
      if (!finite(grad_new)) throw TrainingError("scg: non-finite gradient");
      if (grad_new.squaredNorm() == 0.0) {
        if (callback) callback(cycle, x, f_now);
        return finish(true, "zero gradient");
      }
    }

    if (ratio < 0.25) lambda = std::min(4.0 * lambda, kLambdaMax);
    if (ratio > 0.75) lambda = std::max(0.5 * lambda, kLambdaMin);

    if (n_success == n) {
      d = -grad_new;
      n_success = 0;
    } else if (success) {
      const double gamma = (grad_old - grad_new).dot(grad_new) / mu;
      d = gamma * d - grad_new;
    }

    if (callback && !callback(cycle, x, f_now)) return finish(false, "stopped by callback");
  }
  return finish(false, "cycle limit reached");
}

}  // namespace steamreg
