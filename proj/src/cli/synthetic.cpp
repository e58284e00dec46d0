#include "steamreg/cli/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "steamreg/rng.hpp"

namespace steamreg::cli {
namespace {

constexpr double kOutLo[4] = {250.0, 1.0, -1.0, 5.0};
constexpr double kOutSpan[4] = {100.0, 5.0, 2.0, 20.0};

void unit_targets(const double* x, double* g) {
  const double u1 = x[0], u2 = x[1], u3 = (x[2] - 10.0) / 20.0, u4 = x[3] / 10.0;
  g[0] = 0.15 + 0.5 * u1 + 0.2 * u1 * (1.0 - u4) + 0.15 * std::sin(std::numbers::pi * u2);
  g[1] = 0.5 + 0.4 * std::tanh(3.0 * (u2 - u1)) + 0.05 * u4;
  g[2] = 0.5 + 0.25 * (2.0 * u3 - 1.0) + 0.4 * std::exp(-4.0 * (u1 - u4) * (u1 - u4)) * (u2 - 0.5);
  g[3] = 0.1 + 0.6 * u1 * (0.5 + 0.5 * u2) + 0.3 * u4 * u4;
}

}  // namespace

Matrix synthetic_targets(const Matrix& inputs) {
  if (inputs.cols() != 4) throw DimensionError("synthetic_targets: expected 4 input columns");
  Matrix out(inputs.rows(), 4);
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    double g[4];
    unit_targets(inputs.row(i).data(), g);
    for (int k = 0; k < 4; ++k) out(i, k) = kOutLo[k] + kOutSpan[k] * g[k];
  }
  return out;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.count < 10) throw InvalidArgument("synthetic: count must be at least 10");
  if (!(spec.noise >= 0.0)) throw InvalidArgument("synthetic: noise must be non-negative");
  RngStream rng(spec.seed);
  Dataset d;
  d.columns = plant_column_names();
  const auto n = static_cast<Eigen::Index>(spec.count);
  d.inputs.resize(n, 4);
  d.targets.resize(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.inputs(i, 0) = rng.uniform();
    d.inputs(i, 1) = rng.uniform();
    d.inputs(i, 2) = rng.uniform(10.0, 30.0);
    d.inputs(i, 3) = rng.uniform(0.0, 10.0);
    double g[4];
    unit_targets(d.inputs.row(i).data(), g);
    for (int k = 0; k < 4; ++k) {
      // Drawn even at zero noise so the inputs do not depend on it.
      const double e = rng.normal();
      d.targets(i, k) = kOutLo[k] + kOutSpan[k] * (g[k] + spec.noise * e);
    }
  }
  return d;
}

}  // namespace steamreg::cli
