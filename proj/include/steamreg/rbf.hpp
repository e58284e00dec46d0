#pragma once

#include <cstddef>
#include <vector>

#include "steamreg/data.hpp"
#include "steamreg/exec.hpp"
#include "steamreg/numeric.hpp"

namespace steamreg {

class RngStream;

inline constexpr double kMinRbfWidth = 1e-6;

// Gaussian radial basis network:
//   y_k = bias_k + sum_j weights(k, j) * exp(-||x - c_j||^2 / (2 width_j^2))
struct RbfModel {
  Matrix centers;  // M x n_in
  Vector widths;   // M
  Matrix weights;  // n_out x M
  Vector bias;     // n_out

  std::size_t hidden() const { return static_cast<std::size_t>(centers.rows()); }
  std::size_t n_in() const { return static_cast<std::size_t>(centers.cols()); }
  std::size_t n_out() const { return static_cast<std::size_t>(weights.rows()); }
  // centers + widths + output weights + biases
  std::size_t param_count() const {
    return hidden() * n_in() + hidden() + n_out() * hidden() + n_out();
  }
};

double rbf_activation(const Vector& x, const Vector& center, double width);

Vector rbf_forward(const RbfModel& model, const Vector& x);
Matrix rbf_predict(const RbfModel& model, const Matrix& inputs, Exec exec = Exec::parallel);
inline Vector predict(const RbfModel& model, const Vector& x) { return rbf_forward(model, x); }

// Rows [1, phi_1(x), ..., phi_M(x)].
Matrix rbf_design_matrix(const Matrix& centers, const Vector& widths, const Matrix& inputs,
                         Exec exec = Exec::parallel);

// Mean distance from each center to its two nearest other centers, floored
// at kMinRbfWidth. A lone center uses the RMS distance of `inputs` to it.
Vector rbf_widths(const Matrix& centers, const Matrix& inputs);

struct RbfFitResult {
  RbfModel model;
  bool ridge_fallback = false;
};

// Stage two only: output weights and biases by linear least squares with
// the centers and widths held fixed.
RbfFitResult rbf_fit_output_layer(const Matrix& centers, const Vector& widths,
                                  const Dataset& train, Exec exec = Exec::parallel);

struct RbfTrainOptions {
  std::size_t kmeans_iters = 150;
  Exec exec = Exec::parallel;
};

struct RbfTrainResult {
  RbfModel model;
  bool ridge_fallback = false;
  std::vector<double> kmeans_sse;
};

RbfTrainResult rbf_train_two_stage(const Dataset& train, std::size_t hidden, RngStream& rng,
                                   const RbfTrainOptions& options = {});

}  // namespace steamreg
