#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "steamreg/numeric.hpp"

namespace steamreg {

enum class RmseMode {
  per_output,  // sqrt(total / m)
  total,       // sqrt(total)
};

struct EvalReport {
  double total_mse = 0.0;
  std::vector<double> per_output_mse;
  double rmse = 0.0;
  std::size_t samples = 0;
  double train_seconds = 0.0;
  double execute_seconds = 0.0;
};

// total = (1/R) sum_k ||t(k) - y(k)||^2, split exactly into per-output terms.
EvalReport mse(const Matrix& predictions, const Matrix& targets,
               RmseMode mode = RmseMode::per_output);

// Single-output models acting together: totals add, per-output entries are
// concatenated in order.
EvalReport aggregate_single_output_models(const std::vector<EvalReport>& reports,
                                          std::size_t expected_outputs,
                                          RmseMode mode = RmseMode::per_output);

// MSE of predicting the training-target mean for every row of `targets`.
EvalReport mean_predictor_baseline(const Matrix& train_targets, const Matrix& targets);

// Plain-text table, one row per method: total MSE, per-output MSE, timings.
std::string render_table(const std::vector<std::pair<std::string, EvalReport>>& rows);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace steamreg
