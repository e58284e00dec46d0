#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "steamreg/data.hpp"
#include "steamreg/exec.hpp"
#include "steamreg/numeric.hpp"

namespace steamreg {

class RngStream;

struct MlpShape {
  std::size_t n_in = 0;
  std::size_t n_hidden = 0;
  std::size_t n_out = 0;

  // n_hidden (n_in + 1) + n_out (n_hidden + 1)
  std::size_t param_count() const { return n_hidden * (n_in + 1) + n_out * (n_hidden + 1); }
  bool operator==(const MlpShape&) const = default;
};

// Two-layer perceptron, tanh hidden units and linear outputs. Parameters are
// stored flat: W1 (hidden x in, row-major), b1, W2 (out x hidden), b2.
struct MlpModel {
  static constexpr std::string_view hidden_activation = "tanh";
  static constexpr std::string_view output_activation = "linear";

  MlpShape shape;
  Vector params;

  MlpModel() = default;
  explicit MlpModel(const MlpShape& s) : shape(s), params(Vector::Zero(static_cast<Eigen::Index>(s.param_count()))) {}

  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;

  ConstMatrixMap w1() const;
  ConstVectorMap b1() const;
  ConstMatrixMap w2() const;
  ConstVectorMap b2() const;
  MatrixMap w1();
  VectorMap b1();
  MatrixMap w2();
  VectorMap b2();
};

MlpModel mlp_init(const MlpShape& shape, RngStream& rng);

Vector mlp_forward(const MlpModel& model, const Vector& x);
Matrix mlp_predict(const MlpModel& model, const Matrix& inputs, Exec exec = Exec::parallel);
inline Vector predict(const MlpModel& model, const Vector& x) { return mlp_forward(model, x); }

struct LossGradient {
  double loss = 0.0;
  double sse = 0.0;  // sum over samples and outputs of squared error
  Vector gradient;
};

// beta/2 * SSE + alpha/2 * ||w||^2 and, when requested, its gradient by
// reverse-mode differentiation.
LossGradient mlp_loss_gradient(const MlpShape& shape, const Vector& params, const Matrix& inputs,
                               const Matrix& targets, double alpha, double beta, Exec exec,
                               bool with_gradient = true);

double mlp_loss(const MlpModel& model, const Dataset& batch, double alpha);
Vector mlp_gradient(const MlpModel& model, const Dataset& batch, double alpha);

struct TrainConfig {
  std::size_t max_cycles = 240;
  double weight_decay = 0.01;
  std::size_t patience = 50;  // evaluations without improvement
  std::size_t eval_every = 1;
  Exec exec = Exec::parallel;
};

struct HistoryPoint {
  std::size_t cycle = 0;
  double train_mse = 0.0;
  double validation_mse = 0.0;
};

struct MlpTrainResult {
  MlpModel model;  // best-validation checkpoint
  std::vector<HistoryPoint> history;
  std::size_t best_cycle = 0;
  std::size_t cycles_run = 0;
  bool early_stopped = false;
};

// Full-batch SCG with early stopping on the validation set. With an empty
// validation set the final model is returned.
MlpTrainResult train_scg(const MlpModel& model, const Dataset& train, const Dataset& validation,
                         const TrainConfig& config);

}  // namespace steamreg
