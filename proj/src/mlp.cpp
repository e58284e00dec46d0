#include "steamreg/mlp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "steamreg/errors.hpp"
#include "steamreg/rng.hpp"
#include "steamreg/scg.hpp"

namespace steamreg {
namespace {

struct Offsets {
  Eigen::Index w1, b1, w2, b2;
};

Offsets offsets(const MlpShape& s) {
  const auto in = static_cast<Eigen::Index>(s.n_in);
  const auto hid = static_cast<Eigen::Index>(s.n_hidden);
  const auto out = static_cast<Eigen::Index>(s.n_out);
  Offsets o{};
  o.w1 = 0;
  o.b1 = hid * in;
  o.w2 = o.b1 + hid;
  o.b2 = o.w2 + out * hid;
  return o;
}

void check_batch(const MlpShape& s, const Vector& params, const Matrix& x, const Matrix& t) {
  if (static_cast<std::size_t>(params.size()) != s.param_count()) {
    throw DimensionError("mlp: parameter vector has " + std::to_string(params.size()) +
                         " entries, expected " + std::to_string(s.param_count()));
  }
  if (static_cast<std::size_t>(x.cols()) != s.n_in ||
      static_cast<std::size_t>(t.cols()) != s.n_out || x.rows() != t.rows()) {
    throw DimensionError("mlp: batch shape does not match the network");
  }
}

// Reference path: one sample at a time, explicit loops.
double loss_gradient_serial(const MlpShape& s, const Vector& w, const Matrix& x, const Matrix& t,
                            Vector* grad) {
  const Offsets o = offsets(s);
  const auto in = static_cast<Eigen::Index>(s.n_in);
  const auto hid = static_cast<Eigen::Index>(s.n_hidden);
  const auto out = static_cast<Eigen::Index>(s.n_out);
  Vector h(hid), e(out), delta(hid);
  double sse = 0.0;
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    for (Eigen::Index j = 0; j < hid; ++j) {
      double a = w[o.b1 + j];
      for (Eigen::Index i = 0; i < in; ++i) a += w[o.w1 + j * in + i] * x(n, i);
      h[j] = std::tanh(a);
    }
    for (Eigen::Index k = 0; k < out; ++k) {
      double y = w[o.b2 + k];
      for (Eigen::Index j = 0; j < hid; ++j) y += w[o.w2 + k * hid + j] * h[j];
      e[k] = y - t(n, k);
      sse += e[k] * e[k];
    }
    if (!grad) continue;
    Vector& g = *grad;
    for (Eigen::Index k = 0; k < out; ++k) {
      for (Eigen::Index j = 0; j < hid; ++j) g[o.w2 + k * hid + j] += e[k] * h[j];
      g[o.b2 + k] += e[k];
    }
    for (Eigen::Index j = 0; j < hid; ++j) {
      double back = 0.0;
      for (Eigen::Index k = 0; k < out; ++k) back += w[o.w2 + k * hid + j] * e[k];
      delta[j] = (1.0 - h[j] * h[j]) * back;
      for (Eigen::Index i = 0; i < in; ++i) g[o.w1 + j * in + i] += delta[j] * x(n, i);
      g[o.b1 + j] += delta[j];
    }
  }
  return sse;
}

// One block of rows with dense matrix algebra.
double loss_gradient_block(const MlpModel::ConstMatrixMap& w1, const MlpModel::ConstVectorMap& b1,
                           const MlpModel::ConstMatrixMap& w2, const MlpModel::ConstVectorMap& b2,
                           const Offsets& o, const MlpShape& s, const Matrix& x, const Matrix& t,
                           Eigen::Index begin, Eigen::Index rows, Vector* grad) {
  const auto xb = x.middleRows(begin, rows);
  const auto tb = t.middleRows(begin, rows);
  const Matrix h = ((xb * w1.transpose()).rowwise() + b1.transpose()).array().tanh().matrix();
  const Matrix e = ((h * w2.transpose()).rowwise() + b2.transpose()) - tb;
  const double sse = e.squaredNorm();
  if (grad) {
    Vector& g = *grad;
    const auto in = static_cast<Eigen::Index>(s.n_in);
    const auto hid = static_cast<Eigen::Index>(s.n_hidden);
    const auto out = static_cast<Eigen::Index>(s.n_out);
    const Matrix delta = ((e * w2).array() * (1.0 - h.array().square())).matrix();
    Eigen::Map<Matrix>(g.data() + o.w2, out, hid) += e.transpose() * h;
    g.segment(o.b2, out) += e.colwise().sum().transpose();
    Eigen::Map<Matrix>(g.data() + o.w1, hid, in) += delta.transpose() * xb;
    g.segment(o.b1, hid) += delta.colwise().sum().transpose();
  }
  return sse;
}

double loss_gradient_parallel(const MlpShape& s, const Vector& w, const Matrix& x, const Matrix& t,
                              Vector* grad) {
  MlpModel view(s);
  view.params = w;
  const MlpModel& cview = view;
  const Offsets o = offsets(s);
  const auto w1 = cview.w1();
  const auto b1 = cview.b1();
  const auto w2 = cview.w2();
  const auto b2 = cview.b2();

  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t blocks = block_count(n);
  std::vector<double> sse(blocks, 0.0);
  std::vector<Vector> partial(grad ? blocks : 0);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto begin = static_cast<Eigen::Index>(b * kBlockRows);
    const auto rows = static_cast<Eigen::Index>(std::min(kBlockRows, n - b * kBlockRows));
    Vector* g = nullptr;
    if (grad) {
      partial[b] = Vector::Zero(w.size());
      g = &partial[b];
    }
    sse[b] = loss_gradient_block(w1, b1, w2, b2, o, s, x, t, begin, rows, g);
  }
  double total = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    total += sse[b];
    if (grad) *grad += partial[b];
  }
  return total;
}

double mse_of(const MlpModel& model, const Dataset& data, Exec exec) {
  if (data.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto lg = mlp_loss_gradient(model.shape, model.params, data.inputs, data.targets, 0.0, 1.0,
                                    exec, false);
  return lg.sse / static_cast<double>(data.size());
}

}  // namespace

MlpModel::ConstMatrixMap MlpModel::w1() const {
  return {params.data() + offsets(shape).w1, static_cast<Eigen::Index>(shape.n_hidden),
          static_cast<Eigen::Index>(shape.n_in)};
}
MlpModel::ConstVectorMap MlpModel::b1() const {
  return {params.data() + offsets(shape).b1, static_cast<Eigen::Index>(shape.n_hidden)};
}
MlpModel::ConstMatrixMap MlpModel::w2() const {
  return {params.data() + offsets(shape).w2, static_cast<Eigen::Index>(shape.n_out),
          static_cast<Eigen::Index>(shape.n_hidden)};
}
MlpModel::ConstVectorMap MlpModel::b2() const {
  return {params.data() + offsets(shape).b2, static_cast<Eigen::Index>(shape.n_out)};
}
MlpModel::MatrixMap MlpModel::w1() {
  return {params.data() + offsets(shape).w1, static_cast<Eigen::Index>(shape.n_hidden),
          static_cast<Eigen::Index>(shape.n_in)};
}
MlpModel::VectorMap MlpModel::b1() {
  return {params.data() + offsets(shape).b1, static_cast<Eigen::Index>(shape.n_hidden)};
}
MlpModel::MatrixMap MlpModel::w2() {
  return {params.data() + offsets(shape).w2, static_cast<Eigen::Index>(shape.n_out),
          static_cast<Eigen::Index>(shape.n_hidden)};
}
MlpModel::VectorMap MlpModel::b2() {
  return {params.data() + offsets(shape).b2, static_cast<Eigen::Index>(shape.n_out)};
}

MlpModel mlp_init(const MlpShape& shape, RngStream& rng) {
  if (shape.n_in == 0 || shape.n_hidden == 0 || shape.n_out == 0) {
    throw InvalidArgument("mlp_init: layer sizes must be at least 1");
  }
  MlpModel m(shape);
  // Uniform with standard deviation 1/sqrt(fan-in), fan-in counting the bias.
  const double a1 = std::sqrt(3.0 / static_cast<double>(shape.n_in + 1));
  const double a2 = std::sqrt(3.0 / static_cast<double>(shape.n_hidden + 1));
  const Offsets o = offsets(shape);
  for (Eigen::Index i = 0; i < m.params.size(); ++i) {
    const double a = i < o.w2 ? a1 : a2;
    m.params[i] = rng.uniform(-a, a);
  }
  return m;
}

Vector mlp_forward(const MlpModel& model, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != model.shape.n_in) {
    throw DimensionError("mlp_forward: input has " + std::to_string(x.size()) +
                         " entries, expected " + std::to_string(model.shape.n_in));
  }
  const Vector h = (model.w1() * x + model.b1()).array().tanh().matrix();
  return model.w2() * h + model.b2();
}

Matrix mlp_predict(const MlpModel& model, const Matrix& inputs, Exec exec) {
  if (static_cast<std::size_t>(inputs.cols()) != model.shape.n_in) {
    throw DimensionError("mlp_predict: input width does not match the network");
  }
  Matrix out(inputs.rows(), static_cast<Eigen::Index>(model.shape.n_out));
  if (exec == Exec::serial) {
    for (Eigen::Index n = 0; n < inputs.rows(); ++n) {
      out.row(n) = mlp_forward(model, inputs.row(n).transpose()).transpose();
    }
    return out;
  }
  const auto n = static_cast<std::size_t>(inputs.rows());
  const std::size_t blocks = block_count(n);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto begin = static_cast<Eigen::Index>(b * kBlockRows);
    const auto rows = static_cast<Eigen::Index>(std::min(kBlockRows, n - b * kBlockRows));
    const Matrix h = ((inputs.middleRows(begin, rows) * model.w1().transpose()).rowwise() +
                      model.b1().transpose())
                         .array()
                         .tanh()
                         .matrix();
    out.middleRows(begin, rows) = (h * model.w2().transpose()).rowwise() + model.b2().transpose();
  }
  return out;
}

LossGradient mlp_loss_gradient(const MlpShape& shape, const Vector& params, const Matrix& inputs,
                               const Matrix& targets, double alpha, double beta, Exec exec,
                               bool with_gradient) {
  check_batch(shape, params, inputs, targets);
  LossGradient out;
  Vector data_grad;
  Vector* g = nullptr;
  if (with_gradient) {
    data_grad = Vector::Zero(params.size());
    g = &data_grad;
  }
  out.sse = exec == Exec::serial ? loss_gradient_serial(shape, params, inputs, targets, g)
                                 : loss_gradient_parallel(shape, params, inputs, targets, g);
  out.loss = 0.5 * beta * out.sse + 0.5 * alpha * params.squaredNorm();
  if (with_gradient) out.gradient = beta * data_grad + alpha * params;
  return out;
}

double mlp_loss(const MlpModel& model, const Dataset& batch, double alpha) {
  if (batch.empty()) throw InvalidArgument("mlp_loss: empty batch");
  return mlp_loss_gradient(model.shape, model.params, batch.inputs, batch.targets, alpha, 1.0,
                           Exec::parallel, false)
      .loss;
}

Vector mlp_gradient(const MlpModel& model, const Dataset& batch, double alpha) {
  if (batch.empty()) throw InvalidArgument("mlp_gradient: empty batch");
  return mlp_loss_gradient(model.shape, model.params, batch.inputs, batch.targets, alpha, 1.0,
                           Exec::parallel, true)
      .gradient;
}

MlpTrainResult train_scg(const MlpModel& model, const Dataset& train, const Dataset& validation,
                         const TrainConfig& config) {
  if (config.max_cycles < 1) throw InvalidArgument("train_scg: max_cycles must be at least 1");
  if (config.eval_every < 1) throw InvalidArgument("train_scg: eval_every must be at least 1");
  if (!(config.weight_decay >= 0.0)) {
    throw InvalidArgument("train_scg: weight decay must be non-negative");
  }
  if (train.empty()) throw InvalidArgument("train_scg: empty training set");

  const MlpShape shape = model.shape;
  const Objective objective = [&](const Vector& w, Vector* grad) {
    auto lg = mlp_loss_gradient(shape, w, train.inputs, train.targets, config.weight_decay, 1.0,
                                config.exec, grad != nullptr);
    if (grad) *grad = std::move(lg.gradient);
    return lg.loss;
  };

  MlpTrainResult result;
  result.model = model;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t evals_since_best = 0;
  const bool has_validation = !validation.empty();

  auto evaluate = [&](std::size_t cycle, const Vector& w) {
    MlpModel current(shape);
    current.params = w;
    HistoryPoint p;
    p.cycle = cycle;
    p.train_mse = mse_of(current, train, config.exec);
    p.validation_mse = has_validation ? mse_of(current, validation, config.exec) : p.train_mse;
    if (!std::isfinite(p.train_mse)) {
      throw TrainingError("train_scg: non-finite training error at cycle " +
                          std::to_string(cycle));
    }
    result.history.push_back(p);
    if (p.validation_mse < best_val) {
      best_val = p.validation_mse;
      result.model = std::move(current);
      result.best_cycle = cycle;
      evals_since_best = 0;
    } else {
      ++evals_since_best;
    }
    return has_validation && evals_since_best >= config.patience;
  };

  ScgOptions options;
  options.max_cycles = config.max_cycles;
  std::size_t last_eval = 0;
  const ScgCallback callback = [&](std::size_t cycle, const Vector& w, double) {
    result.cycles_run = cycle;
    if (cycle % config.eval_every != 0 && cycle != config.max_cycles) return true;
    last_eval = cycle;
    if (evaluate(cycle, w)) {
      result.early_stopped = true;
      return false;
    }
    return true;
  };

  const ScgResult scg = scg_minimize(objective, model.params, options, callback);
  result.cycles_run = scg.cycles;
  // The final point is always scored so the checkpoint never loses to it.
  if (last_eval != scg.cycles || result.history.empty()) {
    if (!result.early_stopped) evaluate(scg.cycles, scg.x);
  }
  if (!has_validation) {
    result.model.params = scg.x;
    result.best_cycle = scg.cycles;
  }
  return result;
}

}  // namespace steamreg
