#include "steamreg/anfis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "steamreg/errors.hpp"

namespace steamreg {
namespace {

// Per-sample layer outputs.
struct Layers {
  std::vector<double> mu;      // membership degrees, mfs order
  std::vector<double> firing;  // rule strengths
  double total = 0.0;
};

void compute_layers(const AnfisModel& m, const double* x, Layers& out) {
  const std::size_t rules = m.rule_count();
  out.mu.resize(m.mfs.size());
  out.firing.assign(rules, 1.0);
  for (std::size_t k = 0; k < m.mfs.size(); ++k) {
    out.mu[k] = membership_eval(m.mfs[k], x[m.mfs[k].input]);
  }
  out.total = 0.0;
  for (std::size_t r = 0; r < rules; ++r) {
    double w = 1.0;
    for (std::size_t i = 0; i < m.n_in; ++i) w *= out.mu[i * m.mfs_per_input + m.term(r, i)];
    out.firing[r] = w;
    out.total += w;
  }
  if (!(out.total > 0.0)) throw NoFiringError("input outside all membership supports");
}

double rule_output(const AnfisModel& m, std::size_t r, const double* x) {
  double z = m.consequents(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m.n_in));
  for (std::size_t i = 0; i < m.n_in; ++i) {
    z += m.consequents(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) * x[i];
  }
  return z;
}

std::vector<double> row_of(const Matrix& x, Eigen::Index n) {
  return std::vector<double>(x.row(n).begin(), x.row(n).end());
}

void check_inputs(const AnfisModel& m, const Matrix& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != m.n_in) {
    throw DimensionError("anfis: input has " + std::to_string(inputs.cols()) +
                         " columns, expected " + std::to_string(m.n_in));
  }
}

// Accumulates d SSE / d premise for rows [begin, end).
double premise_gradient_rows(const AnfisModel& m, const Matrix& inputs, const Vector& targets,
                             Eigen::Index begin, Eigen::Index end,
                             const std::vector<std::size_t>& offsets, Vector& grad) {
  const std::size_t rules = m.rule_count();
  Layers layers;
  std::vector<double> z(rules);
  std::vector<double> dy_dmu(m.mfs.size());
  double sse = 0.0;
  for (Eigen::Index n = begin; n < end; ++n) {
    const auto x = row_of(inputs, n);
    compute_layers(m, x.data(), layers);
    double y = 0.0;
    for (std::size_t r = 0; r < rules; ++r) {
      z[r] = rule_output(m, r, x.data());
      y += layers.firing[r] * z[r];
    }
    y /= layers.total;
    const double e = y - targets[n];
    sse += e * e;

    std::fill(dy_dmu.begin(), dy_dmu.end(), 0.0);
    for (std::size_t r = 0; r < rules; ++r) {
      const double dy_dw = (z[r] - y) / layers.total;
      for (std::size_t i = 0; i < m.n_in; ++i) {
        double others = 1.0;
        for (std::size_t l = 0; l < m.n_in; ++l) {
          if (l != i) others *= layers.mu[l * m.mfs_per_input + m.term(r, l)];
        }
        dy_dmu[i * m.mfs_per_input + m.term(r, i)] += dy_dw * others;
      }
    }
    for (std::size_t k = 0; k < m.mfs.size(); ++k) {
      if (dy_dmu[k] == 0.0) continue;
      const auto g = membership_param_grad(m.mfs[k], x[m.mfs[k].input]);
      for (std::size_t q = 0; q < g.size(); ++q) {
        grad[static_cast<Eigen::Index>(offsets[k] + q)] += 2.0 * e * dy_dmu[k] * g[q];
      }
    }
  }
  return sse;
}

std::vector<std::size_t> param_offsets(const AnfisModel& m) {
  std::vector<std::size_t> off(m.mfs.size() + 1, 0);
  for (std::size_t k = 0; k < m.mfs.size(); ++k) off[k + 1] = off[k] + m.mfs[k].params.size();
  return off;
}

double rmse(const Vector& pred, const Vector& t) {
  return std::sqrt((pred - t).squaredNorm() / static_cast<double>(t.size()));
}

// Width h of a sigmoid bump centred at c0 such that it evaluates to 0.5 at
// the midpoint to its neighbour, spacing d away.
MembershipFunction sigmoid_bump(MfFamily family, double c0, double d) {
  const double slope = 8.0 / d;
  auto make = [&](double h) {
    MembershipFunction mf;
    mf.family = family;
    if (family == MfFamily::sigmoid_difference) {
      mf.params = {slope, c0 - h, slope, c0 + h};
    } else {
      mf.params = {slope, c0 - h, -slope, c0 + h};
    }
    return mf;
  };
  double lo = 0.5 * d, hi = 2.0 * d;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (membership_eval(make(mid), c0 + 0.5 * d) < 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return make(hi);
}

MembershipFunction grid_mf(MfFamily family, double c0, double d) {
  MembershipFunction mf;
  mf.family = family;
  switch (family) {
    case MfFamily::gaussian: mf.params = {c0, 0.5 * d / std::sqrt(2.0 * std::log(2.0))}; break;
    case MfFamily::bell: mf.params = {0.5 * d, 2.0, c0}; break;
    case MfFamily::triangular: mf.params = {c0 - d, c0, c0 + d}; break;
    case MfFamily::trapezoidal:
    case MfFamily::pi_curve:
      mf.params = {c0 - 0.75 * d, c0 - 0.25 * d, c0 + 0.25 * d, c0 + 0.75 * d};
      break;
    case MfFamily::sigmoid_difference:
    case MfFamily::sigmoid_product: mf = sigmoid_bump(family, c0, d); break;
  }
  return mf;
}

}  // namespace

std::size_t AnfisModel::rule_count() const {
  std::size_t r = 1;
  for (std::size_t i = 0; i < n_in; ++i) r *= mfs_per_input;
  return r;
}

std::size_t AnfisModel::term(std::size_t rule, std::size_t input) const {
  for (std::size_t i = n_in - 1; i > input; --i) rule /= mfs_per_input;
  return rule % mfs_per_input;
}

std::size_t AnfisModel::premise_param_count() const {
  std::size_t n = 0;
  for (const auto& mf : mfs) n += mf.params.size();
  return n;
}

AnfisModel anfis_init_grid(const Matrix& inputs, std::size_t mfs_per_input, MfFamily family) {
  if (inputs.rows() == 0 || inputs.cols() == 0) throw InvalidArgument("anfis: empty input data");
  if (mfs_per_input == 0) throw InvalidArgument("anfis: at least one membership function per input");
  AnfisModel m;
  m.n_in = static_cast<std::size_t>(inputs.cols());
  m.mfs_per_input = mfs_per_input;
  for (std::size_t i = 0; i < m.n_in; ++i) {
    const double lo = inputs.col(static_cast<Eigen::Index>(i)).minCoeff();
    const double hi = inputs.col(static_cast<Eigen::Index>(i)).maxCoeff();
    const double range = std::max(hi - lo, 1e-6);
    const double spacing = mfs_per_input > 1 ? range / static_cast<double>(mfs_per_input - 1) : range;
    for (std::size_t j = 0; j < mfs_per_input; ++j) {
      const double c0 = mfs_per_input > 1 ? lo + spacing * static_cast<double>(j) : 0.5 * (lo + hi);
      MembershipFunction mf = grid_mf(family, c0, spacing);
      mf.input = i;
      m.mfs.push_back(std::move(mf));
    }
  }
  m.consequents = Matrix::Zero(static_cast<Eigen::Index>(m.rule_count()),
                               static_cast<Eigen::Index>(m.n_in + 1));
  return m;
}

double anfis_forward(const AnfisModel& model, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != model.n_in) {
    throw DimensionError("anfis_forward: input has " + std::to_string(x.size()) +
                         " entries, expected " + std::to_string(model.n_in));
  }
  Layers layers;
  compute_layers(model, x.data(), layers);
  double y = 0.0;
  for (std::size_t r = 0; r < model.rule_count(); ++r) {
    y += (layers.firing[r] / layers.total) * rule_output(model, r, x.data());
  }
  return y;
}

Vector anfis_forward_batch(const AnfisModel& model, const Matrix& inputs, Exec exec) {
  check_inputs(model, inputs);
  Vector out(inputs.rows());
  if (exec == Exec::serial) {
    for (Eigen::Index n = 0; n < inputs.rows(); ++n) out[n] = anfis_forward(model, inputs.row(n).transpose());
    return out;
  }
  const Matrix design = anfis_design_matrix(model, inputs, exec);
  const Eigen::Map<const Vector> coef(model.consequents.data(), model.consequents.size());
  return design * coef;
}

Matrix anfis_design_matrix(const AnfisModel& model, const Matrix& inputs, Exec exec) {
  check_inputs(model, inputs);
  const std::size_t rules = model.rule_count();
  const auto width = static_cast<Eigen::Index>(model.n_in + 1);
  Matrix design(inputs.rows(), static_cast<Eigen::Index>(rules) * width);

  auto fill_row = [&](Eigen::Index n, Layers& layers) {
    const auto x = row_of(inputs, n);
    compute_layers(model, x.data(), layers);
    for (std::size_t r = 0; r < rules; ++r) {
      const double wn = layers.firing[r] / layers.total;
      const auto base = static_cast<Eigen::Index>(r) * width;
      for (std::size_t i = 0; i < model.n_in; ++i) {
        design(n, base + static_cast<Eigen::Index>(i)) = wn * x[i];
      }
      design(n, base + width - 1) = wn;
    }
  };

  if (exec == Exec::serial) {
    Layers layers;
    for (Eigen::Index n = 0; n < inputs.rows(); ++n) fill_row(n, layers);
    return design;
  }
  const auto rows = static_cast<std::size_t>(inputs.rows());
  const std::size_t blocks = block_count(rows);
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    try {
      Layers layers;
      const std::size_t end = std::min(rows, (b + 1) * kBlockRows);
      for (std::size_t i = b * kBlockRows; i < end; ++i) fill_row(static_cast<Eigen::Index>(i), layers);
    } catch (...) {
#pragma omp critical(steamreg_anfis_design)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return design;
}

AnfisUpdate anfis_lse_consequents(const AnfisModel& model, const Matrix& inputs,
                                  const Vector& targets, Exec exec) {
  if (inputs.rows() == 0) throw InvalidArgument("anfis_lse_consequents: empty batch");
  if (targets.size() != inputs.rows()) throw DimensionError("anfis: target count mismatch");
  const Matrix design = anfis_design_matrix(model, inputs, exec);
  const LeastSquaresResult ls = least_squares(design, targets);
  AnfisUpdate out{model, ls.ridge_fallback, false};
  const auto width = static_cast<Eigen::Index>(model.n_in + 1);
  for (Eigen::Index r = 0; r < out.model.consequents.rows(); ++r) {
    out.model.consequents.row(r) = ls.weights.col(0).segment(r * width, width).transpose();
  }
  return out;
}

Vector anfis_premise_gradient(const AnfisModel& model, const Matrix& inputs,
                              const Vector& targets, Exec exec) {
  check_inputs(model, inputs);
  if (targets.size() != inputs.rows()) throw DimensionError("anfis: target count mismatch");
  const auto offsets = param_offsets(model);
  const auto p = static_cast<Eigen::Index>(offsets.back());
  Vector grad = Vector::Zero(p);
  if (exec == Exec::serial) {
    premise_gradient_rows(model, inputs, targets, 0, inputs.rows(), offsets, grad);
    return grad;
  }
  const auto rows = static_cast<std::size_t>(inputs.rows());
  const std::size_t blocks = block_count(rows);
  std::vector<Vector> partial(blocks);
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    try {
      partial[b] = Vector::Zero(p);
      const auto begin = static_cast<Eigen::Index>(b * kBlockRows);
      const auto end = static_cast<Eigen::Index>(std::min(rows, (b + 1) * kBlockRows));
      premise_gradient_rows(model, inputs, targets, begin, end, offsets, partial[b]);
    } catch (...) {
#pragma omp critical(steamreg_anfis_grad)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  for (const auto& g : partial) grad += g;
  return grad;
}

std::vector<double> anfis_premise_params(const AnfisModel& model) {
  std::vector<double> out;
  for (const auto& mf : model.mfs) out.insert(out.end(), mf.params.begin(), mf.params.end());
  return out;
}

void anfis_set_premise_params(AnfisModel& model, std::span<const double> params) {
  if (params.size() != model.premise_param_count()) {
    throw DimensionError("anfis: premise parameter count mismatch");
  }
  std::size_t k = 0;
  for (auto& mf : model.mfs) {
    for (double& v : mf.params) v = params[k++];
  }
}

namespace {

AnfisUpdate premise_step(const AnfisModel& model, const Vector& grad, double learning_rate) {
  AnfisUpdate out{model, false, false};
  auto params = anfis_premise_params(model);
  for (std::size_t k = 0; k < params.size(); ++k) {
    params[k] -= learning_rate * grad[static_cast<Eigen::Index>(k)];
  }
  anfis_set_premise_params(out.model, params);
  for (auto& mf : out.model.mfs) out.clamped = membership_clamp(mf) || out.clamped;
  return out;
}

}  // namespace

AnfisUpdate anfis_backprop_premise(const AnfisModel& model, const Matrix& inputs,
                                   const Vector& targets, double learning_rate, Exec exec) {
  if (!(learning_rate >= 0.0)) throw InvalidArgument("anfis: learning rate must be non-negative");
  if (learning_rate == 0.0) return AnfisUpdate{model, false, false};
  return premise_step(model, anfis_premise_gradient(model, inputs, targets, exec), learning_rate);
}

AnfisTrainResult anfis_train_hybrid(const AnfisModel& model, const Matrix& train_x,
                                    const Vector& train_t, const Matrix& val_x,
                                    const Vector& val_t, const AnfisTrainOptions& options) {
  AnfisTrainResult out;
  out.model = model;
  const bool has_validation = val_x.rows() > 0;
  double best = std::numeric_limits<double>::infinity();
  double step = options.step_size;
  AnfisModel current = model;
  std::vector<double> errors;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    AnfisUpdate lse = anfis_lse_consequents(current, train_x, train_t, options.exec);
    out.ridge_fallback = out.ridge_fallback || lse.ridge_fallback;
    current = std::move(lse.model);

    const double train_err = rmse(anfis_forward_batch(current, train_x, options.exec), train_t);
    const double val_err =
        has_validation ? rmse(anfis_forward_batch(current, val_x, options.exec), val_t) : train_err;
    if (!std::isfinite(train_err)) {
      throw TrainingError("anfis: non-finite training error at epoch " + std::to_string(epoch));
    }
    out.train_rmse.push_back(train_err);
    out.validation_rmse.push_back(val_err);
    if (val_err < best) {
      best = val_err;
      out.model = current;
      out.best_epoch = epoch;
    }
    if (epoch == options.epochs) break;

    errors.push_back(train_err);
    const std::size_t k = errors.size();
    if (k >= 5 && errors[k - 5] > errors[k - 4] && errors[k - 4] > errors[k - 3] &&
        errors[k - 3] > errors[k - 2] && errors[k - 2] > errors[k - 1]) {
      step *= options.step_increase;
    } else if (k >= 5 && errors[k - 5] < errors[k - 4] && errors[k - 4] > errors[k - 3] &&
               errors[k - 3] < errors[k - 2] && errors[k - 2] > errors[k - 1]) {
      step *= options.step_decrease;
    }

    const Vector grad = anfis_premise_gradient(current, train_x, train_t, options.exec);
    const double norm = grad.norm();
    if (norm > 0.0 && std::isfinite(norm)) {
      AnfisUpdate bp = premise_step(current, grad, step / norm);
      out.clamped = out.clamped || bp.clamped;
      current = std::move(bp.model);
    }
  }
  return out;
}

Vector predict(const AnfisModel& model, const Vector& x) {
  return Vector::Constant(1, anfis_forward(model, x));
}

Vector predict(const AnfisMulti& model, const Vector& x) {
  Vector y(static_cast<Eigen::Index>(model.outputs.size()));
  for (std::size_t k = 0; k < model.outputs.size(); ++k) {
    y[static_cast<Eigen::Index>(k)] = anfis_forward(model.outputs[k], x);
  }
  return y;
}

Matrix anfis_predict_multi(const AnfisMulti& model, const Matrix& inputs, Exec exec) {
  Matrix out(inputs.rows(), static_cast<Eigen::Index>(model.outputs.size()));
  for (std::size_t k = 0; k < model.outputs.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = anfis_forward_batch(model.outputs[k], inputs, exec);
  }
  return out;
}

}  // namespace steamreg
