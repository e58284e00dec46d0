#include "steamreg/lssvm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "steamreg/errors.hpp"

namespace steamreg {
namespace {

double kernel_value(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j,
                    KernelKind kind, double sigma2) {
  if (kind == KernelKind::linear) return a.row(i).dot(b.row(j));
  return std::exp(-(a.row(i) - b.row(j)).squaredNorm() / (2.0 * sigma2));
}

void check_sigma2(KernelKind kind, double sigma2) {
  if (kind == KernelKind::gaussian && !(sigma2 > 0.0)) {
    throw InvalidArgument("gaussian kernel: sigma^2 must be positive");
  }
}

}  // namespace

std::string_view kernel_name(KernelKind kind) {
  return kind == KernelKind::gaussian ? "gaussian" : "linear";
}

KernelKind parse_kernel(std::string_view name) {
  if (name == "gaussian") return KernelKind::gaussian;
  if (name == "linear") return KernelKind::linear;
  throw InvalidArgument("unknown kernel '" + std::string(name) + "'");
}

double gaussian_kernel(const Vector& x, const Vector& y, double sigma2) {
  check_sigma2(KernelKind::gaussian, sigma2);
  if (x.size() != y.size()) throw DimensionError("gaussian_kernel: dimension mismatch");
  return std::exp(-(x - y).squaredNorm() / (2.0 * sigma2));
}

Matrix kernel_matrix(const Matrix& a, const Matrix& b, KernelKind kind, double sigma2, Exec exec) {
  check_sigma2(kind, sigma2);
  if (a.cols() != b.cols()) throw DimensionError("kernel_matrix: dimension mismatch");
  Matrix k(a.rows(), b.rows());
  if (exec == Exec::serial) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = kernel_value(a, i, b, j, kind, sigma2);
    }
    return k;
  }
  const auto rows = static_cast<std::size_t>(a.rows());
  const std::size_t blocks = block_count(rows);
#pragma omp parallel for schedule(static)
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const std::size_t end = std::min(rows, (blk + 1) * kBlockRows);
    for (std::size_t r = blk * kBlockRows; r < end; ++r) {
      const auto i = static_cast<Eigen::Index>(r);
      for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = kernel_value(a, i, b, j, kind, sigma2);
    }
  }
  return k;
}

LsSvmSystem lssvm_system(const Matrix& inputs, const Vector& targets, double c, double sigma2,
                         KernelKind kind, Exec exec) {
  if (inputs.rows() < 1) throw InvalidArgument("lssvm: at least one training point is required");
  if (targets.size() != inputs.rows()) throw DimensionError("lssvm: target count mismatch");
  if (!(c > 0.0)) throw InvalidArgument("lssvm: C must be positive");
  const Eigen::Index n = inputs.rows();
  LsSvmSystem sys;
  sys.lhs.resize(n + 1, n + 1);
  sys.lhs(0, 0) = 0.0;
  sys.lhs.row(0).tail(n).setOnes();
  sys.lhs.col(0).tail(n).setOnes();
  sys.lhs.bottomRightCorner(n, n) = kernel_matrix(inputs, inputs, kind, sigma2, exec);
  sys.lhs.bottomRightCorner(n, n).diagonal().array() += 1.0 / c;
  sys.rhs.resize(n + 1);
  sys.rhs[0] = 0.0;
  sys.rhs.tail(n) = targets;
  return sys;
}

LsSvmModel lssvm_train(const Matrix& inputs, const Vector& targets, double c, double sigma2,
                       KernelKind kind, Exec exec) {
  const LsSvmSystem sys = lssvm_system(inputs, targets, c, sigma2, kind, exec);
  const Vector sol = solve_linear(sys.lhs, sys.rhs);
  if (!sol.allFinite()) throw TrainingError("lssvm: non-finite solution");
  LsSvmModel m;
  m.support = inputs;
  m.bias = sol[0];
  m.coef = sol.tail(inputs.rows());
  m.kernel = kind;
  m.sigma2 = sigma2;
  m.c = c;
  return m;
}

double lssvm_predict(const LsSvmModel& model, const Vector& x) {
  if (x.size() != model.support.cols()) throw DimensionError("lssvm_predict: dimension mismatch");
  const Matrix row = x.transpose();
  double f = model.bias;
  for (Eigen::Index i = 0; i < model.support.rows(); ++i) {
    f += model.coef[i] * kernel_value(row, 0, model.support, i, model.kernel, model.sigma2);
  }
  return f;
}

Vector lssvm_predict_batch(const LsSvmModel& model, const Matrix& inputs, Exec exec) {
  if (inputs.cols() != model.support.cols()) {
    throw DimensionError("lssvm_predict: dimension mismatch");
  }
  if (exec == Exec::serial) {
    Vector out(inputs.rows());
    for (Eigen::Index n = 0; n < inputs.rows(); ++n) out[n] = lssvm_predict(model, inputs.row(n).transpose());
    return out;
  }
  const Matrix k = kernel_matrix(inputs, model.support, model.kernel, model.sigma2, exec);
  return (k * model.coef).array() + model.bias;
}

double eps_insensitive_loss(double f, double t, double eps) {
  if (!(eps >= 0.0)) throw InvalidArgument("eps_insensitive_loss: eps must be non-negative");
  return std::max(std::abs(f - t) - eps, 0.0);
}

GridTuneResult grid_tune(const Matrix& train_x, const Vector& train_t, const Matrix& val_x,
                         const Vector& val_t, const std::vector<double>& sigma2_grid,
                         const std::vector<double>& c_grid, Exec exec) {
  if (sigma2_grid.empty() || c_grid.empty()) throw InvalidArgument("grid_tune: empty grid");
  if (val_x.rows() == 0) throw InvalidArgument("grid_tune: empty validation set");
  GridTuneResult out;
  out.c_grid = c_grid;
  out.sigma2_grid = sigma2_grid;
  out.validation_mse.resize(static_cast<Eigen::Index>(c_grid.size()),
                            static_cast<Eigen::Index>(sigma2_grid.size()));

  bool have_best = false;
  double best = 0.0;
  for (std::size_t ic = 0; ic < c_grid.size(); ++ic) {
    for (std::size_t is = 0; is < sigma2_grid.size(); ++is) {
      const LsSvmModel m = lssvm_train(train_x, train_t, c_grid[ic], sigma2_grid[is],
                                       KernelKind::gaussian, exec);
      const Vector pred = lssvm_predict_batch(m, val_x, exec);
      const double mse = (pred - val_t).squaredNorm() / static_cast<double>(val_t.size());
      out.validation_mse(static_cast<Eigen::Index>(ic), static_cast<Eigen::Index>(is)) = mse;

      bool better = !have_best || mse < best;
      if (have_best && mse == best) {
        better = c_grid[ic] < out.c || (c_grid[ic] == out.c && sigma2_grid[is] > out.sigma2);
      }
      if (better) {
        have_best = true;
        best = mse;
        out.c = c_grid[ic];
        out.sigma2 = sigma2_grid[is];
      }
    }
  }
  return out;
}

LsSvmMulti lssvm_train_multi(const Dataset& train, const std::vector<LsSvmParams>& params,
                             Exec exec) {
  if (params.size() != train.n_out()) {
    throw DimensionError("lssvm_train_multi: " + std::to_string(params.size()) +
                         " parameter sets for " + std::to_string(train.n_out()) + " outputs");
  }
  LsSvmMulti out;
  out.outputs.resize(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    out.outputs[k] = lssvm_train(train.inputs, train.targets.col(static_cast<Eigen::Index>(k)),
                                 params[k].c, params[k].sigma2, KernelKind::gaussian, exec);
  }
  return out;
}

Vector predict(const LsSvmMulti& model, const Vector& x) {
  Vector y(static_cast<Eigen::Index>(model.outputs.size()));
  for (std::size_t k = 0; k < model.outputs.size(); ++k) {
    y[static_cast<Eigen::Index>(k)] = lssvm_predict(model.outputs[k], x);
  }
  return y;
}

Matrix lssvm_predict_multi(const LsSvmMulti& model, const Matrix& inputs, Exec exec) {
  Matrix out(inputs.rows(), static_cast<Eigen::Index>(model.outputs.size()));
  for (std::size_t k = 0; k < model.outputs.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = lssvm_predict_batch(model.outputs[k], inputs, exec);
  }
  return out;
}

}  // namespace steamreg
