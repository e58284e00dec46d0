#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "steamreg/data.hpp"
#include "steamreg/exec.hpp"
#include "steamreg/numeric.hpp"

namespace steamreg {

enum class KernelKind { gaussian, linear };

std::string_view kernel_name(KernelKind kind);
KernelKind parse_kernel(std::string_view name);

// exp(-||x - y||^2 / (2 sigma2))
double gaussian_kernel(const Vector& x, const Vector& y, double sigma2);

// Gram matrix K(a_i, b_j). The linear kernel ignores sigma2.
Matrix kernel_matrix(const Matrix& a, const Matrix& b, KernelKind kind, double sigma2,
                     Exec exec = Exec::parallel);

// Least-squares SVR in dual form: f(x) = sum_i coef_i K(x, x_i) + bias.
struct LsSvmModel {
  Matrix support;  // training inputs, one per row
  Vector coef;     // dual coefficients a_i
  double bias = 0.0;
  KernelKind kernel = KernelKind::gaussian;
  double sigma2 = 1.0;
  double c = 1.0;  // regularisation constant
};

// The bordered (N+1) system [[0, 1^T], [1, K + I/C]] [b; a] = [0; t].
struct LsSvmSystem {
  Matrix lhs;
  Vector rhs;
};

LsSvmSystem lssvm_system(const Matrix& inputs, const Vector& targets, double c, double sigma2,
                         KernelKind kind = KernelKind::gaussian, Exec exec = Exec::parallel);

LsSvmModel lssvm_train(const Matrix& inputs, const Vector& targets, double c, double sigma2,
                       KernelKind kind = KernelKind::gaussian, Exec exec = Exec::parallel);

double lssvm_predict(const LsSvmModel& model, const Vector& x);
Vector lssvm_predict_batch(const LsSvmModel& model, const Matrix& inputs,
                           Exec exec = Exec::parallel);

// max(|f - t| - eps, 0)
double eps_insensitive_loss(double f, double t, double eps);

struct GridTuneResult {
  double c = 0.0;
  double sigma2 = 0.0;
  std::vector<double> c_grid;
  std::vector<double> sigma2_grid;
  Matrix validation_mse;  // rows follow c_grid, columns sigma2_grid
};

// Trains one model per (C, sigma2) pair and keeps the lowest validation MSE.
// Ties go to the smaller C, then the larger sigma2.
GridTuneResult grid_tune(const Matrix& train_x, const Vector& train_t, const Matrix& val_x,
                         const Vector& val_t, const std::vector<double>& sigma2_grid,
                         const std::vector<double>& c_grid, Exec exec = Exec::parallel);

struct LsSvmParams {
  double c = 10.0;
  double sigma2 = 1.0;
};

// One independent single-output machine per target column.
struct LsSvmMulti {
  std::vector<LsSvmModel> outputs;
};

LsSvmMulti lssvm_train_multi(const Dataset& train, const std::vector<LsSvmParams>& params,
                             Exec exec = Exec::parallel);
Vector predict(const LsSvmMulti& model, const Vector& x);
Matrix lssvm_predict_multi(const LsSvmMulti& model, const Matrix& inputs,
                           Exec exec = Exec::parallel);

}  // namespace steamreg
