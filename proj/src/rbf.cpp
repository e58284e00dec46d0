#include "steamreg/rbf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "steamreg/errors.hpp"
#include "steamreg/rng.hpp"

namespace steamreg {
namespace {

void check_model(const RbfModel& m) {
  if (m.centers.rows() == 0) throw InvalidArgument("rbf: model has no hidden units");
  if (m.widths.size() != m.centers.rows() || m.weights.cols() != m.centers.rows() ||
      m.bias.size() != m.weights.rows()) {
    throw DimensionError("rbf: inconsistent model dimensions");
  }
}

double phi(const Matrix& inputs, Eigen::Index n, const Matrix& centers, Eigen::Index j,
           double width) {
  const double d2 = (inputs.row(n) - centers.row(j)).squaredNorm();
  return std::exp(-d2 / (2.0 * width * width));
}

}  // namespace

double rbf_activation(const Vector& x, const Vector& center, double width) {
  if (!(width > 0.0)) throw InvalidArgument("rbf_activation: width must be positive");
  if (x.size() != center.size()) throw DimensionError("rbf_activation: dimension mismatch");
  return std::exp(-(x - center).squaredNorm() / (2.0 * width * width));
}

Vector rbf_forward(const RbfModel& model, const Vector& x) {
  check_model(model);
  if (static_cast<std::size_t>(x.size()) != model.n_in()) {
    throw DimensionError("rbf_forward: input has " + std::to_string(x.size()) +
                         " entries, expected " + std::to_string(model.n_in()));
  }
  Vector activations(model.centers.rows());
  for (Eigen::Index j = 0; j < model.centers.rows(); ++j) {
    activations[j] = rbf_activation(x, model.centers.row(j).transpose(), model.widths[j]);
  }
  return model.bias + model.weights * activations;
}

Matrix rbf_design_matrix(const Matrix& centers, const Vector& widths, const Matrix& inputs,
                         Exec exec) {
  if (inputs.cols() != centers.cols()) throw DimensionError("rbf: input width mismatch");
  const Eigen::Index m = centers.rows();
  Matrix design(inputs.rows(), m + 1);
  if (exec == Exec::serial) {
    for (Eigen::Index n = 0; n < inputs.rows(); ++n) {
      design(n, 0) = 1.0;
      for (Eigen::Index j = 0; j < m; ++j) design(n, j + 1) = phi(inputs, n, centers, j, widths[j]);
    }
    return design;
  }
  const auto rows = static_cast<std::size_t>(inputs.rows());
  const std::size_t blocks = block_count(rows);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t end = std::min(rows, (b + 1) * kBlockRows);
    for (std::size_t i = b * kBlockRows; i < end; ++i) {
      const auto n = static_cast<Eigen::Index>(i);
      design(n, 0) = 1.0;
      for (Eigen::Index j = 0; j < m; ++j) design(n, j + 1) = phi(inputs, n, centers, j, widths[j]);
    }
  }
  return design;
}

Matrix rbf_predict(const RbfModel& model, const Matrix& inputs, Exec exec) {
  check_model(model);
  const Matrix design = rbf_design_matrix(model.centers, model.widths, inputs, exec);
  Matrix coef(model.weights.cols() + 1, model.weights.rows());
  coef.row(0) = model.bias.transpose();
  coef.bottomRows(model.weights.cols()) = model.weights.transpose();
  return design * coef;
}

Vector rbf_widths(const Matrix& centers, const Matrix& inputs) {
  const Eigen::Index m = centers.rows();
  Vector widths(m);
  if (m == 1) {
    double ss = 0.0;
    for (Eigen::Index n = 0; n < inputs.rows(); ++n) {
      ss += (inputs.row(n) - centers.row(0)).squaredNorm();
    }
    const double rms = inputs.rows() > 0 ? std::sqrt(ss / static_cast<double>(inputs.rows())) : 0.0;
    widths[0] = std::max(rms, kMinRbfWidth);
    return widths;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    double first = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < m; ++l) {
      if (l == j) continue;
      const double d = (centers.row(j) - centers.row(l)).norm();
      if (d < first) {
        second = first;
        first = d;
      } else if (d < second) {
        second = d;
      }
    }
    const double w = m == 2 ? first : 0.5 * (first + second);
    widths[j] = std::max(w, kMinRbfWidth);
  }
  return widths;
}

RbfFitResult rbf_fit_output_layer(const Matrix& centers, const Vector& widths,
                                  const Dataset& train, Exec exec) {
  if (widths.size() != centers.rows()) throw DimensionError("rbf: widths/centers mismatch");
  for (Eigen::Index j = 0; j < widths.size(); ++j) {
    if (!(widths[j] > 0.0)) throw InvalidArgument("rbf: widths must be positive");
  }
  const Matrix design = rbf_design_matrix(centers, widths, train.inputs, exec);
  const LeastSquaresResult ls = least_squares(design, train.targets);

  RbfFitResult out;
  out.ridge_fallback = ls.ridge_fallback;
  out.model.centers = centers;
  out.model.widths = widths;
  out.model.bias = ls.weights.row(0).transpose();
  out.model.weights = ls.weights.bottomRows(centers.rows()).transpose();
  return out;
}

RbfTrainResult rbf_train_two_stage(const Dataset& train, std::size_t hidden, RngStream& rng,
                                   const RbfTrainOptions& options) {
  if (hidden == 0) throw InvalidArgument("rbf: at least one hidden unit is required");
  const KMeansResult km = kmeans(train.inputs, hidden, rng, options.kmeans_iters, options.exec);
  const Vector widths = rbf_widths(km.centers, train.inputs);
  RbfFitResult fit = rbf_fit_output_layer(km.centers, widths, train, options.exec);

  RbfTrainResult out;
  out.model = std::move(fit.model);
  out.ridge_fallback = fit.ridge_fallback;
  out.kmeans_sse = km.sse_history;
  return out;
}

}  // namespace steamreg
