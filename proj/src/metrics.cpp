#include "steamreg/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "steamreg/errors.hpp"

namespace steamreg {
namespace {

double rmse_of(double total, std::size_t outputs, RmseMode mode) {
  if (mode == RmseMode::total || outputs == 0) return std::sqrt(total);
  return std::sqrt(total / static_cast<double>(outputs));
}

}  // namespace

EvalReport mse(const Matrix& predictions, const Matrix& targets, RmseMode mode) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    throw DimensionError("mse: predictions are " + std::to_string(predictions.rows()) + "x" +
                         std::to_string(predictions.cols()) + " but targets are " +
                         std::to_string(targets.rows()) + "x" + std::to_string(targets.cols()));
  }
  if (targets.rows() < 1) throw InvalidArgument("mse: no samples");
  const auto r = static_cast<double>(targets.rows());
  EvalReport out;
  out.samples = static_cast<std::size_t>(targets.rows());
  for (Eigen::Index p = 0; p < targets.cols(); ++p) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < targets.rows(); ++k) {
      const double e = targets(k, p) - predictions(k, p);
      s += e * e;
    }
    out.per_output_mse.push_back(s / r);
  }
  for (double v : out.per_output_mse) out.total_mse += v;
  out.rmse = rmse_of(out.total_mse, out.per_output_mse.size(), mode);
  return out;
}

EvalReport aggregate_single_output_models(const std::vector<EvalReport>& reports,
                                          std::size_t expected_outputs, RmseMode mode) {
  if (reports.size() != expected_outputs) {
    throw DimensionError("aggregate: " + std::to_string(reports.size()) + " reports for " +
                         std::to_string(expected_outputs) + " outputs");
  }
  EvalReport out;
  for (const auto& r : reports) {
    out.total_mse += r.total_mse;
    out.per_output_mse.insert(out.per_output_mse.end(), r.per_output_mse.begin(),
                              r.per_output_mse.end());
    out.samples = std::max(out.samples, r.samples);
    out.train_seconds += r.train_seconds;
    out.execute_seconds += r.execute_seconds;
  }
  out.rmse = rmse_of(out.total_mse, out.per_output_mse.size(), mode);
  return out;
}

EvalReport mean_predictor_baseline(const Matrix& train_targets, const Matrix& targets) {
  if (train_targets.rows() == 0) throw InvalidArgument("baseline: empty training targets");
  const Eigen::RowVectorXd mean = train_targets.colwise().mean();
  const Matrix pred = mean.replicate(targets.rows(), 1);
  return mse(pred, targets);
}

std::string render_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
  std::size_t outputs = 0;
  for (const auto& [name, r] : rows) outputs = std::max(outputs, r.per_output_mse.size());
  std::string out;
  char buf[64];
  auto cell = [&](const char* fmt, auto v) {
    std::snprintf(buf, sizeof buf, fmt, v);
    out += buf;
  };
  cell("%-16s", "method");
  cell("%12s", "total MSE");
  for (std::size_t p = 0; p < outputs; ++p) {
    const std::string h = "output" + std::to_string(p + 1);
    cell("%12s", h.c_str());
  }
  cell("%12s", "train (s)");
  cell("%12s", "exec (s)");
  out += '\n';
  for (const auto& [name, r] : rows) {
    cell("%-16s", name.c_str());
    cell("%12.6f", r.total_mse);
    for (std::size_t p = 0; p < outputs; ++p) {
      if (p < r.per_output_mse.size()) {
        cell("%12.6f", r.per_output_mse[p]);
      } else {
        cell("%12s", "-");
      }
    }
    cell("%12.3f", r.train_seconds);
    cell("%12.3f", r.execute_seconds);
    out += '\n';
  }
  return out;
}

}  // namespace steamreg
