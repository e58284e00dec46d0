#include "steamreg/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "steamreg/errors.hpp"
#include "steamreg/rng.hpp"

namespace steamreg {
namespace {

constexpr std::size_t kColumns = kPlantInputs + kPlantOutputs;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    fields.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

bool parse_number(std::string_view field, double& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

const std::vector<std::string>& plant_column_names() {
  static const std::vector<std::string> names = {
      "fuel", "air", "reference_level", "disturbance",
      "drum_pressure", "excess_oxygen", "water_level", "steam_flow"};
  return names;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.columns = columns;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), inputs.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()), targets.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    out.inputs.row(static_cast<Eigen::Index>(i)) = inputs.row(r);
    out.targets.row(static_cast<Eigen::Index>(i)) = targets.row(r);
  }
  return out;
}

Dataset Dataset::output_column(std::size_t k) const {
  Dataset out;
  if (!columns.empty()) {
    out.columns.assign(columns.begin(), columns.begin() + static_cast<long>(n_in()));
    out.columns.push_back(columns[n_in() + k]);
  }
  out.inputs = inputs;
  out.targets = targets.col(static_cast<Eigen::Index>(k));
  return out;
}

Dataset parse_dataset(const std::string& text, char delimiter) {
  std::vector<std::array<double, kColumns>> rows;
  std::vector<std::string> columns = plant_column_names();

  std::istringstream in(text);
  std::string raw_line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::string_view line = trim(raw_line);
    if (line.empty()) continue;
    const auto fields = split(line, delimiter);

    std::array<double, kColumns> values{};
    bool numeric = fields.size() == kColumns;
    for (std::size_t c = 0; numeric && c < kColumns; ++c) {
      numeric = parse_number(fields[c], values[c]);
    }

    if (first_content) {
      first_content = false;
      bool any_number = false;
      double ignored = 0.0;
      for (auto f : fields) any_number = any_number || parse_number(f, ignored);
      if (!any_number) {
        if (fields.size() != kColumns) {
          throw SchemaError("line " + std::to_string(line_no) + ": header has " +
                                std::to_string(fields.size()) + " fields, expected " +
                                std::to_string(kColumns),
                            line_no);
        }
        columns.assign(fields.begin(), fields.end());
        continue;
      }
    }

    if (fields.size() != kColumns) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(kColumns) + " fields, found " +
                            std::to_string(fields.size()),
                        line_no);
    }
    if (!numeric) {
      throw ParseError("line " + std::to_string(line_no) + ": non-numeric field", line_no);
    }
    rows.push_back(values);
  }

  if (rows.empty()) throw ParseError("no data rows");

  Dataset data;
  data.columns = std::move(columns);
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.inputs.resize(n, kPlantInputs);
  data.targets.resize(n, kPlantOutputs);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < kPlantInputs; ++c) data.inputs(i, static_cast<Eigen::Index>(c)) = r[c];
    for (std::size_t c = 0; c < kPlantOutputs; ++c) {
      data.targets(i, static_cast<Eigen::Index>(c)) = r[kPlantInputs + c];
    }
  }
  return data;
}

Dataset load_dataset(const std::string& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), delimiter);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_dataset(const Dataset& data) {
  std::string out;
  const std::size_t width = data.n_in() + data.n_out();
  for (std::size_t c = 0; c < width; ++c) {
    if (c) out += ',';
    out += c < data.columns.size() ? data.columns[c] : "col" + std::to_string(c + 1);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < data.inputs.rows(); ++i) {
    for (Eigen::Index c = 0; c < data.inputs.cols(); ++c) {
      if (c) out += ',';
      out += format_double(data.inputs(i, c));
    }
    for (Eigen::Index c = 0; c < data.targets.cols(); ++c) {
      out += ',';
      out += format_double(data.targets(i, c));
    }
    out += '\n';
  }
  return out;
}

void write_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << format_dataset(data);
  if (!out) throw IoError("write failed for " + path);
}

OutlierResult remove_outliers(const Dataset& raw) {
  std::vector<std::size_t> keep;
  keep.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double fuel = raw.inputs(r, 0);
    const double air = raw.inputs(r, 1);
    if (fuel >= 0.0 && fuel <= 1.0 && air >= 0.0 && air <= 1.0) keep.push_back(i);
  }
  OutlierResult out;
  out.removed = raw.size() - keep.size();
  out.kept = raw.subset(keep);
  return out;
}

ScalingParams fit_scaling(const Dataset& data) {
  if (data.empty()) throw InvalidArgument("fit_scaling: empty dataset");
  ScalingParams p;
  for (Eigen::Index c = 0; c < data.inputs.cols(); ++c) {
    p.min.push_back(data.inputs.col(c).minCoeff());
    p.max.push_back(data.inputs.col(c).maxCoeff());
  }
  for (Eigen::Index c = 0; c < data.targets.cols(); ++c) {
    p.min.push_back(data.targets.col(c).minCoeff());
    p.max.push_back(data.targets.col(c).maxCoeff());
  }
  return p;
}

namespace {

void check_columns(const Dataset& data, const ScalingParams& params) {
  if (params.min.size() != params.max.size() ||
      params.columns() != data.n_in() + data.n_out()) {
    throw DimensionError("scaling parameters cover " + std::to_string(params.columns()) +
                         " columns but the dataset has " +
                         std::to_string(data.n_in() + data.n_out()));
  }
}

std::string column_label(const Dataset& data, std::size_t c) {
  return c < data.columns.size() ? data.columns[c] : "column " + std::to_string(c + 1);
}

}  // namespace

Dataset apply_scaling(const Dataset& data, const ScalingParams& params) {
  check_columns(data, params);
  for (std::size_t c = 0; c < params.columns(); ++c) {
    if (params.is_constant(c)) {
      throw ConstantColumnError("column " + std::to_string(c + 1) + " (" +
                                    column_label(data, c) + ") is constant; cannot scale",
                                c);
    }
  }
  Dataset out = data;
  const auto n_in = static_cast<Eigen::Index>(data.n_in());
  for (Eigen::Index c = 0; c < out.inputs.cols(); ++c) {
    const auto k = static_cast<std::size_t>(c);
    out.inputs.col(c) = (out.inputs.col(c).array() - params.min[k]) / (params.max[k] - params.min[k]);
  }
  for (Eigen::Index c = 0; c < out.targets.cols(); ++c) {
    const auto k = static_cast<std::size_t>(c + n_in);
    out.targets.col(c) =
        (out.targets.col(c).array() - params.min[k]) / (params.max[k] - params.min[k]);
  }
  return out;
}

ScaledDataset minmax_scale(const Dataset& data) {
  ScaledDataset out;
  out.params = fit_scaling(data);
  out.data = apply_scaling(data, out.params);
  return out;
}

Dataset inverse_scale(const Dataset& scaled, const ScalingParams& params) {
  check_columns(scaled, params);
  Dataset out = scaled;
  for (Eigen::Index c = 0; c < out.inputs.cols(); ++c) {
    const auto k = static_cast<std::size_t>(c);
    out.inputs.col(c) = out.inputs.col(c).array() * (params.max[k] - params.min[k]) + params.min[k];
  }
  out.targets = inverse_scale_targets(scaled.targets, params);
  return out;
}

Matrix inverse_scale_targets(const Matrix& scaled, const ScalingParams& params) {
  if (static_cast<std::size_t>(scaled.cols()) > params.columns()) {
    throw DimensionError("inverse_scale_targets: too many target columns");
  }
  const std::size_t offset = params.columns() - static_cast<std::size_t>(scaled.cols());
  Matrix out = scaled;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const auto k = offset + static_cast<std::size_t>(c);
    out.col(c) = out.col(c).array() * (params.max[k] - params.min[k]) + params.min[k];
  }
  return out;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  RngStream rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

SplitDataset shuffle_split(const Dataset& data, const SplitRatios& ratios, std::uint64_t seed) {
  if (!(ratios.train > 0.0 && ratios.validation > 0.0 && ratios.test > 0.0)) {
    throw InvalidArgument("shuffle_split: ratios must be positive");
  }
  if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw InvalidArgument("shuffle_split: ratios must sum to 1");
  }
  const std::size_t n = data.size();
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.validation + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.test + 1e-9));
  const std::size_t n_train = n - n_val - n_test;

  const auto perm = seeded_permutation(n, seed);
  SplitDataset out;
  out.seed = seed;
  out.ratios = ratios;
  out.train_rows.assign(perm.begin(), perm.begin() + static_cast<long>(n_train));
  out.validation_rows.assign(perm.begin() + static_cast<long>(n_train),
                             perm.begin() + static_cast<long>(n_train + n_val));
  out.test_rows.assign(perm.begin() + static_cast<long>(n_train + n_val), perm.end());
  out.train = data.subset(out.train_rows);
  out.validation = data.subset(out.validation_rows);
  out.test = data.subset(out.test_rows);
  return out;
}

}  // namespace steamreg
