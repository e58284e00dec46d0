#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "steamreg/numeric.hpp"

namespace steamreg {

inline constexpr std::size_t kPlantInputs = 4;
inline constexpr std::size_t kPlantOutputs = 4;

// fuel, air, reference level, disturbance | drum pressure, excess oxygen,
// water level, steam flow.
const std::vector<std::string>& plant_column_names();

// Samples as paired input/target matrices, one row per record. Used both for
// raw plant records and for their scaled counterparts.
struct Dataset {
  std::vector<std::string> columns;
  Matrix inputs;
  Matrix targets;

  std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
  std::size_t n_in() const { return static_cast<std::size_t>(inputs.cols()); }
  std::size_t n_out() const { return static_cast<std::size_t>(targets.cols()); }
  bool empty() const { return inputs.rows() == 0; }

  Dataset subset(const std::vector<std::size_t>& rows) const;
  // Single target column as a one-output dataset.
  Dataset output_column(std::size_t k) const;
};

// Raw plant records: four inputs and four targets per line.
Dataset load_dataset(const std::string& path, char delimiter = ',');
Dataset parse_dataset(const std::string& text, char delimiter = ',');

// Writes a header line and one record per line with round-trip precision.
void write_dataset(const std::string& path, const Dataset& data);
std::string format_dataset(const Dataset& data);

struct OutlierResult {
  Dataset kept;
  std::size_t removed = 0;
};

// Drops records whose fuel or air value (the two inputs already delivered
// in [0, 1]) lies outside [0, 1]. Other columns are never filtered.
OutlierResult remove_outliers(const Dataset& raw);

// Per-column min/max over inputs then targets.
struct ScalingParams {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t columns() const { return min.size(); }
  bool is_constant(std::size_t c) const { return max[c] == min[c]; }
};

ScalingParams fit_scaling(const Dataset& data);
// Throws ConstantColumnError when any column has max == min.
Dataset apply_scaling(const Dataset& data, const ScalingParams& params);

struct ScaledDataset {
  Dataset data;
  ScalingParams params;
};

ScaledDataset minmax_scale(const Dataset& data);
Dataset inverse_scale(const Dataset& scaled, const ScalingParams& params);
// Undo the target part of the scaling only (for model predictions).
Matrix inverse_scale_targets(const Matrix& scaled, const ScalingParams& params);

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

struct SplitDataset {
  Dataset train;
  Dataset validation;
  Dataset test;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  // Source-row indices of each part, in the order rows appear in the part.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> validation_rows;
  std::vector<std::size_t> test_rows;
};

// Seeded shuffle followed by floor allocation of validation and test sizes;
// the remainder goes to train.
SplitDataset shuffle_split(const Dataset& data, const SplitRatios& ratios, std::uint64_t seed);

// Fisher-Yates permutation of 0..n-1 from a seeded stream.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

std::string format_double(double v);

}  // namespace steamreg
