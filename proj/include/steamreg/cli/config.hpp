#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "steamreg/anfis.hpp"
#include "steamreg/data.hpp"
#include "steamreg/errors.hpp"
#include "steamreg/lssvm.hpp"

namespace steamreg::cli {

// A configuration value failed validation. `path` names the field, e.g.
// "mlp.hidden" or "lssvm.params[2].sigma2".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : Error(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct SyntheticSpec {
  std::size_t count = 2000;
  double noise = 0.05;  // standard deviation in scaled output units
  std::uint64_t seed = 1;
};

struct DataConfig {
  std::string input;                       // raw CSV; empty when synthetic
  std::optional<SyntheticSpec> synthetic;  // used when input is empty
  std::string prepared;                    // directory written by `prep`
  SplitRatios ratios;
  std::uint64_t seed = 42;
  bool train_only_scaling = false;
};

struct MlpConfig {
  std::size_t hidden = 8;
  std::size_t max_cycles = 240;
  double alpha = 0.01;
  std::size_t patience = 50;
  std::size_t eval_every = 1;
};

struct RbfConfig {
  std::size_t centers = 30;
  std::size_t kmeans_iters = 150;
};

struct EnsembleConfig {
  std::size_t members = 10;
};

struct BayesConfig {
  std::size_t hidden = 8;
  double step_size = 0.0005;
  std::size_t leapfrog_steps = 100;
  std::size_t burn_in = 10;
  std::size_t retained = 100;
  double alpha = 0.01;
  double beta = 30.0;
  std::string init = "map";  // "map": start from an SCG fit; "random": from mlp_init
};

struct LsSvmConfig {
  // One (C, sigma2) pair per output.
  std::vector<LsSvmParams> params = {{10.0, 1.0}, {1.0, 1.0}, {10.0, 10.0}, {10.0, 0.1}};
  bool tune = false;
  std::vector<double> c_grid = {1.0, 10.0};
  std::vector<double> sigma2_grid = {0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0};
};

struct AnfisConfig {
  std::size_t mfs_per_input = 2;
  MfFamily family = MfFamily::gaussian;
  std::size_t epochs = 100;
  double step_size = 0.01;
};

struct BenchConfig {
  DataConfig data;
  std::vector<std::string> methods;
  std::uint64_t seed = 1;  // model-training seed
  MlpConfig mlp;
  RbfConfig rbf;
  EnsembleConfig committee;
  EnsembleConfig bagging;
  BayesConfig bayesian;
  LsSvmConfig lssvm;
  AnfisConfig anfis;
  std::string output_dir = "out";
};

const std::vector<std::string>& known_methods();

// Reads and validates every field; unknown keys are rejected.
BenchConfig parse_config(const nlohmann::json& doc);
BenchConfig load_config(const std::string& path);
nlohmann::json config_to_json(const BenchConfig& config);

// Checks that need the prepared data (sizes, output count).
void validate_against_data(const BenchConfig& config, std::size_t train_rows,
                           std::size_t outputs);

}  // namespace steamreg::cli
