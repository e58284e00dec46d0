#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "steamreg/cli/config.hpp"
#include "steamreg/cli/methods.hpp"
#include "steamreg/data.hpp"

namespace steamreg::cli {

namespace fs = std::filesystem;

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;    // bad flags or configuration values
inline constexpr int kExitTraining = 3;  // a trainer failed
inline constexpr int kExitIo = 4;        // unreadable, unwritable or malformed files

nlohmann::json scaling_to_json(const ScalingParams& p);
ScalingParams scaling_from_json(const nlohmann::json& j);

struct PrepSummary {
  std::size_t rows_read = 0;
  std::size_t removed = 0;
  std::size_t kept = 0;
  SplitDataset split;
  ScalingParams scaling;
};

// Loads (or generates) the raw data, removes outliers, scales and splits,
// then writes cleaned.csv, train.csv, validation.csv, test.csv,
// scaling.json and manifest.json into `dir`.
PrepSummary cmd_prep(const DataConfig& data, const fs::path& dir);

// Reads a directory written by cmd_prep.
SplitDataset load_prepared(const fs::path& dir);

void cmd_synth(const SyntheticSpec& spec, const fs::path& file);

// Trains one method and writes its model files plus history.csv into `dir`.
TrainedMethod cmd_train(const BenchConfig& config, const std::string& method,
                        const SplitDataset& split, const fs::path& dir);

struct BenchResult {
  nlohmann::json report;   // deterministic; no timings
  nlohmann::json timings;
  std::string table;
  std::size_t failed = 0;
};

// Trains and evaluates every configured method on the test split. Writes
// report.json, timings.json, report.txt, predictions/<method>.csv and
// models/<method>/ under config.output_dir. A failing method is recorded
// in the report and the others still run.
BenchResult cmd_bench(const BenchConfig& config, std::ostream& log);

// First n test rows per output as "output,index,actual,predicted". With
// scaling, values are mapped back to physical units.
std::string cmd_plot_data(const fs::path& model_dir, const fs::path& test_csv, std::size_t n,
                          const std::optional<ScalingParams>& scaling);

// Full command line front end; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace steamreg::cli
