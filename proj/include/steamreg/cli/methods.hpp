#pragma once

#include <string>

#include <json.hpp>

#include "steamreg/cli/config.hpp"
#include "steamreg/cli/model_io.hpp"
#include "steamreg/data.hpp"
#include "steamreg/rng.hpp"

namespace steamreg::cli {

struct TrainedMethod {
  TrainedModel model;
  std::string history_csv;
  nlohmann::json info;  // method-specific diagnostics (chosen parameters, acceptance rate, ...)
};

// Stream for `method`: the model seed derived by the method's position in
// known_methods(), so adding or removing methods never shifts another's draws.
RngStream method_stream(const std::string& method, std::uint64_t seed);

// Trains `method` on split.train, using split.validation for early stopping,
// checkpoint selection or tuning as the method requires.
TrainedMethod train_method(const std::string& method, const BenchConfig& config,
                           const SplitDataset& split);

}  // namespace steamreg::cli
