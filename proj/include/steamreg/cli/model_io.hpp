#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include <json.hpp>

#include "steamreg/anfis.hpp"
#include "steamreg/ensemble.hpp"
#include "steamreg/hmc.hpp"
#include "steamreg/lssvm.hpp"
#include "steamreg/mlp.hpp"
#include "steamreg/rbf.hpp"

namespace steamreg::cli {

using TrainedModel = std::variant<MlpModel, RbfModel, Committee<MlpModel>, Committee<RbfModel>,
                                  PosteriorEnsemble, LsSvmMulti, AnfisMulti>;

Matrix predict_model(const TrainedModel& model, const Matrix& inputs, Exec exec = Exec::parallel);
std::size_t model_outputs(const TrainedModel& model);

nlohmann::json to_json(const MlpModel& m);
nlohmann::json to_json(const RbfModel& m);
nlohmann::json to_json(const LsSvmModel& m);
nlohmann::json to_json(const AnfisModel& m);

MlpModel mlp_from_json(const nlohmann::json& j);
RbfModel rbf_from_json(const nlohmann::json& j);
LsSvmModel lssvm_from_json(const nlohmann::json& j);
AnfisModel anfis_from_json(const nlohmann::json& j);

// Writes the model files into `dir` (created if needed):
//   mlp, rbf            model.json
//   committees          manifest.json + member_NN.json
//   posterior ensemble  manifest.json + samples.json + energy_trace.csv
//   lssvm, anfis        manifest.json + output_N.json
void save_model(const std::filesystem::path& dir, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& dir);

// Deterministic text form used for every JSON file the tool writes.
std::string dump_json(const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace steamreg::cli
