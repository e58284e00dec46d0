#include "steamreg/cli/commands.hpp"

#include <CLI11.hpp>
#include <ostream>

#include "steamreg/cli/synthetic.hpp"
#include "steamreg/errors.hpp"
#include "steamreg/metrics.hpp"

namespace steamreg::cli {

using nlohmann::json;

namespace {

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

json ratios_json(const SplitRatios& r) {
  return {{"train", r.train}, {"validation", r.validation}, {"test", r.test}};
}

json report_json(const EvalReport& r) {
  return {{"total_mse", r.total_mse},
          {"per_output_mse", r.per_output_mse},
          {"rmse", r.rmse},
          {"samples", r.samples}};
}

std::string predictions_csv(const Dataset& test, const Matrix& pred) {
  std::string s = "index";
  for (std::size_t k = 0; k < test.n_out(); ++k) {
    const std::size_t c = test.n_in() + k;
    const std::string name = c < test.columns.size() ? test.columns[c] : "y" + std::to_string(k + 1);
    s += "," + name + "_actual," + name + "_predicted";
  }
  s += "\n";
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    s += std::to_string(i);
    for (Eigen::Index k = 0; k < pred.cols(); ++k) {
      s += "," + format_double(test.targets(i, k)) + "," + format_double(pred(i, k));
    }
    s += "\n";
  }
  return s;
}

Dataset source_data(const DataConfig& data) {
  if (!data.input.empty()) return load_dataset(data.input);
  if (data.synthetic) return generate_synthetic(*data.synthetic);
  throw ConfigError("data.input", "no input file or synthetic spec given");
}

}  // namespace

json scaling_to_json(const ScalingParams& p) { return {{"min", p.min}, {"max", p.max}}; }

ScalingParams scaling_from_json(const json& j) {
  auto list = [&](const char* key) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) {
      throw SchemaError(std::string("scaling file: missing array \"") + key + "\"");
    }
    std::vector<double> v;
    for (const json& x : j.at(key)) {
      if (!x.is_number()) throw SchemaError("scaling file: non-numeric entry");
      v.push_back(x.get<double>());
    }
    return v;
  };
  ScalingParams p{list("min"), list("max")};
  if (p.min.size() != p.max.size()) throw SchemaError("scaling file: min and max lengths differ");
  return p;
}

PrepSummary cmd_prep(const DataConfig& data, const fs::path& dir) {
  const Dataset raw = source_data(data);
  PrepSummary s;
  s.rows_read = raw.size();
  OutlierResult clean = remove_outliers(raw);
  s.removed = clean.removed;
  s.kept = clean.kept.size();
  if (data.train_only_scaling) {
    // Split in raw units, then scale every part with the training-set range.
    SplitDataset parts = shuffle_split(clean.kept, data.ratios, data.seed);
    s.scaling = fit_scaling(parts.train);
    s.split = parts;
    s.split.train = apply_scaling(parts.train, s.scaling);
    s.split.validation = apply_scaling(parts.validation, s.scaling);
    s.split.test = apply_scaling(parts.test, s.scaling);
  } else {
    ScaledDataset scaled = minmax_scale(clean.kept);
    s.scaling = scaled.params;
    s.split = shuffle_split(scaled.data, data.ratios, data.seed);
  }

  make_dir(dir);
  write_dataset((dir / "cleaned.csv").string(), clean.kept);
  write_dataset((dir / "train.csv").string(), s.split.train);
  write_dataset((dir / "validation.csv").string(), s.split.validation);
  write_dataset((dir / "test.csv").string(), s.split.test);
  write_text(dir / "scaling.json", dump_json(scaling_to_json(s.scaling)));
  json source = data.input.empty() ? json{{"synthetic",
                                           {{"count", data.synthetic->count},
                                            {"noise", data.synthetic->noise},
                                            {"seed", data.synthetic->seed}}}}
                                   : json{{"input", fs::path(data.input).filename().string()}};
  const json manifest = {{"source", source},
                         {"rows_read", s.rows_read},
                         {"removed", s.removed},
                         {"kept", s.kept},
                         {"seed", data.seed},
                         {"ratios", ratios_json(data.ratios)},
                         {"scaling_fit", data.train_only_scaling ? "train" : "all"},
                         {"sizes",
                          {{"train", s.split.train.size()},
                           {"validation", s.split.validation.size()},
                           {"test", s.split.test.size()}}},
                         {"files",
                          {"cleaned.csv", "train.csv", "validation.csv", "test.csv", "scaling.json"}}};
  write_text(dir / "manifest.json", dump_json(manifest));
  return s;
}

SplitDataset load_prepared(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("prepared data not found: " + dir.string());
  SplitDataset s;
  s.train = load_dataset((dir / "train.csv").string());
  s.validation = load_dataset((dir / "validation.csv").string());
  s.test = load_dataset((dir / "test.csv").string());
  const json m = read_json(dir / "manifest.json");
  if (m.contains("seed") && m.at("seed").is_number_unsigned()) s.seed = m.at("seed").get<std::uint64_t>();
  return s;
}

void cmd_synth(const SyntheticSpec& spec, const fs::path& file) {
  if (file.has_parent_path()) make_dir(file.parent_path());
  write_dataset(file.string(), generate_synthetic(spec));
}

TrainedMethod cmd_train(const BenchConfig& config, const std::string& method,
                        const SplitDataset& split, const fs::path& dir) {
  TrainedMethod t = train_method(method, config, split);
  save_model(dir, t.model);
  write_text(dir / "history.csv", t.history_csv);
  return t;
}

BenchResult cmd_bench(const BenchConfig& config, std::ostream& log) {
  const fs::path out = config.output_dir;
  SplitDataset split;
  json data_info;
  if (config.data.prepared.empty()) {
    const PrepSummary p = cmd_prep(config.data, out / "prepared");
    split = p.split;
    data_info = {{"prepared", "prepared"}, {"removed", p.removed}, {"kept", p.kept}};
  } else {
    split = load_prepared(config.data.prepared);
    data_info = {{"prepared", config.data.prepared}};
  }
  data_info["train_rows"] = split.train.size();
  data_info["validation_rows"] = split.validation.size();
  data_info["test_rows"] = split.test.size();
  if (split.test.empty()) throw ConfigError("data.ratios.test", "test split is empty");
  validate_against_data(config, split.train.size(), split.train.n_out());

  BenchResult result;
  const EvalReport baseline = mean_predictor_baseline(split.train.targets, split.test.targets);
  json methods = json::array();
  json timings = json::array();
  std::vector<std::pair<std::string, EvalReport>> rows;
  make_dir(out / "predictions");
  for (const std::string& name : config.methods) {
    log << "training " << name << "\n" << std::flush;
    try {
      Stopwatch train_clock;
      TrainedMethod t = cmd_train(config, name, split, out / "models" / name);
      const double train_s = train_clock.seconds();
      Stopwatch exec_clock;
      const Matrix pred = predict_model(t.model, split.test.inputs);
      const double exec_s = exec_clock.seconds();
      EvalReport r = mse(pred, split.test.targets);
      r.train_seconds = train_s;
      r.execute_seconds = exec_s;
      write_text(out / "predictions" / (name + ".csv"), predictions_csv(split.test, pred));
      json entry = report_json(r);
      entry["method"] = name;
      entry["status"] = "ok";
      entry["baseline_ratio"] = baseline.total_mse > 0.0 ? r.total_mse / baseline.total_mse : 0.0;
      entry["info"] = t.info;
      methods.push_back(std::move(entry));
      timings.push_back({{"method", name}, {"train_seconds", train_s}, {"execute_seconds", exec_s}});
      rows.emplace_back(name, r);
    } catch (const Error& e) {
      ++result.failed;
      log << name << " failed: " << e.what() << "\n";
      methods.push_back({{"method", name}, {"status", "failed"}, {"error", e.what()}});
    }
  }
  rows.emplace_back("mean-baseline", baseline);

  result.report = {{"data", data_info},
                   {"seed", config.seed},
                   {"units", "scaled"},
                   {"baseline", report_json(baseline)},
                   {"methods", methods}};
  result.timings = {{"methods", timings}};
  result.table = render_table(rows);
  write_text(out / "report.json", dump_json(result.report));
  write_text(out / "timings.json", dump_json(result.timings));
  write_text(out / "report.txt", result.table);
  return result;
}

std::string cmd_plot_data(const fs::path& model_dir, const fs::path& test_csv, std::size_t n,
                          const std::optional<ScalingParams>& scaling) {
  const TrainedModel model = load_model(model_dir);
  const Dataset test = load_dataset(test_csv.string());
  if (n == 0) throw ConfigError("n", "must be at least 1");
  if (n > test.size()) {
    throw ConfigError("n", std::to_string(n) + " exceeds the " + std::to_string(test.size()) +
                               " test rows");
  }
  const auto rows = static_cast<Eigen::Index>(n);
  const Matrix x = test.inputs.topRows(rows);
  Matrix actual = test.targets.topRows(rows);
  Matrix pred = predict_model(model, x);
  if (pred.cols() != actual.cols()) throw DimensionError("model output count does not match the test file");
  if (scaling) {
    actual = inverse_scale_targets(actual, *scaling);
    pred = inverse_scale_targets(pred, *scaling);
  }
  std::string s = "output,index,actual,predicted\n";
  for (Eigen::Index k = 0; k < pred.cols(); ++k) {
    const std::size_t c = test.n_in() + static_cast<std::size_t>(k);
    const std::string name = c < test.columns.size() ? test.columns[c] : "y" + std::to_string(k + 1);
    for (Eigen::Index i = 0; i < rows; ++i) {
      s += name + "," + std::to_string(i) + "," + format_double(actual(i, k)) + "," +
           format_double(pred(i, k)) + "\n";
    }
  }
  return s;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steam generator regression benchmark"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", seed, "Seed override (split seed for prep, generator seed for synth, model seed otherwise)");
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");

  auto* synth = app.add_subcommand("synth", "Write a synthetic plant data set to OUT/synthetic.csv");
  std::optional<std::size_t> count;
  std::optional<double> noise;
  synth->add_option("--count", count, "Number of rows");
  synth->add_option("--noise", noise, "Noise standard deviation in scaled output units");

  auto* prep = app.add_subcommand("prep", "Clean, scale and split raw data into OUT/prepared");
  std::string input;
  prep->add_option("--input", input, "Raw CSV (overrides data.input)");

  auto* train = app.add_subcommand("train", "Train one method into OUT/models/METHOD");
  std::string method;
  std::string prepared;
  train->add_option("--method", method, "Method name")->required();
  train->add_option("--data", prepared, "Prepared data directory (default data.prepared or OUT/prepared)");

  auto* bench = app.add_subcommand("bench", "Train and evaluate every configured method");
  bench->add_option("--data", prepared, "Prepared data directory (default: prepare from config)");

  auto* plot = app.add_subcommand("plot-data", "Write actual/predicted CSV for the first N test rows");
  std::string model_dir;
  std::string test_csv;
  std::string scaling_path;
  std::string plot_file;
  std::size_t n = 60;
  plot->add_option("--model", model_dir, "Model directory")->required();
  plot->add_option("--test", test_csv, "Prepared test CSV")->required();
  plot->add_option("--n", n, "Rows per output");
  plot->add_option("--scaling", scaling_path, "scaling.json to report physical units");
  plot->add_option("--file", plot_file, "Output CSV (default OUT/plot_data.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    BenchConfig config = config_path.empty() ? parse_config(json::object()) : load_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    const fs::path out_path = config.output_dir;

    if (synth->parsed()) {
      SyntheticSpec spec = config.data.synthetic.value_or(SyntheticSpec{});
      if (count) spec.count = *count;
      if (noise) spec.noise = *noise;
      if (seed) spec.seed = *seed;
      if (spec.count < 10) throw ConfigError("count", "must be at least 10");
      if (!(spec.noise >= 0.0)) throw ConfigError("noise", "must be non-negative");
      cmd_synth(spec, out_path / "synthetic.csv");
      out << "wrote " << (out_path / "synthetic.csv").string() << "\n";
    } else if (prep->parsed()) {
      if (!input.empty()) {
        config.data.input = input;
        config.data.synthetic.reset();
      }
      if (seed) config.data.seed = *seed;
      const PrepSummary s = cmd_prep(config.data, out_path / "prepared");
      out << "read " << s.rows_read << ", removed " << s.removed << ", kept " << s.kept
          << " (train " << s.split.train.size() << ", validation " << s.split.validation.size()
          << ", test " << s.split.test.size() << ")\n";
    } else if (train->parsed()) {
      if (seed) config.seed = *seed;
      const auto& known = known_methods();
      if (std::find(known.begin(), known.end(), method) == known.end()) {
        throw ConfigError("method", "unknown method '" + method + "'");
      }
      config.methods = {method};
      const fs::path dir = !prepared.empty()              ? fs::path(prepared)
                           : !config.data.prepared.empty() ? fs::path(config.data.prepared)
                                                           : out_path / "prepared";
      const SplitDataset split = load_prepared(dir);
      validate_against_data(config, split.train.size(), split.train.n_out());
      const fs::path model_dir = out_path / "models" / method;
      cmd_train(config, method, split, model_dir);
      out << "wrote " << model_dir.string() << "\n";
    } else if (bench->parsed()) {
      if (seed) config.seed = *seed;
      if (!prepared.empty()) config.data.prepared = prepared;
      const BenchResult r = cmd_bench(config, err);
      out << r.table;
      if (r.failed > 0) return kExitTraining;
    } else if (plot->parsed()) {
      std::optional<ScalingParams> scaling;
      if (!scaling_path.empty()) scaling = scaling_from_json(read_json(scaling_path));
      const std::string csv = cmd_plot_data(model_dir, test_csv, n, scaling);
      const fs::path file = plot_file.empty() ? out_path / "plot_data.csv" : fs::path(plot_file);
      if (file.has_parent_path()) make_dir(file.parent_path());
      write_text(file, csv);
      out << "wrote " << file.string() << "\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "input error: " << e.what();
    if (e.line() > 0) err << " (line " << e.line() << ")";
    err << "\n";
    return kExitIo;
  } catch (const ConstantColumnError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitTraining;
  }
}

}  // namespace steamreg::cli
