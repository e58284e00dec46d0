#include "steamreg/cli/methods.hpp"

#include <algorithm>

#include "steamreg/errors.hpp"
#include "steamreg/metrics.hpp"

namespace steamreg::cli {

using nlohmann::json;

namespace {

TrainConfig scg_config(const MlpConfig& c) {
  TrainConfig t;
  t.max_cycles = c.max_cycles;
  t.weight_decay = c.alpha;
  t.patience = c.patience;
  t.eval_every = c.eval_every;
  return t;
}

MlpTrainResult fit_mlp(const Dataset& train, const Dataset& validation, std::size_t hidden,
                       const TrainConfig& config, RngStream& rng) {
  const MlpShape shape{train.n_in(), hidden, train.n_out()};
  return train_scg(mlp_init(shape, rng), train, validation, config);
}

std::string mlp_history(const MlpTrainResult& r) {
  std::string s = "cycle,train_mse,validation_mse\n";
  for (const auto& h : r.history) {
    s += std::to_string(h.cycle) + "," + format_double(h.train_mse) + "," +
         format_double(h.validation_mse) + "\n";
  }
  return s;
}

template <class M>
std::string member_history(const Committee<M>& c, const SplitDataset& split) {
  std::string s = "member,train_mse,validation_mse\n";
  for (std::size_t i = 0; i < c.members.size(); ++i) {
    const auto& m = c.members[i];
    const Matrix pt = predict_model(TrainedModel(m), split.train.inputs);
    const Matrix pv = predict_model(TrainedModel(m), split.validation.inputs);
    s += std::to_string(i) + "," + format_double(mse(pt, split.train.targets).total_mse) + "," +
         format_double(split.validation.empty() ? 0.0 : mse(pv, split.validation.targets).total_mse) +
         "\n";
  }
  return s;
}

TrainedMethod train_mlp(const BenchConfig& c, const SplitDataset& split, RngStream& rng) {
  auto r = fit_mlp(split.train, split.validation, c.mlp.hidden, scg_config(c.mlp), rng);
  json info = {{"parameters", r.model.shape.param_count()},
               {"best_cycle", r.best_cycle},
               {"cycles_run", r.cycles_run},
               {"early_stopped", r.early_stopped}};
  std::string history = mlp_history(r);
  return {std::move(r.model), std::move(history), std::move(info)};
}

TrainedMethod train_rbf(const BenchConfig& c, const SplitDataset& split, RngStream& rng) {
  RbfTrainOptions opt;
  opt.kmeans_iters = c.rbf.kmeans_iters;
  auto r = rbf_train_two_stage(split.train, c.rbf.centers, rng, opt);
  std::string s = "kmeans_iteration,sse\n";
  for (std::size_t i = 0; i < r.kmeans_sse.size(); ++i) {
    s += std::to_string(i) + "," + format_double(r.kmeans_sse[i]) + "\n";
  }
  json info = {{"parameters", r.model.param_count()}, {"ridge_fallback", r.ridge_fallback}};
  return {std::move(r.model), std::move(s), std::move(info)};
}

TrainedMethod train_ensemble(const std::string& method, const BenchConfig& c,
                             const SplitDataset& split, RngStream& rng) {
  const bool bootstrap = method.starts_with("bagging");
  const std::size_t members = bootstrap ? c.bagging.members : c.committee.members;
  if (method.ends_with("mlp")) {
    const TrainConfig tc = scg_config(c.mlp);
    auto trainer = [&](const Dataset& data, RngStream& stream) {
      return fit_mlp(data, split.validation, c.mlp.hidden, tc, stream).model;
    };
    auto committee = bagging_train(trainer, members, split.train, rng, bootstrap);
    std::string history = member_history(committee, split);
    return {std::move(committee), std::move(history), {{"members", members}, {"bootstrap", bootstrap}}};
  }
  RbfTrainOptions opt;
  opt.kmeans_iters = c.rbf.kmeans_iters;
  auto trainer = [&](const Dataset& data, RngStream& stream) {
    return rbf_train_two_stage(data, c.rbf.centers, stream, opt).model;
  };
  auto committee = bagging_train(trainer, members, split.train, rng, bootstrap);
  std::string history = member_history(committee, split);
  return {std::move(committee), std::move(history), {{"members", members}, {"bootstrap", bootstrap}}};
}

TrainedMethod train_bayesian(const BenchConfig& c, const SplitDataset& split, RngStream& rng) {
  const auto& b = c.bayesian;
  const MlpShape shape{split.train.n_in(), b.hidden, split.train.n_out()};
  RngStream init_rng = rng.derive(0);
  RngStream chain_rng = rng.derive(1);
  Vector init;
  if (b.init == "map") {
    // The posterior mode is the minimizer of SSE + (alpha / beta) |w|^2.
    TrainConfig tc = scg_config(c.mlp);
    tc.weight_decay = b.alpha / b.beta;
    init = fit_mlp(split.train, split.validation, b.hidden, tc, init_rng).model.params;
  } else {
    init = mlp_init(shape, init_rng).params;
  }
  PosteriorSpec spec{shape, b.alpha, b.beta, &split.train};
  HmcConfig hc{b.step_size, b.leapfrog_steps, b.burn_in, b.retained};
  PosteriorEnsemble e = hmc_sample(spec, hc, init, chain_rng);
  std::string s = "transition,energy\n";
  for (std::size_t i = 0; i < e.energy_trace.size(); ++i) {
    s += std::to_string(i) + "," + format_double(e.energy_trace[i]) + "\n";
  }
  json info = {{"acceptance_rate", e.acceptance_rate}, {"samples", e.samples.size()}, {"init", b.init}};
  return {std::move(e), std::move(s), std::move(info)};
}

TrainedMethod train_lssvm(const BenchConfig& c, const SplitDataset& split) {
  const auto& l = c.lssvm;
  std::vector<LsSvmParams> params = l.params;
  std::string s = "output,C,sigma2,validation_mse\n";
  if (l.tune) {
    if (split.validation.empty()) throw TrainingError("lssvm tuning needs a validation set");
    params.clear();
    for (std::size_t k = 0; k < split.train.n_out(); ++k) {
      const auto col = static_cast<Eigen::Index>(k);
      const GridTuneResult g =
          grid_tune(split.train.inputs, split.train.targets.col(col), split.validation.inputs,
                    split.validation.targets.col(col), l.sigma2_grid, l.c_grid);
      for (std::size_t i = 0; i < g.c_grid.size(); ++i) {
        for (std::size_t j = 0; j < g.sigma2_grid.size(); ++j) {
          s += std::to_string(k + 1) + "," + format_double(g.c_grid[i]) + "," +
               format_double(g.sigma2_grid[j]) + "," +
               format_double(g.validation_mse(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) +
               "\n";
        }
      }
      params.push_back({g.c, g.sigma2});
    }
  }
  LsSvmMulti model = lssvm_train_multi(split.train, params);
  json chosen = json::array();
  for (std::size_t k = 0; k < params.size(); ++k) {
    chosen.push_back({{"C", params[k].c}, {"sigma2", params[k].sigma2}});
    if (!l.tune) {
      double v = 0.0;
      if (!split.validation.empty()) {
        const Vector p = lssvm_predict_batch(model.outputs[k], split.validation.inputs);
        v = (p - split.validation.targets.col(static_cast<Eigen::Index>(k))).squaredNorm() /
            static_cast<double>(split.validation.size());
      }
      s += std::to_string(k + 1) + "," + format_double(params[k].c) + "," +
           format_double(params[k].sigma2) + "," + format_double(v) + "\n";
    }
  }
  return {std::move(model), std::move(s), {{"params", chosen}, {"tuned", l.tune}}};
}

TrainedMethod train_anfis(const BenchConfig& c, const SplitDataset& split) {
  const auto& a = c.anfis;
  AnfisTrainOptions opt;
  opt.epochs = a.epochs;
  opt.step_size = a.step_size;
  AnfisMulti model;
  std::string s = "output,epoch,train_rmse,validation_rmse\n";
  json best = json::array();
  for (std::size_t k = 0; k < split.train.n_out(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    const AnfisModel init = anfis_init_grid(split.train.inputs, a.mfs_per_input, a.family);
    const Vector val_t = split.validation.empty() ? Vector() : Vector(split.validation.targets.col(col));
    AnfisTrainResult r = anfis_train_hybrid(init, split.train.inputs, split.train.targets.col(col),
                                            split.validation.inputs, val_t, opt);
    for (std::size_t e = 0; e < r.train_rmse.size(); ++e) {
      const double v = e < r.validation_rmse.size() ? r.validation_rmse[e] : 0.0;
      s += std::to_string(k + 1) + "," + std::to_string(e) + "," + format_double(r.train_rmse[e]) +
           "," + format_double(v) + "\n";
    }
    best.push_back(r.best_epoch);
    model.outputs.push_back(std::move(r.model));
  }
  const std::size_t rules = model.outputs.empty() ? 0 : model.outputs.front().rule_count();
  return {std::move(model), std::move(s), {{"rules", rules}, {"best_epoch", best}}};
}

}  // namespace

RngStream method_stream(const std::string& method, std::uint64_t seed) {
  const auto& known = known_methods();
  const auto it = std::find(known.begin(), known.end(), method);
  if (it == known.end()) throw ConfigError("methods", "unknown method '" + method + "'");
  return RngStream(seed).derive(static_cast<std::uint64_t>(it - known.begin()));
}

TrainedMethod train_method(const std::string& method, const BenchConfig& config,
                           const SplitDataset& split) {
  RngStream rng = method_stream(method, config.seed);
  if (split.train.empty()) throw TrainingError(method + ": empty training set");
  if (method == "mlp") return train_mlp(config, split, rng);
  if (method == "rbf") return train_rbf(config, split, rng);
  if (method == "bayesian-mlp") return train_bayesian(config, split, rng);
  if (method == "lssvm") return train_lssvm(config, split);
  if (method == "anfis") return train_anfis(config, split);
  return train_ensemble(method, config, split, rng);
}

}  // namespace steamreg::cli
