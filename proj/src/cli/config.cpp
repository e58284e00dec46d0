#include "steamreg/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace steamreg::cli {
namespace {

using nlohmann::json;

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown fields.
class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(display(), "expected an object");
  }

  ~Section() = default;
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  bool has(const std::string& key) {
    seen_.insert(key);
    return doc_.contains(key) && !doc_.at(key).is_null();
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t min = 0) {
    if (!has(key)) return fallback;
    const json& v = doc_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(field(key), "expected a non-negative integer");
    }
    const auto n = v.get<std::uint64_t>();
    if (n < min) throw ConfigError(field(key), "must be at least " + std::to_string(min));
    return static_cast<std::size_t>(n);
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = doc_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(field(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  double real(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_real(doc_.at(key), field(key));
  }

  double positive(const std::string& key, double fallback) {
    const double v = real(key, fallback);
    if (!(v > 0.0)) throw ConfigError(field(key), "must be positive");
    return v;
  }

  double non_negative(const std::string& key, double fallback) {
    const double v = real(key, fallback);
    if (!(v >= 0.0)) throw ConfigError(field(key), "must be non-negative");
    return v;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!doc_.at(key).is_boolean()) throw ConfigError(field(key), "expected true or false");
    return doc_.at(key).get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!doc_.at(key).is_string()) throw ConfigError(field(key), "expected a string");
    return doc_.at(key).get<std::string>();
  }

  std::vector<double> positive_list(const std::string& key, const std::vector<double>& fallback) {
    if (!has(key)) return fallback;
    const json& v = doc_.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(field(key), "expected a non-empty list");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string where = field(key) + "[" + std::to_string(i) + "]";
      const double x = as_real(v[i], where);
      if (!(x > 0.0)) throw ConfigError(where, "must be positive");
      out.push_back(x);
    }
    return out;
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return doc_.at(key);
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& item : doc_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(field(item.key()), "unknown field");
    }
  }

 private:
  std::string display() const { return path_.empty() ? "config" : path_; }

  static double as_real(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where, "must be finite");
    return x;
  }

  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

SplitRatios parse_ratios(const json& doc, const std::string& path) {
  Section s(doc, path);
  SplitRatios r;
  r.train = s.positive("train", r.train);
  r.validation = s.positive("validation", r.validation);
  r.test = s.positive("test", r.test);
  s.finish();
  if (std::abs(r.train + r.validation + r.test - 1.0) > 1e-9) {
    throw ConfigError(path, "ratios must sum to 1");
  }
  return r;
}

SyntheticSpec parse_synthetic(const json& doc, const std::string& path) {
  Section s(doc, path);
  SyntheticSpec spec;
  spec.count = s.count("count", spec.count, 10);
  spec.noise = s.non_negative("noise", spec.noise);
  spec.seed = s.seed("seed", spec.seed);
  s.finish();
  return spec;
}

DataConfig parse_data(const json& doc) {
  Section s(doc, "data");
  DataConfig d;
  d.input = s.string("input", d.input);
  d.prepared = s.string("prepared", d.prepared);
  if (s.has("synthetic")) d.synthetic = parse_synthetic(s.raw("synthetic"), s.field("synthetic"));
  if (s.has("ratios")) d.ratios = parse_ratios(s.raw("ratios"), s.field("ratios"));
  d.seed = s.seed("seed", d.seed);
  d.train_only_scaling = s.boolean("train_only_scaling", d.train_only_scaling);
  s.finish();
  if (!d.input.empty() && d.synthetic) {
    throw ConfigError("data", "give either input or synthetic, not both");
  }
  return d;
}

std::vector<std::string> parse_methods(const json& doc) {
  if (!doc.is_array() || doc.empty()) throw ConfigError("methods", "expected a non-empty list");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "methods[" + std::to_string(i) + "]";
    if (!doc[i].is_string()) throw ConfigError(where, "expected a method name");
    const auto name = doc[i].get<std::string>();
    const auto& known = known_methods();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ConfigError(where, "unknown method '" + name + "'");
    }
    if (std::find(out.begin(), out.end(), name) != out.end()) {
      throw ConfigError(where, "method '" + name + "' listed twice");
    }
    out.push_back(name);
  }
  return out;
}

MlpConfig parse_mlp(const json& doc) {
  Section s(doc, "mlp");
  MlpConfig c;
  c.hidden = s.count("hidden", c.hidden, 1);
  c.max_cycles = s.count("max_cycles", c.max_cycles, 1);
  c.alpha = s.non_negative("alpha", c.alpha);
  c.patience = s.count("patience", c.patience);
  c.eval_every = s.count("eval_every", c.eval_every, 1);
  s.finish();
  return c;
}

RbfConfig parse_rbf(const json& doc) {
  Section s(doc, "rbf");
  RbfConfig c;
  c.centers = s.count("centers", c.centers, 1);
  c.kmeans_iters = s.count("kmeans_iters", c.kmeans_iters, 1);
  s.finish();
  return c;
}

EnsembleConfig parse_ensemble(const json& doc, const std::string& path) {
  Section s(doc, path);
  EnsembleConfig c;
  c.members = s.count("members", c.members, 1);
  s.finish();
  return c;
}

BayesConfig parse_bayes(const json& doc) {
  Section s(doc, "bayesian");
  BayesConfig c;
  c.hidden = s.count("hidden", c.hidden, 1);
  c.step_size = s.positive("step_size", c.step_size);
  c.leapfrog_steps = s.count("leapfrog_steps", c.leapfrog_steps, 1);
  c.burn_in = s.count("burn_in", c.burn_in);
  c.retained = s.count("retained", c.retained, 1);
  c.alpha = s.positive("alpha", c.alpha);
  c.beta = s.positive("beta", c.beta);
  c.init = s.string("init", c.init);
  if (c.init != "map" && c.init != "random") {
    throw ConfigError(s.field("init"), "expected \"map\" or \"random\"");
  }
  s.finish();
  return c;
}

LsSvmConfig parse_lssvm(const json& doc) {
  Section s(doc, "lssvm");
  LsSvmConfig c;
  if (s.has("params")) {
    const json& list = s.raw("params");
    if (!list.is_array() || list.empty()) {
      throw ConfigError(s.field("params"), "expected a non-empty list");
    }
    c.params.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      Section item(list[i], s.field("params") + "[" + std::to_string(i) + "]");
      LsSvmParams p;
      p.c = item.positive("C", p.c);
      p.sigma2 = item.positive("sigma2", p.sigma2);
      item.finish();
      c.params.push_back(p);
    }
  }
  c.tune = s.boolean("tune", c.tune);
  c.c_grid = s.positive_list("c_grid", c.c_grid);
  c.sigma2_grid = s.positive_list("sigma2_grid", c.sigma2_grid);
  s.finish();
  return c;
}

AnfisConfig parse_anfis(const json& doc) {
  Section s(doc, "anfis");
  AnfisConfig c;
  c.mfs_per_input = s.count("mfs_per_input", c.mfs_per_input, 1);
  if (s.has("family")) {
    const auto name = s.string("family", "");
    try {
      c.family = parse_mf_family(name);
    } catch (const InvalidArgument&) {
      throw ConfigError(s.field("family"), "unknown membership function family '" + name + "'");
    }
  }
  c.epochs = s.count("epochs", c.epochs);
  c.step_size = s.positive("step_size", c.step_size);
  s.finish();
  return c;
}

}  // namespace

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names = {
      "mlp",         "rbf",         "committee-mlp", "committee-rbf", "bagging-mlp",
      "bagging-rbf", "bayesian-mlp", "lssvm",        "anfis",
  };
  return names;
}

BenchConfig parse_config(const json& doc) {
  Section s(doc, "");
  BenchConfig c;
  if (s.has("data")) c.data = parse_data(s.raw("data"));
  c.methods = s.has("methods") ? parse_methods(s.raw("methods")) : known_methods();
  c.seed = s.seed("seed", c.seed);
  if (s.has("mlp")) c.mlp = parse_mlp(s.raw("mlp"));
  if (s.has("rbf")) c.rbf = parse_rbf(s.raw("rbf"));
  if (s.has("committee")) c.committee = parse_ensemble(s.raw("committee"), "committee");
  if (s.has("bagging")) c.bagging = parse_ensemble(s.raw("bagging"), "bagging");
  if (s.has("bayesian")) c.bayesian = parse_bayes(s.raw("bayesian"));
  if (s.has("lssvm")) c.lssvm = parse_lssvm(s.raw("lssvm"));
  if (s.has("anfis")) c.anfis = parse_anfis(s.raw("anfis"));
  c.output_dir = s.string("output_dir", c.output_dir);
  s.finish();
  return c;
}

BenchConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream text;
  text << in.rdbuf();
  json doc;
  try {
    doc = json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("not valid JSON (") + e.what() + ")");
  }
  return parse_config(doc);
}

nlohmann::json config_to_json(const BenchConfig& c) {
  json d;
  d["input"] = c.data.input;
  d["prepared"] = c.data.prepared;
  if (c.data.synthetic) {
    d["synthetic"] = {{"count", c.data.synthetic->count},
                      {"noise", c.data.synthetic->noise},
                      {"seed", c.data.synthetic->seed}};
  }
  d["ratios"] = {{"train", c.data.ratios.train},
                 {"validation", c.data.ratios.validation},
                 {"test", c.data.ratios.test}};
  d["seed"] = c.data.seed;
  d["train_only_scaling"] = c.data.train_only_scaling;

  json lssvm_params = json::array();
  for (const auto& p : c.lssvm.params) lssvm_params.push_back({{"C", p.c}, {"sigma2", p.sigma2}});

  return {
      {"data", d},
      {"methods", c.methods},
      {"seed", c.seed},
      {"mlp",
       {{"hidden", c.mlp.hidden},
        {"max_cycles", c.mlp.max_cycles},
        {"alpha", c.mlp.alpha},
        {"patience", c.mlp.patience},
        {"eval_every", c.mlp.eval_every}}},
      {"rbf", {{"centers", c.rbf.centers}, {"kmeans_iters", c.rbf.kmeans_iters}}},
      {"committee", {{"members", c.committee.members}}},
      {"bagging", {{"members", c.bagging.members}}},
      {"bayesian",
       {{"hidden", c.bayesian.hidden},
        {"step_size", c.bayesian.step_size},
        {"leapfrog_steps", c.bayesian.leapfrog_steps},
        {"burn_in", c.bayesian.burn_in},
        {"retained", c.bayesian.retained},
        {"alpha", c.bayesian.alpha},
        {"beta", c.bayesian.beta},
        {"init", c.bayesian.init}}},
      {"lssvm",
       {{"params", lssvm_params},
        {"tune", c.lssvm.tune},
        {"c_grid", c.lssvm.c_grid},
        {"sigma2_grid", c.lssvm.sigma2_grid}}},
      {"anfis",
       {{"mfs_per_input", c.anfis.mfs_per_input},
        {"family", std::string(mf_family_name(c.anfis.family))},
        {"epochs", c.anfis.epochs},
        {"step_size", c.anfis.step_size}}},
      {"output_dir", c.output_dir},
  };
}

void validate_against_data(const BenchConfig& c, std::size_t train_rows, std::size_t outputs) {
  auto uses = [&](const std::string& m) {
    return std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end();
  };
  if ((uses("rbf") || uses("committee-rbf") || uses("bagging-rbf")) && c.rbf.centers > train_rows) {
    throw ConfigError("rbf.centers", "exceeds the " + std::to_string(train_rows) +
                                         " training rows");
  }
  if (uses("lssvm") && !c.lssvm.tune && c.lssvm.params.size() != outputs) {
    throw ConfigError("lssvm.params", "needs one entry per output (" + std::to_string(outputs) +
                                          "), found " + std::to_string(c.lssvm.params.size()));
  }
}

}  // namespace steamreg::cli
