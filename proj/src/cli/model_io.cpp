#include "steamreg/cli/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "steamreg/data.hpp"
#include "steamreg/errors.hpp"

namespace steamreg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json flat(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json rows(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(std::string("model file: missing field \"") + key + "\"");
  }
  return j.at(key);
}

std::size_t count_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_unsigned()) {
    throw SchemaError(std::string("model file: \"") + key + "\" must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double real_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw SchemaError(std::string("model file: \"") + key + "\" must be a number");
  return v.get<double>();
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw SchemaError(std::string("model file: \"") + key + "\" must be a string");
  return v.get<std::string>();
}

Vector read_flat(const json& v, std::size_t expected, const char* what) {
  if (!v.is_array() || v.size() != expected) {
    throw SchemaError(std::string("model file: \"") + what + "\" must hold " +
                      std::to_string(expected) + " numbers");
  }
  Vector out(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) {
    if (!v[i].is_number()) throw SchemaError(std::string("model file: non-numeric entry in \"") + what + "\"");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Matrix read_rows(const json& v, std::size_t r, std::size_t c, const char* what) {
  if (!v.is_array() || v.size() != r) {
    throw SchemaError(std::string("model file: \"") + what + "\" must have " + std::to_string(r) + " rows");
  }
  Matrix out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    out.row(static_cast<Eigen::Index>(i)) = read_flat(v[i], c, what).transpose();
  }
  return out;
}

void expect_kind(const json& j, std::string_view kind) {
  const std::string got = string_field(j, "kind");
  if (got != kind) {
    throw SchemaError("model file: expected kind \"" + std::string(kind) + "\", found \"" + got + "\"");
  }
}

std::string member_name(const char* prefix, std::size_t i, std::size_t width) {
  std::string n = std::to_string(i);
  if (n.size() < width) n.insert(0, width - n.size(), '0');
  return prefix + n + ".json";
}

template <class M>
json committee_manifest(const Committee<M>& c, std::string_view member_kind) {
  json files = json::array();
  for (std::size_t i = 0; i < c.members.size(); ++i) files.push_back(member_name("member_", i, 2));
  json m = {{"kind", "committee"}, {"member_kind", member_kind}, {"members", files}};
  if (!c.weights.empty()) {
    json w = json::array();
    for (double x : c.weights) w.push_back(x);
    m["weights"] = w;
  }
  return m;
}

template <class M, class Read>
Committee<M> read_committee(const fs::path& dir, const json& manifest, Read&& read) {
  Committee<M> c;
  const json& files = field(manifest, "members");
  if (!files.is_array() || files.empty()) throw SchemaError("model file: committee has no members");
  for (const json& f : files) {
    if (!f.is_string()) throw SchemaError("model file: member entries must be file names");
    c.members.push_back(read(read_json(dir / f.get<std::string>())));
  }
  if (manifest.contains("weights")) {
    const Vector w = read_flat(manifest.at("weights"), c.members.size(), "weights");
    c.weights.assign(w.data(), w.data() + w.size());
  }
  return c;
}

template <class M, class Read>
std::vector<M> read_outputs(const fs::path& dir, const json& manifest, Read&& read) {
  std::vector<M> out;
  const json& files = field(manifest, "outputs");
  if (!files.is_array() || files.empty()) throw SchemaError("model file: no output models listed");
  for (const json& f : files) {
    if (!f.is_string()) throw SchemaError("model file: output entries must be file names");
    out.push_back(read(read_json(dir / f.get<std::string>())));
  }
  return out;
}

template <class M>
json outputs_manifest(std::string_view kind, const std::vector<M>& models) {
  json files = json::array();
  for (std::size_t i = 0; i < models.size(); ++i) files.push_back(member_name("output_", i + 1, 1));
  return {{"kind", kind}, {"outputs", files}};
}

std::vector<double> read_trace(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<double> out;
  std::string line;
  std::getline(in, line);
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(path.string() + ": malformed energy trace", n);
    const char* last = line.data() + line.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data() + comma + 1, last, v);
    if (ec != std::errc() || ptr != last) {
      throw ParseError(path.string() + ": malformed energy trace", n);
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json to_json(const MlpModel& m) {
  const auto& s = m.shape;
  const auto h = static_cast<Eigen::Index>(s.n_hidden);
  const auto n = static_cast<Eigen::Index>(s.n_in);
  const auto o = static_cast<Eigen::Index>(s.n_out);
  const Vector& p = m.params;
  return {{"kind", "mlp"},
          {"n_in", s.n_in},
          {"n_hidden", s.n_hidden},
          {"n_out", s.n_out},
          {"hidden_activation", MlpModel::hidden_activation},
          {"output_activation", MlpModel::output_activation},
          {"w1", flat(p.segment(0, h * n))},
          {"b1", flat(p.segment(h * n, h))},
          {"w2", flat(p.segment(h * n + h, o * h))},
          {"b2", flat(p.segment(h * n + h + o * h, o))}};
}

MlpModel mlp_from_json(const json& j) {
  expect_kind(j, "mlp");
  MlpShape s{count_field(j, "n_in"), count_field(j, "n_hidden"), count_field(j, "n_out")};
  if (string_field(j, "hidden_activation") != MlpModel::hidden_activation ||
      string_field(j, "output_activation") != MlpModel::output_activation) {
    throw SchemaError("model file: unsupported activation");
  }
  MlpModel m(s);
  const std::size_t h = s.n_hidden, n = s.n_in, o = s.n_out;
  m.params << read_flat(field(j, "w1"), h * n, "w1"), read_flat(field(j, "b1"), h, "b1"),
      read_flat(field(j, "w2"), o * h, "w2"), read_flat(field(j, "b2"), o, "b2");
  return m;
}

json to_json(const RbfModel& m) {
  return {{"kind", "rbf"},
          {"n_in", m.n_in()},
          {"hidden", m.hidden()},
          {"n_out", m.n_out()},
          {"basis", "gaussian"},
          {"centers", rows(m.centers)},
          {"widths", flat(m.widths)},
          {"weights", rows(m.weights)},
          {"bias", flat(m.bias)}};
}

RbfModel rbf_from_json(const json& j) {
  expect_kind(j, "rbf");
  const std::size_t n = count_field(j, "n_in"), h = count_field(j, "hidden"), o = count_field(j, "n_out");
  if (string_field(j, "basis") != "gaussian") throw SchemaError("model file: unsupported basis");
  RbfModel m;
  m.centers = read_rows(field(j, "centers"), h, n, "centers");
  m.widths = read_flat(field(j, "widths"), h, "widths");
  m.weights = read_rows(field(j, "weights"), o, h, "weights");
  m.bias = read_flat(field(j, "bias"), o, "bias");
  for (Eigen::Index i = 0; i < m.widths.size(); ++i) {
    if (!(m.widths[i] > 0.0)) throw SchemaError("model file: widths must be positive");
  }
  return m;
}

json to_json(const LsSvmModel& m) {
  return {{"kind", "lssvm"},
          {"kernel", kernel_name(m.kernel)},
          {"sigma2", m.sigma2},
          {"C", m.c},
          {"bias", m.bias},
          {"n_in", static_cast<std::size_t>(m.support.cols())},
          {"n_support", static_cast<std::size_t>(m.support.rows())},
          {"coef", flat(m.coef)},
          {"support", rows(m.support)}};
}

LsSvmModel lssvm_from_json(const json& j) {
  expect_kind(j, "lssvm");
  LsSvmModel m;
  try {
    m.kernel = parse_kernel(string_field(j, "kernel"));
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("model file: ") + e.what());
  }
  m.sigma2 = real_field(j, "sigma2");
  m.c = real_field(j, "C");
  m.bias = real_field(j, "bias");
  const std::size_t n = count_field(j, "n_in"), s = count_field(j, "n_support");
  m.coef = read_flat(field(j, "coef"), s, "coef");
  m.support = read_rows(field(j, "support"), s, n, "support");
  return m;
}

json to_json(const AnfisModel& m) {
  json inputs = json::array();
  for (std::size_t i = 0; i < m.n_in; ++i) {
    json mfs = json::array();
    for (std::size_t k = 0; k < m.mfs_per_input; ++k) {
      const auto& mf = m.mf(i, k);
      json p = json::array();
      for (double v : mf.params) p.push_back(v);
      mfs.push_back({{"family", mf_family_name(mf.family)}, {"params", p}});
    }
    inputs.push_back({{"mfs", mfs}});
  }
  json rules = json::array();
  for (std::size_t r = 0; r < m.rule_count(); ++r) {
    json terms = json::array();
    for (std::size_t i = 0; i < m.n_in; ++i) terms.push_back(m.term(r, i));
    rules.push_back(terms);
  }
  return {{"kind", "anfis"},
          {"n_in", m.n_in},
          {"mfs_per_input", m.mfs_per_input},
          {"and", "product"},
          {"inputs", inputs},
          {"rules", rules},
          {"consequents", rows(m.consequents)}};
}

AnfisModel anfis_from_json(const json& j) {
  expect_kind(j, "anfis");
  if (string_field(j, "and") != "product") throw SchemaError("model file: unsupported AND operator");
  AnfisModel m;
  m.n_in = count_field(j, "n_in");
  m.mfs_per_input = count_field(j, "mfs_per_input");
  if (m.n_in == 0 || m.mfs_per_input == 0) throw SchemaError("model file: empty fuzzy system");
  const json& inputs = field(j, "inputs");
  if (!inputs.is_array() || inputs.size() != m.n_in) {
    throw SchemaError("model file: \"inputs\" must list every input");
  }
  for (std::size_t i = 0; i < m.n_in; ++i) {
    const json& mfs = field(inputs[i], "mfs");
    if (!mfs.is_array() || mfs.size() != m.mfs_per_input) {
      throw SchemaError("model file: wrong membership function count for input " + std::to_string(i));
    }
    for (const json& e : mfs) {
      MembershipFunction mf;
      try {
        mf.family = parse_mf_family(string_field(e, "family"));
      } catch (const InvalidArgument& err) {
        throw SchemaError(std::string("model file: ") + err.what());
      }
      const json& p = field(e, "params");
      const Vector v = read_flat(p, p.is_array() ? p.size() : 0, "params");
      mf.params.assign(v.data(), v.data() + v.size());
      mf.input = i;
      if (!membership_valid(mf)) throw SchemaError("model file: invalid membership parameters");
      m.mfs.push_back(std::move(mf));
    }
  }
  const std::size_t rules = m.rule_count();
  const json& table = field(j, "rules");
  if (!table.is_array() || table.size() != rules) throw SchemaError("model file: rule table size mismatch");
  for (std::size_t r = 0; r < rules; ++r) {
    const Vector t = read_flat(table[r], m.n_in, "rules");
    for (std::size_t i = 0; i < m.n_in; ++i) {
      if (t[static_cast<Eigen::Index>(i)] != static_cast<double>(m.term(r, i))) {
        throw SchemaError("model file: rule table is not a grid partition");
      }
    }
  }
  m.consequents = read_rows(field(j, "consequents"), rules, m.n_in + 1, "consequents");
  return m;
}

void save_model(const fs::path& dir, const TrainedModel& model) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MlpModel> || std::is_same_v<T, RbfModel>) {
          write_text(dir / "model.json", dump_json(to_json(m)));
        } else if constexpr (std::is_same_v<T, Committee<MlpModel>> ||
                             std::is_same_v<T, Committee<RbfModel>>) {
          const bool mlp = std::is_same_v<T, Committee<MlpModel>>;
          write_text(dir / "manifest.json", dump_json(committee_manifest(m, mlp ? "mlp" : "rbf")));
          for (std::size_t i = 0; i < m.members.size(); ++i) {
            write_text(dir / member_name("member_", i, 2), dump_json(to_json(m.members[i])));
          }
        } else if constexpr (std::is_same_v<T, PosteriorEnsemble>) {
          const json manifest = {{"kind", "bayesian-mlp"},
                                 {"n_in", m.shape.n_in},
                                 {"n_hidden", m.shape.n_hidden},
                                 {"n_out", m.shape.n_out},
                                 {"hidden_activation", MlpModel::hidden_activation},
                                 {"output_activation", MlpModel::output_activation},
                                 {"sample_count", m.samples.size()},
                                 {"acceptance_rate", m.acceptance_rate},
                                 {"samples", "samples.json"},
                                 {"energy_trace", "energy_trace.csv"}};
          write_text(dir / "manifest.json", dump_json(manifest));
          json samples = json::array();
          for (const auto& s : m.samples) samples.push_back(flat(s));
          write_text(dir / "samples.json", dump_json(samples));
          std::string trace = "transition,energy\n";
          for (std::size_t i = 0; i < m.energy_trace.size(); ++i) {
            trace += std::to_string(i) + "," + format_double(m.energy_trace[i]) + "\n";
          }
          write_text(dir / "energy_trace.csv", trace);
        } else {
          const bool lssvm = std::is_same_v<T, LsSvmMulti>;
          write_text(dir / "manifest.json",
                     dump_json(outputs_manifest(lssvm ? "lssvm-multi" : "anfis-multi", m.outputs)));
          for (std::size_t i = 0; i < m.outputs.size(); ++i) {
            write_text(dir / member_name("output_", i + 1, 1), dump_json(to_json(m.outputs[i])));
          }
        }
      },
      model);
}

TrainedModel load_model(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("model directory not found: " + dir.string());
  if (!fs::exists(dir / "manifest.json")) {
    const json j = read_json(dir / "model.json");
    const std::string kind = string_field(j, "kind");
    if (kind == "mlp") return mlp_from_json(j);
    if (kind == "rbf") return rbf_from_json(j);
    throw SchemaError("model file: unknown kind \"" + kind + "\"");
  }
  const json manifest = read_json(dir / "manifest.json");
  const std::string kind = string_field(manifest, "kind");
  if (kind == "committee") {
    const std::string member = string_field(manifest, "member_kind");
    if (member == "mlp") return read_committee<MlpModel>(dir, manifest, mlp_from_json);
    if (member == "rbf") return read_committee<RbfModel>(dir, manifest, rbf_from_json);
    throw SchemaError("model file: unknown member kind \"" + member + "\"");
  }
  if (kind == "bayesian-mlp") {
    PosteriorEnsemble e;
    e.shape = {count_field(manifest, "n_in"), count_field(manifest, "n_hidden"),
               count_field(manifest, "n_out")};
    e.acceptance_rate = real_field(manifest, "acceptance_rate");
    const json samples = read_json(dir / string_field(manifest, "samples"));
    if (!samples.is_array() || samples.size() != count_field(manifest, "sample_count")) {
      throw SchemaError("model file: sample count mismatch");
    }
    for (const json& s : samples) e.samples.push_back(read_flat(s, e.shape.param_count(), "samples"));
    e.energy_trace = read_trace(dir / string_field(manifest, "energy_trace"));
    return e;
  }
  if (kind == "lssvm-multi") return LsSvmMulti{read_outputs<LsSvmModel>(dir, manifest, lssvm_from_json)};
  if (kind == "anfis-multi") return AnfisMulti{read_outputs<AnfisModel>(dir, manifest, anfis_from_json)};
  throw SchemaError("model file: unknown kind \"" + kind + "\"");
}

Matrix predict_model(const TrainedModel& model, const Matrix& inputs, Exec exec) {
  return std::visit(
      [&](const auto& m) -> Matrix {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MlpModel>) {
          return mlp_predict(m, inputs, exec);
        } else if constexpr (std::is_same_v<T, RbfModel>) {
          return rbf_predict(m, inputs, exec);
        } else if constexpr (std::is_same_v<T, PosteriorEnsemble>) {
          return bayesian_predict_batch(m, inputs, exec);
        } else if constexpr (std::is_same_v<T, LsSvmMulti>) {
          return lssvm_predict_multi(m, inputs, exec);
        } else if constexpr (std::is_same_v<T, AnfisMulti>) {
          return anfis_predict_multi(m, inputs, exec);
        } else {
          return predict_batch(m, inputs, exec);
        }
      },
      model);
}

std::size_t model_outputs(const TrainedModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MlpModel>) {
          return m.shape.n_out;
        } else if constexpr (std::is_same_v<T, RbfModel>) {
          return m.n_out();
        } else if constexpr (std::is_same_v<T, PosteriorEnsemble>) {
          return m.shape.n_out;
        } else if constexpr (std::is_same_v<T, LsSvmMulti> || std::is_same_v<T, AnfisMulti>) {
          return m.outputs.size();
        } else {
          return m.members.empty() ? 0 : model_outputs(TrainedModel(m.members.front()));
        }
      },
      model);
}

}  // namespace steamreg::cli
