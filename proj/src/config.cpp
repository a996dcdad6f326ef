#include "advsysid/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "advsysid/report_io.hpp"

namespace advsysid {

namespace {

const std::vector<std::size_t> kLongCheckpoints{125, 250, 500, 1000, 2000, 4000, 8000};

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where.empty() ? "config" : where, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field, const char* expected) {
  if (!node.IsScalar()) throw ConfigError(field, std::string("expected ") + expected);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, std::string("expected ") + expected + ", got '" + node.Scalar() + "'");
  }
}

double number(const YAML::Node& node, const std::string& field) {
  const double v = scalar<double>(node, field, "a number");
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

std::size_t count(const YAML::Node& node, const std::string& field) {
  const auto v = scalar<long long>(node, field, "a non-negative integer");
  if (v < 0) throw ConfigError(field, "must be >= 0");
  return static_cast<std::size_t>(v);
}

bool boolean(const YAML::Node& node, const std::string& field) { return scalar<bool>(node, field, "true or false"); }

std::string text(const YAML::Node& node, const std::string& field) {
  return scalar<std::string>(node, field, "a string");
}

template <typename F>
auto list(const YAML::Node& node, const std::string& field, F&& item) {
  if (!node.IsSequence()) throw ConfigError(field, "expected a list");
  std::vector<decltype(item(node, field))> out;
  for (std::size_t k = 0; k < node.size(); ++k) out.push_back(item(node[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

std::pair<double, double> range(const YAML::Node& node, const std::string& field) {
  auto v = list(node, field, number);
  if (v.size() != 2) throw ConfigError(field, "expected [lo, hi]");
  return {v[0], v[1]};
}

DisturbanceModel default_model(DisturbanceKind kind, double p, const std::string& field) {
  switch (kind) {
    case DisturbanceKind::Zero: return zero_model();
    case DisturbanceKind::IidGaussian: return iid_gaussian_model(p);
    case DisturbanceKind::SignRestricted: return example1_model(p);
    case DisturbanceKind::ArbitraryNoncentral: return example2_model(p);
    case DisturbanceKind::ScriptedAdversary: break;
  }
  throw ConfigError(field, "scripted disturbances need a rule (supported: remark1)");
}

void apply_disturbance(const YAML::Node& node, RunConfig& c) {
  check_keys(node, "disturbance",
             {"kind", "p", "rule", "mean", "variance", "gamma_neg", "gamma_pos", "shared_gamma", "beta_bound",
              "scale", "offset", "declared_sigma_w", "declared_lambda", "label"});
  DisturbanceModel& m = c.model;
  const double p = node["p"] ? number(node["p"], "disturbance.p") : m.p;
  if (node["kind"]) {
    const auto name = text(node["kind"], "disturbance.kind");
    DisturbanceKind kind;
    try {
      kind = disturbance_kind_from_string(name);
    } catch (const InvalidInput&) {
      throw ConfigError("disturbance.kind",
                        "unknown kind '" + name +
                            "' (expected zero, iid_gaussian, sign_restricted, arbitrary_noncentral or scripted)");
    }
    if (kind == DisturbanceKind::ScriptedAdversary) {
      const auto rule = node["rule"] ? text(node["rule"], "disturbance.rule") : std::string("remark1");
      if (rule != "remark1") throw ConfigError("disturbance.rule", "unknown rule '" + rule + "' (supported: remark1)");
      m = remark1_model();
    } else if (kind != m.kind) {
      m = default_model(kind, p, "disturbance.kind");
    }
  } else if (node["rule"] && m.kind != DisturbanceKind::ScriptedAdversary) {
    throw ConfigError("disturbance.rule", "only valid for kind scripted");
  }
  m.p = p;
  if (m.kind == DisturbanceKind::Zero && node["p"] && p != 0.0) {
    throw ConfigError("disturbance.p", "must be 0 for kind zero");
  }

  auto only_for = [&](const char* key, std::initializer_list<DisturbanceKind> kinds) {
    if (!node[key]) return false;
    if (std::find(kinds.begin(), kinds.end(), m.kind) == kinds.end()) {
      throw ConfigError(std::string("disturbance.") + key, "not valid for kind " + to_string(m.kind));
    }
    return true;
  };
  using K = DisturbanceKind;
  if (only_for("mean", {K::IidGaussian})) m.gaussian.mean = number(node["mean"], "disturbance.mean");
  if (only_for("variance", {K::IidGaussian, K::ArbitraryNoncentral})) {
    const double v = number(node["variance"], "disturbance.variance");
    if (v < 0.0) throw ConfigError("disturbance.variance", "must be >= 0");
    (m.kind == K::IidGaussian ? m.gaussian.variance : m.noncentral.variance) = v;
  }
  if (m.kind == K::IidGaussian && (node["mean"] || node["variance"])) {
    const auto base = iid_gaussian_model(m.p, m.gaussian.mean, m.gaussian.variance);
    m.declared_sigma_w = base.declared_sigma_w;
    m.declared_lambda = base.declared_lambda;
  }
  if (only_for("gamma_neg", {K::SignRestricted})) {
    std::tie(m.sign_restricted.neg_lo, m.sign_restricted.neg_hi) = range(node["gamma_neg"], "disturbance.gamma_neg");
  }
  if (only_for("gamma_pos", {K::SignRestricted})) {
    std::tie(m.sign_restricted.pos_lo, m.sign_restricted.pos_hi) = range(node["gamma_pos"], "disturbance.gamma_pos");
  }
  if (m.kind == K::SignRestricted && (node["gamma_neg"] || node["gamma_pos"])) {
    m.beta_bound = std::max(std::abs(m.sign_restricted.neg_lo), std::abs(m.sign_restricted.pos_hi));
    m.declared_sigma_w = m.beta_bound;
  }
  if (only_for("shared_gamma", {K::SignRestricted})) {
    m.sign_restricted.shared_gamma = boolean(node["shared_gamma"], "disturbance.shared_gamma");
  }
  if (only_for("beta_bound", {K::SignRestricted})) m.beta_bound = number(node["beta_bound"], "disturbance.beta_bound");
  if (only_for("scale", {K::ArbitraryNoncentral})) m.noncentral.scale = number(node["scale"], "disturbance.scale");
  if (only_for("offset", {K::ArbitraryNoncentral})) m.noncentral.offset = number(node["offset"], "disturbance.offset");
  if (node["declared_sigma_w"]) m.declared_sigma_w = number(node["declared_sigma_w"], "disturbance.declared_sigma_w");
  if (node["declared_lambda"]) m.declared_lambda = number(node["declared_lambda"], "disturbance.declared_lambda");
  if (node["label"]) m.label = text(node["label"], "disturbance.label");
}

void apply_system(const YAML::Node& node, RunConfig& c) {
  check_keys(node, "system", {"d", "target_norm", "a_star", "x0"});
  if (node["d"]) {
    const auto d = count(node["d"], "system.d");
    if (d != c.d) {
      c.a_star.reset();
      c.x0.reset();
    }
    c.d = d;
  }
  if (node["target_norm"]) c.target_norm = number(node["target_norm"], "system.target_norm");
  if (node["a_star"]) {
    const auto& a = node["a_star"];
    if (a.IsNull()) {
      c.a_star.reset();
    } else {
      auto rows = list(a, "system.a_star", [](const YAML::Node& r, const std::string& f) { return list(r, f, number); });
      if (rows.empty()) throw ConfigError("system.a_star", "must be a nonempty list of rows");
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].size() != rows.size()) {
          throw ConfigError("system.a_star[" + std::to_string(k) + "]", "matrix must be square");
        }
      }
      c.a_star = Matrix::from_rows(rows);
      if (!node["d"]) c.d = rows.size();
    }
  }
  if (node["x0"]) {
    if (node["x0"].IsNull()) c.x0.reset();
    else c.x0 = list(node["x0"], "system.x0", number);
  }
}

void apply_experiment(const YAML::Node& node, RunConfig& c) {
  check_keys(node, "experiment",
             {"checkpoints", "trials", "recovery_tol", "confidence_delta", "estimators", "p_values", "d_values"});
  if (node["checkpoints"]) c.checkpoints = list(node["checkpoints"], "experiment.checkpoints", count);
  if (node["trials"]) c.trials = count(node["trials"], "experiment.trials");
  if (node["recovery_tol"]) c.recovery_tol = number(node["recovery_tol"], "experiment.recovery_tol");
  if (node["confidence_delta"]) c.confidence_delta = number(node["confidence_delta"], "experiment.confidence_delta");
  if (node["estimators"]) {
    c.estimators = list(node["estimators"], "experiment.estimators", [](const YAML::Node& n, const std::string& f) {
      const auto name = text(n, f);
      try {
        return method_from_string(name);
      } catch (const InvalidInput&) {
        throw ConfigError(f, "unknown estimator '" + name + "' (expected ols, l2norm or l1)");
      }
    });
  }
  if (node["p_values"]) c.p_values = list(node["p_values"], "experiment.p_values", number);
  if (node["d_values"]) c.d_values = list(node["d_values"], "experiment.d_values", count);
}

void apply_certify(const YAML::Node& node, RunConfig& c) {
  check_keys(node, "certify", {"epsilon", "sampled"});
  if (node["epsilon"]) {
    const auto& e = node["epsilon"];
    if (e.IsNull() || (e.IsScalar() && e.Scalar() == "auto")) c.epsilon.reset();
    else c.epsilon = number(e, "certify.epsilon");
  }
  if (node["sampled"]) c.sampled = count(node["sampled"], "certify.sampled");
}

RunConfig from_yaml(const YAML::Node& root_in) {
  YAML::Node root = root_in;
  if (root.IsMap() && root["config"]) root = root["config"];
  if (root.IsNull()) return RunConfig{};
  check_keys(root, "", {"preset", "seed", "system", "disturbance", "simulate", "experiment", "certify"});

  RunConfig c;
  if (root["preset"]) {
    const auto name = text(root["preset"], "preset");
    try {
      c = preset_config(name);
    } catch (const InvalidInput&) {
      throw ConfigError("preset", "unknown preset '" + name + "' (expected example1, example2, remark1 or gaussian)");
    }
  }
  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed", "a non-negative integer");
  if (root["system"]) apply_system(root["system"], c);
  if (root["disturbance"]) apply_disturbance(root["disturbance"], c);
  if (root["simulate"]) {
    check_keys(root["simulate"], "simulate", {"T"});
    if (root["simulate"]["T"]) c.horizon = count(root["simulate"]["T"], "simulate.T");
  }
  if (root["experiment"]) apply_experiment(root["experiment"], c);
  if (root["certify"]) apply_certify(root["certify"], c);
  c.validate();
  return c;
}

}  // namespace

void RunConfig::validate() const {
  if (d < 1) throw ConfigError("system.d", "must be >= 1");
  if (!a_star && !(target_norm > 0.0 && target_norm < 1.0)) {
    throw ConfigError("system.target_norm", "must lie in (0, 1)");
  }
  if (a_star) {
    if (a_star->rows() != d || a_star->cols() != d) throw ConfigError("system.a_star", "must be d x d");
    if (!a_star->all_finite()) throw ConfigError("system.a_star", "entries must be finite");
    if (!(spectral_norm(*a_star) < 1.0)) throw ConfigError("system.a_star", "operator norm must be < 1");
  }
  if (x0 && x0->size() != d) throw ConfigError("system.x0", "must have d entries");
  try {
    model.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError("disturbance", e.what());
  }
  if (model.required_dim != 0 && model.required_dim != d) {
    throw ConfigError("system.d", "disturbance " + model.label + " requires d = " + std::to_string(model.required_dim));
  }
  if (horizon < 1) throw ConfigError("simulate.T", "must be >= 1");
  if (checkpoints.empty()) throw ConfigError("experiment.checkpoints", "must be nonempty");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] < 1) throw ConfigError("experiment.checkpoints", "entries must be >= 1");
    if (k > 0 && checkpoints[k] <= checkpoints[k - 1]) {
      throw ConfigError("experiment.checkpoints", "must be strictly increasing");
    }
  }
  if (trials < 1) throw ConfigError("experiment.trials", "must be >= 1");
  if (!(recovery_tol > 0.0)) throw ConfigError("experiment.recovery_tol", "must be > 0");
  if (!(confidence_delta > 0.0 && confidence_delta <= 1.0)) {
    throw ConfigError("experiment.confidence_delta", "must lie in (0, 1]");
  }
  if (estimators.empty()) throw ConfigError("experiment.estimators", "must list at least one estimator");
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("experiment.p_values", "entries must lie in [0, 1]");
  }
  for (std::size_t v : d_values) {
    if (v < 1) throw ConfigError("experiment.d_values", "entries must be >= 1");
    if (model.required_dim != 0 && v != model.required_dim) {
      throw ConfigError("experiment.d_values", "disturbance " + model.label + " requires d = " +
                                                   std::to_string(model.required_dim));
    }
  }
  if (epsilon && !(*epsilon > 0.0)) throw ConfigError("certify.epsilon", "must be > 0");
}

std::vector<std::string> preset_names() { return {"example1", "example2", "remark1", "gaussian"}; }

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "example1") {
    c.d = 10;
    c.target_norm = 0.6;
    c.model = example1_model(0.7);
    c.horizon = 4000;
    c.p_values = {0.7, 0.75, 0.8};
  } else if (name == "example2") {
    c.d = 10;
    c.target_norm = 0.95;
    c.model = example2_model(0.45);
    c.horizon = 8000;
    c.checkpoints = kLongCheckpoints;
    c.p_values = {0.45, 0.47, 0.48, 0.5};
  } else if (name == "remark1") {
    c.d = 1;
    c.target_norm = 0.5;
    c.a_star = Matrix{{0.5}};
    c.x0 = Vector{0.5};
    c.model = remark1_model();
    c.horizon = 500;
    c.checkpoints = {50, 100, 200, 500};
    c.trials = 1;
  } else if (name == "gaussian") {
    c.d = 10;
    c.target_norm = 0.6;
    c.model = iid_gaussian_model(1.0);
    c.horizon = 4000;
    c.estimators = {Method::Ols, Method::L1Norm};
  } else {
    throw InvalidInput("unknown preset: " + name);
  }
  return c;
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config", std::string("malformed YAML: ") + e.what());
  }
  return from_yaml(root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json system{{"d", c.d}, {"target_norm", c.target_norm}};
  if (c.a_star) system["a_star"] = matrix_to_json(*c.a_star);
  if (c.x0) system["x0"] = *c.x0;
  nlohmann::json dist = to_json(c.model);
  if (c.model.kind == DisturbanceKind::ScriptedAdversary) dist["rule"] = c.model.label;
  nlohmann::json est = nlohmann::json::array();
  for (Method m : c.estimators) est.push_back(to_string(m));
  nlohmann::json j{{"seed", c.seed},
                   {"system", system},
                   {"disturbance", dist},
                   {"simulate", {{"T", c.horizon}}},
                   {"experiment",
                    {{"checkpoints", c.checkpoints},
                     {"trials", c.trials},
                     {"recovery_tol", c.recovery_tol},
                     {"confidence_delta", c.confidence_delta},
                     {"estimators", est},
                     {"p_values", c.p_values},
                     {"d_values", c.d_values}}},
                   {"certify",
                    {{"epsilon", c.epsilon ? nlohmann::json(*c.epsilon) : nlohmann::json("auto")},
                     {"sampled", c.sampled}}}};
  if (!c.preset.empty()) j["preset"] = c.preset;
  return j;
}

SystemSpec make_system(const RunConfig& c) {
  SystemSpec spec = random_system(c.d, c.target_norm, c.seed);
  if (c.a_star) spec.a_star = *c.a_star;
  if (c.x0) spec.x0 = *c.x0;
  spec.validate();
  return spec;
}

ExperimentConfig make_experiment(const RunConfig& c) {
  ExperimentConfig e;
  e.d = c.d;
  e.target_norm = c.target_norm;
  e.model = c.model;
  e.checkpoints = c.checkpoints;
  e.trials = c.trials;
  e.recovery_tol = c.recovery_tol;
  e.confidence_delta = c.confidence_delta;
  e.master_seed = c.seed;
  e.estimators = c.estimators;
  if (c.a_star) e.fixed_system = make_system(c);
  return e;
}

}  // namespace advsysid
