#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "advsysid/disturbances.hpp"
#include "advsysid/dynamics.hpp"
#include "advsysid/errors.hpp"
#include "advsysid/estimators.hpp"
#include "advsysid/experiments.hpp"

namespace advsysid {

/// Config problem tied to one field, e.g. "experiment.trials: must be >= 1".
class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& field, const std::string& problem)
      : InvalidInput(field + ": " + problem), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Fully resolved run configuration (presets expanded).
struct RunConfig {
  std::string preset;  // empty when none
  std::uint64_t seed = 0;

  std::size_t d = 10;
  double target_norm = 0.6;
  std::optional<Matrix> a_star;
  std::optional<Vector> x0;

  DisturbanceModel model;
  std::size_t horizon = 4000;

  std::vector<std::size_t> checkpoints = default_checkpoints();
  std::size_t trials = 10;
  double recovery_tol = 1e-6;
  double confidence_delta = 0.1;
  std::vector<Method> estimators{Method::Ols, Method::L2Norm, Method::L1Norm};
  std::vector<double> p_values;        // empty: {model.p}
  std::vector<std::size_t> d_values;   // empty: {d}

  std::optional<double> epsilon;       // certify; empty selects it automatically
  std::size_t sampled = 0;             // certify; > 0 switches to sampled mode

  void validate() const;
};

std::vector<std::string> preset_names();
RunConfig preset_config(const std::string& name);

/// Parses YAML (JSON is accepted as a YAML subset). A document with a
/// top-level "config" key, such as a run manifest, is read from that key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& c);

/// Explicit a_star/x0 when given, otherwise a random system from the seed.
SystemSpec make_system(const RunConfig& c);
ExperimentConfig make_experiment(const RunConfig& c);

}  // namespace advsysid
