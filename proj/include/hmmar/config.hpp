#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hmmar/model.hpp"

namespace hmmar {

/// Invalid configuration; `field()` names the offending JSON path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Mode { optimal, nonparametric, both };

Mode parse_mode(const std::string& text);
std::string to_string(Mode mode);

struct ExperimentConfig {
  SwitchingArModel model;
  std::size_t n_total = 600;
  std::size_t eval_lo = 501;  // 1-based, inclusive
  std::size_t eval_hi = 600;
  std::size_t tau = 2;
  std::size_t stride = 1;
  std::size_t repeats = 50;
  std::uint64_t seed = 0;
  std::size_t burn_in = 100;
  Mode mode = Mode::both;

  bool runs_optimal() const { return mode != Mode::nonparametric; }
  bool runs_nonparametric() const { return mode != Mode::optimal; }
};

/// {"transition": [[...]], "states": [{"mu", "a", "b"}], "initial_dist"?}.
/// Requires at least two states; unknown keys are rejected.
SwitchingArModel model_from_json(const nlohmann::json& doc);

/// Reads every ExperimentConfig field; only "model" is mandatory.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Cross-field checks (evaluation window, warm-up, counts). Throws ConfigError.
void validate(const ExperimentConfig& config);

}  // namespace hmmar
