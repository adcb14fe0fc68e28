#pragma once

// Experiment configuration files: flat sections of `key = value` lines.
//
//   # comment
//   [plant]
//   type = first_order
//   a_p = 1.0
//   disturbance = sin_product 0.5 1
//
// Numbers are decimal literals. Functions are catalog names followed by
// their parameters; per-joint lists are separated by ';' (numbers by
// whitespace). Unknown sections or keys, duplicates and missing required
// keys are errors that carry the offending line.

#include "fogpss/simkit.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace fogpss {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& key, const std::string& what);

  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Values quoted for comparison in run summaries; not used by the simulation.
struct ReportedValues {
  std::optional<double> beta_hat;
  std::optional<double> entry_time;
  std::optional<double> xe_tilde_entry_time;
};

struct ExperimentConfig {
  std::variant<SimConfig, RobotExperimentConfig> experiment;
  std::string source;
  /// Set when u_max was derived from x_abs_bound instead of given.
  std::optional<double> x_abs_bound;
  ReportedValues reported;

  bool is_robot() const { return std::holds_alternative<RobotExperimentConfig>(experiment); }
};

ExperimentConfig parse_experiment_config(std::string_view text, const std::string& source = "<config>");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Command-line overrides applied after parsing.
struct ConfigOverrides {
  std::optional<double> step;
  std::optional<double> horizon;
  bool negate_u = false;
  std::optional<std::uint64_t> seed;
};

void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

/// Directory holding the bundled experiment files.
std::filesystem::path bundled_config_dir();

}  // namespace fogpss
