// Run configuration and command implementations behind the bellthresh tool.
//
// A configuration is a flat set of `key = value` settings. The same keys
// are accepted from a config file and as command-line flags (`--key`); later
// settings override earlier ones.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bellthresh/bell.hpp"
#include "bellthresh/optim.hpp"
#include "bellthresh/scan.hpp"
#include "bellthresh/scenarios.hpp"

namespace bellthresh::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;  // I/O and other runtime failures
inline constexpr int kExitConfig = 2;
inline constexpr int kExitOptimization = 3;

inline constexpr const char* kSeedEnv = "BELLTHRESH_SEED";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Command { max_violation, critical_efficiency, noise_threshold, scan, lhv_bound };

Command parse_command(const std::string& text);
const char* to_string(Command command) noexcept;

enum class FixMode { none, a, ab };

struct RunConfig {
  Command command = Command::max_violation;
  scenarios::Kind kind = scenarios::Kind::tritter;
  scenarios::OutcomePair outcomes = scenarios::OutcomePair::none;
  /// Preset name or "file:PATH"; empty selects the scenario's default.
  std::string functional;
  FixMode fix = FixMode::none;
  scenarios::EntanglementParams fixed;
  double eta = 1.0;
  double noise = 0.0;
  optim::OptimOptions optim;
  /// Symmetric search box [-B, B] for (a, b), or [0, B] for the qubit a.
  std::optional<double> ab_bound;
  /// Scan axes; unset axes use the scan module defaults.
  std::optional<scenarios::Interval> x_range;
  std::optional<scenarios::Interval> y_range;
  scan::Resolution resolution;
  bool warm_start = false;
  std::string out;
  scan::Format format = scan::Format::csv;
  bool json = false;

  scenarios::Scenario scenario() const;
  std::optional<scenarios::EntanglementParams> fixed_params() const;
  /// Optimizer options with ab_bound resolved for the scenario.
  optim::OptimOptions options() const;
  bell::BellFunctional functional_table() const;
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Keys understood by apply_setting, in documentation order.
const std::vector<std::string>& setting_keys();

/// Applies one `key = value` setting; throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines with `#` comments.
void apply_config_text(RunConfig& cfg, std::string_view text);
void load_config_file(RunConfig& cfg, const std::string& path);

/// Takes the seed from BELLTHRESH_SEED when it is set.
void apply_seed_env(RunConfig& cfg);

struct CommandResult {
  int exit_code = kExitOk;
  /// Human-readable report (6 significant digits).
  std::string text;
  /// Full-precision JSON document; empty on failure.
  std::string json;
  std::string error;
  /// Set for scans without an output path: the grid in the chosen format.
  std::string grid;
};

/// Validates the configuration and runs its command. Never throws; failures
/// are reported through exit_code and error.
CommandResult run_command(const RunConfig& cfg);

}  // namespace bellthresh::cli
