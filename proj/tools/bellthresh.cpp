// bellthresh: maximal Bell violations, efficiency and noise thresholds, and
// parameter scans from the command line.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "bellthresh/cli.hpp"

namespace cli = bellthresh::cli;

namespace {

struct FlagSpec {
  const char* key;
  const char* help;
};

// Flags map one-to-one onto config keys.
constexpr FlagSpec kValueFlags[] = {
    {"scenario", "tritter | biphoton | qubit"},
    {"outcomes", "biphoton outcome pair: P1P2 | P1P3 | P2P3"},
    {"functional", "ch-qutrit | ch-qubit | ch-qutrit-printed | file:PATH"},
    {"fix-ab", "fix the qutrit entanglement parameters, A,B"},
    {"fix-a", "fix the qubit entanglement parameter"},
    {"eta", "detection efficiency in [0,1] (default 1)"},
    {"noise", "white-noise fraction F in [0,1] (qutrits)"},
    {"multistarts", "simplex starts per maximization (default 64)"},
    {"seed", "seed for the start points (falls back to $BELLTHRESH_SEED)"},
    {"threads", "worker threads; 0 uses every core (default 1)"},
    {"tolerance", "simplex function tolerance (default 1e-9)"},
    {"max-iterations", "simplex iteration budget per start (default 5000)"},
    {"threshold-tolerance", "bisection bracket width (default 1e-4)"},
    {"ab-bound", "search box [-B,B] for a and b ([0,B] for the qubit a)"},
    {"x-range", "scan x axis LO,HI (a for qutrits, eta for qubits)"},
    {"y-range", "scan y axis LO,HI (b for qutrits, a for qubits)"},
    {"resolution", "scan nodes per axis, N or NX,NY (default 41)"},
    {"out", "output path (scan grid, or JSON report for other commands)"},
    {"format", "scan grid format: csv | json"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bell-inequality violation thresholds for qubit and qutrit scenarios", "bellthresh"};
  app.get_formatter()->column_width(34);

  std::string command;
  app.add_option("command", command,
                 "max-violation | critical-efficiency | noise-threshold | scan | lhv-bound")
      ->required()
      ->check(CLI::IsMember({"max-violation", "critical-efficiency", "noise-threshold", "scan", "lhv-bound"}));

  std::string config_path;
  app.add_option("--config", config_path, "key = value file applied before the flags");

  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const auto& f : kValueFlags) {
    options[f.key] = app.add_option(std::string("--") + f.key, values[f.key], f.help);
  }
  bool json = false;
  bool warm_start = false;
  auto* json_flag = app.add_flag("--json", json, "print the full-precision JSON report");
  auto* warm_flag = app.add_flag("--warm-start", warm_start, "seed scan nodes from their neighbour");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitConfig;
  }

  cli::RunConfig cfg;
  try {
    cli::apply_seed_env(cfg);
    if (!config_path.empty()) cli::load_config_file(cfg, config_path);
    cli::apply_setting(cfg, "command", command);
    for (const auto& f : kValueFlags) {
      if (options[f.key]->count() > 0) cli::apply_setting(cfg, f.key, values[f.key]);
    }
    if (json_flag->count() > 0) cfg.json = json;
    if (warm_flag->count() > 0) cfg.warm_start = warm_start;
  } catch (const cli::ConfigError& e) {
    std::cerr << "bellthresh: " << e.what() << "\n";
    return cli::kExitConfig;
  }

  const auto result = cli::run_command(cfg);
  if (result.exit_code != cli::kExitOk) {
    std::cerr << "bellthresh: " << result.error << "\n";
    return result.exit_code;
  }
  if (!result.grid.empty()) {
    std::cout << result.grid;
    return cli::kExitOk;
  }
  if (!cfg.out.empty() && cfg.command != cli::Command::scan) {
    std::FILE* out = std::fopen(cfg.out.c_str(), "wb");
    if (out == nullptr || std::fputs(result.json.c_str(), out) < 0 || std::fclose(out) != 0) {
      std::cerr << "bellthresh: cannot write '" << cfg.out << "'\n";
      return cli::kExitError;
    }
  }
  std::cout << (cfg.json ? result.json : result.text);
  return cli::kExitOk;
}
