#include "bellthresh/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ios>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace bellthresh::cli {

namespace {

using nlohmann::json;
using scenarios::Interval;
using scenarios::Kind;
using scenarios::OutcomePair;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text, std::size_t n) {
  std::vector<double> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) out.push_back(parse_double(key, item));
  if (out.size() != n) {
    throw ConfigError(key + ": expected " + std::to_string(n) + " comma-separated numbers, got '" + text + "'");
  }
  return out;
}

Interval parse_interval(const std::string& key, const std::string& text) {
  const auto v = parse_list(key, text, 2);
  if (!(v[0] <= v[1])) throw ConfigError(key + ": range must satisfy lo <= hi");
  return {v[0], v[1]};
}

template <class F>
auto rethrow_as_config(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

// --- report assembly ------------------------------------------------------

std::string six(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Every value goes to both the JSON document and the text report, so text
// mode never shows a number the JSON lacks.
class Report {
 public:
  void heading(const std::string& title) { text_ += title + "\n"; }

  void num(const std::string& ptr, const std::string& label, double v) {
    doc_[json::json_pointer(ptr)] = number(v);
    line(label, six(v));
  }
  void count(const std::string& ptr, const std::string& label, std::uint64_t v) {
    doc_[json::json_pointer(ptr)] = v;
    line(label, std::to_string(v));
  }
  void str(const std::string& ptr, const std::string& label, const std::string& v) {
    doc_[json::json_pointer(ptr)] = v;
    line(label, v);
  }
  void flag(const std::string& ptr, const std::string& label, bool v) {
    doc_[json::json_pointer(ptr)] = v;
    line(label, v ? "yes" : "no");
  }
  void nums(const std::string& ptr, const std::string& label, const std::vector<double>& v) {
    json arr = json::array();
    std::string shown;
    for (double x : v) {
      arr.push_back(number(x));
      shown += (shown.empty() ? "" : " ") + six(x);
    }
    doc_[json::json_pointer(ptr)] = arr;
    line(label, shown);
  }
  void json_only(const std::string& ptr, json v) { doc_[json::json_pointer(ptr)] = std::move(v); }

  std::string text() const { return text_; }
  std::string json_text() const { return doc_.dump(2) + "\n"; }

 private:
  void line(const std::string& label, const std::string& value) {
    std::string l = "  " + label;
    if (l.size() < 26) l.resize(26, ' ');
    text_ += l + " " + value + "\n";
  }

  json doc_ = json::object();
  std::string text_;
};

json options_json(const optim::OptimOptions& o) {
  json bounds = json::array();
  for (const auto& b : o.entanglement_bounds) bounds.push_back({b.lo, b.hi});
  return {{"multistarts", o.multistarts},
          {"seed", o.rng_seed},
          {"function_tolerance", o.function_tolerance},
          {"max_iterations", o.max_iterations},
          {"threshold_tolerance", o.threshold_tolerance},
          {"entanglement_bounds", bounds}};
}

void header(Report& r, const RunConfig& cfg, const scenarios::Scenario& sc,
            const bell::BellFunctional& f) {
  r.heading(std::string(to_string(cfg.command)));
  r.str("/command", "command", to_string(cfg.command));
  r.str("/scenario", "scenario", sc.name());
  r.str("/functional", "functional", f.name());
  r.count("/options/seed", "seed", cfg.optim.rng_seed);
  r.count("/options/multistarts", "multistarts", cfg.optim.multistarts);
  r.json_only("/options", options_json(cfg.options()));
}

void params(Report& r, const std::string& ptr, const scenarios::Scenario& sc,
            const scenarios::EntanglementParams& p, bool free) {
  r.num(ptr + "/a", free ? "a (optimized)" : "a (fixed)", p.a);
  if (sc.is_qutrit()) r.num(ptr + "/b", free ? "b (optimized)" : "b (fixed)", p.b);
}

void value(Report& r, const std::string& ptr, const std::string& prefix, const bell::BellValue& v) {
  r.num(ptr + "/CH", prefix + "CH", v.total);
  r.num(ptr + "/J", prefix + "J (joint)", v.joint);
  r.num(ptr + "/S", prefix + "S (single)", v.single);
  r.num(ptr + "/ratio", prefix + "|S|/J", v.ratio());
}

bool on_bound(const scenarios::Scenario& sc, const RunConfig& cfg,
              const scenarios::EntanglementParams& p) {
  const auto opts = cfg.options();
  const auto bounds = opts.entanglement_bounds.empty() ? sc.entanglement_bounds() : opts.entanglement_bounds;
  const double coords[2] = {p.a, p.b};
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const double tol = 1e-6 * std::max(1.0, bounds[i].hi - bounds[i].lo);
    if (coords[i] <= bounds[i].lo + tol || coords[i] >= bounds[i].hi - tol) return true;
  }
  return false;
}

void violation(Report& r, const std::string& ptr, const scenarios::Scenario& sc,
               const optim::ViolationResult& v) {
  value(r, ptr, "", v.best);
  params(r, ptr + "/params", sc, v.params, v.params_free);
  r.nums(ptr + "/settings", "settings (rad)", v.settings);
  r.count(ptr + "/starts_converged", "starts converged", v.starts_converged);
  r.count(ptr + "/best_duplicates", "starts at best (1e-6)", v.best_duplicates);
  r.count(ptr + "/evaluations", "evaluations", v.evaluations);
}

CommandResult finish(const Report& r) {
  CommandResult out;
  out.text = r.text();
  out.json = r.json_text();
  return out;
}

CommandResult cmd_max_violation(const RunConfig& cfg) {
  const auto sc = cfg.scenario();
  const auto f = cfg.functional_table();
  const auto res = optim::maximize(sc, f, cfg.eta, cfg.noise, cfg.fixed_params(), cfg.options());
  Report r;
  header(r, cfg, sc, f);
  r.num("/eta", "eta", cfg.eta);
  r.num("/noise", "noise F", cfg.noise);
  violation(r, "/result", sc, res);
  value(r, "/result/unscaled", "eta=1: ", res.unscaled);
  if (res.params_free) r.flag("/result/params_on_bound", "params on search bound", on_bound(sc, cfg, res.params));
  return finish(r);
}

CommandResult cmd_critical_efficiency(const RunConfig& cfg) {
  const auto sc = cfg.scenario();
  const auto f = cfg.functional_table();
  const auto fixed = cfg.fixed_params();
  const auto res = optim::critical_efficiency(sc, f, fixed, cfg.options());
  Report r;
  header(r, cfg, sc, f);
  r.flag("/found", "violated at eta=1", res.found);
  if (res.found) {
    r.num("/eta_star", "eta*", res.eta_star);
    r.num("/closed_form", "-S/J at eta=1 optimum", res.closed_form);
    r.flag("/below_bracket", "violated at bracket floor", res.below_bracket);
    r.count("/probes", "maximizations", res.probes);
    r.heading("at eta = 1");
    violation(r, "/at_unit_efficiency", sc, res.at_unit_efficiency);
    r.heading("at eta*");
    violation(r, "/at_threshold", sc, res.at_threshold);
    if (!fixed) {
      r.flag("/params_on_bound", "params on search bound", on_bound(sc, cfg, res.at_threshold.params));
    }
  } else {
    r.num("/at_unit_efficiency/CH", "CH at eta=1", res.at_unit_efficiency.best.total);
  }
  return finish(r);
}

CommandResult cmd_noise_threshold(const RunConfig& cfg) {
  const auto sc = cfg.scenario();
  const auto f = cfg.functional_table();
  const auto res = optim::noise_threshold(sc, f, cfg.fixed_params(), cfg.options(), cfg.eta);
  Report r;
  header(r, cfg, sc, f);
  r.num("/eta", "eta", cfg.eta);
  r.flag("/found", "violated at F=0", res.found);
  r.num("/F_th", "F_th (closed form)", res.closed_form);
  r.num("/bisection", "F_th (bisection)", res.bisection);
  r.num("/difference", "closed form - bisection", res.closed_form - res.bisection);
  r.num("/CH_star", "CH* at F=0", res.optimum);
  r.num("/CH_noise", "CH on I/d", res.noise_value);
  r.count("/probes", "maximizations", res.probes);
  r.heading("at F = 0");
  violation(r, "/at_zero_noise", sc, res.at_zero_noise);
  return finish(r);
}

CommandResult cmd_scan(const RunConfig& cfg) {
  const auto sc = cfg.scenario();
  const auto f = cfg.functional_table();
  scan::ScanOptions so;
  so.resolution = cfg.resolution;
  so.warm_start = cfg.warm_start;
  scan::ScanGrid grid;
  if (sc.is_qutrit()) {
    grid = scan::scan_ab(sc, f, cfg.eta, cfg.noise, cfg.x_range.value_or(scan::default_a_range(sc)),
                         cfg.y_range.value_or(scan::default_b_range(sc)), so, cfg.options());
  } else {
    grid = scan::scan_eta_a(sc, f, cfg.x_range.value_or(scan::default_eta_range()),
                            cfg.y_range.value_or(scan::default_a_range(sc)), so, cfg.options());
  }

  CommandResult out;
  if (cfg.out.empty()) {
    out.grid = cfg.format == scan::Format::csv ? scan::to_csv(grid) : scan::to_json(grid);
    return out;
  }
  scan::export_grid(grid, cfg.format, cfg.out);

  Report r;
  header(r, cfg, sc, f);
  if (sc.is_qutrit()) {
    r.num("/eta", "eta", cfg.eta);
    r.num("/noise", "noise F", cfg.noise);
  }
  r.str("/grid/path", "written to", cfg.out);
  r.str("/grid/format", "format", scan::to_string(cfg.format));
  r.str("/grid/x", "x axis", grid.x.name);
  r.nums("/grid/x_range", "x range", {grid.x.range.lo, grid.x.range.hi});
  r.count("/grid/nx", "x points", grid.nx());
  r.str("/grid/y", "y axis", grid.y.name);
  r.nums("/grid/y_range", "y range", {grid.y.range.lo, grid.y.range.hi});
  r.count("/grid/ny", "y points", grid.ny());
  std::size_t imax = 0;
  for (std::size_t i = 1; i < grid.values.size(); ++i) {
    if (grid.values[i] > grid.values[imax]) imax = i;
  }
  const std::size_t ix = imax % grid.nx();
  const std::size_t iy = imax / grid.nx();
  r.num("/max/CH", "max CH", grid.values[imax]);
  r.num("/max/x", "  at " + grid.x.name, grid.x.node(ix));
  r.num("/max/y", "  at " + grid.y.name, grid.y.node(iy));
  if (const auto zc = scan::leftmost_zero_crossing(grid)) {
    r.num("/leftmost_zero_crossing/x", "leftmost CH=0 " + grid.x.name, zc->x);
    r.num("/leftmost_zero_crossing/y", "  at " + grid.y.name, zc->y);
    r.flag("/leftmost_zero_crossing/at_edge", "  at grid edge", zc->at_edge);
  } else {
    r.json_only("/leftmost_zero_crossing", nullptr);
    r.heading("  no positive region on the grid");
  }
  return finish(r);
}

CommandResult cmd_lhv_bound(const RunConfig& cfg) {
  const auto f = cfg.functional_table();
  const double n = static_cast<double>(f.outcomes());
  Report r;
  r.heading(std::string(to_string(cfg.command)));
  r.str("/command", "command", to_string(cfg.command));
  r.str("/functional", "functional", f.name());
  r.count("/outcomes", "outcomes", f.outcomes());
  r.count("/joint_terms", "joint terms", f.joint_terms().size());
  r.count("/single_terms", "single terms", f.single_terms().size());
  r.count("/strategies", "deterministic strategies", static_cast<std::uint64_t>(n * n * n * n));
  const double lhv = bell::lhv_max(f);
  r.num("/lhv_max", "LHV maximum", lhv);
  r.num("/declared_bound", "declared bound", f.lhv_bound());
  r.flag("/valid", "bound holds", lhv <= f.lhv_bound());
  return finish(r);
}

}  // namespace

Command parse_command(const std::string& text) {
  if (text == "max-violation") return Command::max_violation;
  if (text == "critical-efficiency") return Command::critical_efficiency;
  if (text == "noise-threshold") return Command::noise_threshold;
  if (text == "scan") return Command::scan;
  if (text == "lhv-bound") return Command::lhv_bound;
  throw ConfigError("unknown command '" + text + "'");
}

const char* to_string(Command command) noexcept {
  switch (command) {
    case Command::max_violation: return "max-violation";
    case Command::critical_efficiency: return "critical-efficiency";
    case Command::noise_threshold: return "noise-threshold";
    case Command::scan: return "scan";
    case Command::lhv_bound: return "lhv-bound";
  }
  return "unknown";
}

scenarios::Scenario RunConfig::scenario() const {
  return rethrow_as_config([&] {
    switch (kind) {
      case Kind::tritter: return scenarios::Scenario::tritter();
      case Kind::qubit: return scenarios::Scenario::qubit();
      case Kind::biphoton: break;
    }
    if (outcomes == OutcomePair::none) throw ConfigError("biphoton scenario needs --outcomes P1P2|P1P3|P2P3");
    return scenarios::Scenario::biphoton(outcomes);
  });
}

std::optional<scenarios::EntanglementParams> RunConfig::fixed_params() const {
  if (fix == FixMode::none) return std::nullopt;
  return fixed;
}

optim::OptimOptions RunConfig::options() const {
  auto o = optim;
  if (ab_bound) {
    const double b = *ab_bound;
    if (kind == Kind::qubit) {
      o.entanglement_bounds = {{0.0, b}};
    } else {
      o.entanglement_bounds = {{-b, b}, {-b, b}};
    }
  }
  return o;
}

bell::BellFunctional RunConfig::functional_table() const {
  return rethrow_as_config([&] {
    const std::size_t outcomes_default = kind == Kind::qubit ? 2 : 3;
    if (functional.empty()) return bell::preset(kind == Kind::qubit ? "ch-qubit" : "ch-qutrit");
    if (functional.rfind("file:", 0) == 0) {
      return bell::load_functional(functional.substr(5), outcomes_default);
    }
    return bell::preset(functional);
  });
}

void RunConfig::validate() const {
  if (kind == Kind::biphoton && outcomes == OutcomePair::none) {
    throw ConfigError("biphoton scenario needs --outcomes P1P2|P1P3|P2P3");
  }
  if (kind != Kind::biphoton && outcomes != OutcomePair::none) {
    throw ConfigError("--outcomes only applies to the biphoton scenario");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in [0,1]");
  if (!(noise >= 0.0 && noise <= 1.0)) throw ConfigError("noise must lie in [0,1]");
  if (noise > 0.0 && kind == Kind::qubit) throw ConfigError("noise is only modeled for qutrit scenarios");
  if (noise > 0.0 && command != Command::max_violation && command != Command::scan) {
    throw ConfigError(std::string("--noise is not used by ") + to_string(command));
  }
  if (fix == FixMode::ab && kind == Kind::qubit) throw ConfigError("the qubit scenario takes --fix-a, not --fix-ab");
  if (fix == FixMode::a && kind != Kind::qubit) throw ConfigError("qutrit scenarios take --fix-ab A,B");
  if (fix != FixMode::none && command == Command::scan) throw ConfigError("scan sweeps the entanglement parameters; drop --fix-*");
  if (resolution.nx < 1 || resolution.ny < 1) throw ConfigError("resolution must be at least 1");
  if (const auto o = options(); !o.entanglement_bounds.empty()) {
    const std::size_t want = kind == Kind::qubit ? 1 : 2;
    if (o.entanglement_bounds.size() != want) throw ConfigError("entanglement bounds do not match the scenario");
  }
  rethrow_as_config([&] { optim.validate(); return 0; });

  const auto f = functional_table();
  if (command != Command::lhv_bound) {
    const auto sc = scenario();
    if (!f.compatible_with(sc)) {
      throw ConfigError("functional " + f.name() + " does not fit scenario " + sc.name());
    }
  }
}

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys = {
      "command",     "scenario",  "outcomes",   "functional",          "fix-ab",
      "fix-a",       "eta",       "noise",      "multistarts",         "seed",
      "threads",     "tolerance", "max-iterations", "threshold-tolerance", "ab-bound",
      "x-range",     "y-range",   "resolution", "warm-start",          "out",
      "format",      "json"};
  return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  rethrow_as_config([&] {
    if (key == "command") {
      cfg.command = parse_command(value);
    } else if (key == "scenario") {
      cfg.kind = scenarios::parse_kind(value);
    } else if (key == "outcomes") {
      cfg.outcomes = scenarios::parse_outcome_pair(value);
    } else if (key == "functional") {
      if (value.empty()) throw ConfigError("functional: empty value");
      cfg.functional = value;
    } else if (key == "fix-ab") {
      const auto v = parse_list(key, value, 2);
      cfg.fix = FixMode::ab;
      cfg.fixed = {v[0], v[1]};
    } else if (key == "fix-a") {
      cfg.fix = FixMode::a;
      cfg.fixed = {parse_double(key, value), 0.0};
    } else if (key == "eta") {
      cfg.eta = parse_double(key, value);
    } else if (key == "noise") {
      cfg.noise = parse_double(key, value);
    } else if (key == "multistarts") {
      cfg.optim.multistarts = parse_unsigned(key, value);
    } else if (key == "seed") {
      cfg.optim.rng_seed = parse_unsigned(key, value);
    } else if (key == "threads") {
      cfg.optim.threads = parse_unsigned(key, value);
    } else if (key == "tolerance") {
      cfg.optim.function_tolerance = parse_double(key, value);
    } else if (key == "max-iterations") {
      cfg.optim.max_iterations = parse_unsigned(key, value);
    } else if (key == "threshold-tolerance") {
      cfg.optim.threshold_tolerance = parse_double(key, value);
    } else if (key == "ab-bound") {
      const double b = parse_double(key, value);
      if (!(b > 0.0)) throw ConfigError("ab-bound must be positive");
      cfg.ab_bound = b;
    } else if (key == "x-range") {
      cfg.x_range = parse_interval(key, value);
    } else if (key == "y-range") {
      cfg.y_range = parse_interval(key, value);
    } else if (key == "resolution") {
      if (value.find(',') != std::string::npos) {
        const auto v = parse_list(key, value, 2);
        if (v[0] < 1 || v[1] < 1 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
          throw ConfigError("resolution: expected positive integers");
        }
        cfg.resolution = {static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1])};
      } else {
        const auto n = parse_unsigned(key, value);
        cfg.resolution = {n, n};
      }
    } else if (key == "warm-start") {
      cfg.warm_start = parse_bool(key, value);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "format") {
      cfg.format = scan::parse_format(value);
    } else if (key == "json") {
      cfg.json = parse_bool(key, value);
    } else {
      throw ConfigError("unknown setting '" + key + "'");
    }
    return 0;
  });
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

void apply_seed_env(RunConfig& cfg) {
  if (const char* s = std::getenv(kSeedEnv); s != nullptr && *s != '\0') {
    try {
      apply_setting(cfg, "seed", s);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(kSeedEnv) + ": " + e.what());
    }
  }
}

CommandResult run_command(const RunConfig& cfg) {
  CommandResult failed;
  try {
    cfg.validate();
    switch (cfg.command) {
      case Command::max_violation: return cmd_max_violation(cfg);
      case Command::critical_efficiency: return cmd_critical_efficiency(cfg);
      case Command::noise_threshold: return cmd_noise_threshold(cfg);
      case Command::scan: return cmd_scan(cfg);
      case Command::lhv_bound: return cmd_lhv_bound(cfg);
    }
    failed.exit_code = kExitError;
    failed.error = "unhandled command";
  } catch (const ConfigError& e) {
    failed.exit_code = kExitConfig;
    failed.error = e.what();
  } catch (const optim::OptimizationFailure& e) {
    failed.exit_code = kExitOptimization;
    failed.error = e.what();
  } catch (const std::invalid_argument& e) {
    failed.exit_code = kExitConfig;
    failed.error = e.what();
  } catch (const std::exception& e) {
    failed.exit_code = kExitError;
    failed.error = e.what();
  }
  return failed;
}

}  // namespace bellthresh::cli
