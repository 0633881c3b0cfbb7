#include "bellthresh/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ios>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace bellthresh::scan {

namespace {

using nlohmann::json;

void check_axis(const Axis& axis) {
  if (axis.points < 1) throw std::invalid_argument("axis " + axis.name + " needs at least one point");
  const auto& r = axis.range;
  if (!(std::isfinite(r.lo) && std::isfinite(r.hi))) {
    throw std::invalid_argument("axis " + axis.name + " range must be finite");
  }
  if (r.lo > r.hi || (r.lo == r.hi && axis.points > 1)) {
    throw std::invalid_argument("axis " + axis.name + " range is empty");
  }
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Settings-only objective at one node, used for the warm-start polish.
optim::Objective node_objective(const Scenario& sc, const bell::BellFunctional& f, double eta,
                                const qcore::QuantumState& state) {
  return [&sc, &f, eta, state](std::span<const double> x) {
    const scenarios::SettingParams settings(sc, {x.begin(), x.end()});
    return bell::value_at_efficiency(bell::evaluate(f, sc, state, settings), eta);
  };
}

struct NodeSpec {
  double eta;
  scenarios::EntanglementParams params;
};

// Runs every row (y outer) on a worker pool. Rows are independent; within a
// row the warm start needs the previous node, so a row is one job.
template <class NodeAt>
std::vector<double> sweep(const Scenario& sc, const bell::BellFunctional& f, double noise,
                          const Axis& x, const Axis& y, const ScanOptions& scan_opts,
                          const OptimOptions& opts, NodeAt node_at) {
  OptimOptions inner = opts;
  inner.threads = 1;
  std::vector<double> values(x.points * y.points);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(y.points);

  const std::vector<optim::Coordinate> coords(sc.setting_coords(),
                                              {{0.0, sc.setting_period()}, true});
  auto run_row = [&](std::size_t iy) {
    std::vector<double> previous;
    for (std::size_t ix = 0; ix < x.points; ++ix) {
      const NodeSpec node = node_at(x.node(ix), y.node(iy));
      auto r = optim::maximize(sc, f, node.eta, noise, node.params, inner);
      double value = r.best.total;
      if (scan_opts.warm_start && !previous.empty()) {
        const auto psi = scenarios::entangled_state(sc, node.params);
        const qcore::QuantumState state =
            noise > 0.0 ? qcore::QuantumState(scenarios::mix_with_noise(psi, noise)) : psi;
        const auto polished = optim::simplex_maximize(node_objective(sc, f, node.eta, state), previous,
                                                      coords, inner.function_tolerance,
                                                      inner.max_iterations);
        if (polished.value > value) {
          value = polished.value;
          r.settings = polished.x;
        }
      }
      previous = r.settings;
      values[iy * x.points + ix] = value;
    }
  };
  auto worker = [&] {
    for (std::size_t iy = next.fetch_add(1); iy < y.points; iy = next.fetch_add(1)) {
      try {
        run_row(iy);
      } catch (...) {
        errors[iy] = std::current_exception();
      }
    }
  };

  const std::size_t threads = worker_count(opts.threads, y.points);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return values;
}

ScanMetadata make_metadata(const Scenario& sc, const bell::BellFunctional& f, double eta,
                           double noise, const ScanOptions& scan_opts, const OptimOptions& opts) {
  ScanMetadata m;
  m.kind = sc.kind();
  m.outcomes = sc.outcomes();
  m.functional = f.name();
  m.functional_table = bell::format_functional(f);
  m.eta = eta;
  m.noise = noise;
  m.warm_start = scan_opts.warm_start;
  m.options = opts;
  return m;
}

json axis_json(const Axis& a) {
  return {{"name", a.name}, {"lo", a.range.lo}, {"hi", a.range.hi}, {"points", a.points}};
}

Axis axis_from(const json& j) {
  Axis a;
  a.name = j.at("name").get<std::string>();
  a.range = {j.at("lo").get<double>(), j.at("hi").get<double>()};
  a.points = j.at("points").get<std::size_t>();
  return a;
}

}  // namespace

double Axis::node(std::size_t i) const {
  if (points <= 1) return range.lo;
  if (i + 1 == points) return range.hi;
  return range.lo + (range.hi - range.lo) * (static_cast<double>(i) / static_cast<double>(points - 1));
}

std::vector<double> Axis::nodes() const {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) out[i] = node(i);
  return out;
}

Interval default_a_range(const Scenario& sc) {
  switch (sc.kind()) {
    case scenarios::Kind::qubit: return {0.0, 0.8};
    case scenarios::Kind::biphoton:
      if (sc.outcomes() == scenarios::OutcomePair::p1p3) return {-2.0, 0.0};
      return {0.0, 2.0};
    case scenarios::Kind::tritter: break;
  }
  return {0.0, 2.0};
}

Interval default_b_range(const Scenario& sc) {
  if (!sc.is_qutrit()) throw std::invalid_argument("qubit sweeps have no b axis");
  return default_a_range(sc);
}

Interval default_eta_range() { return {0.6, 1.0}; }

ScanGrid scan_ab(const Scenario& sc, const bell::BellFunctional& f, double eta, double noise,
                 Interval a_range, Interval b_range, const ScanOptions& scan_opts,
                 const OptimOptions& opts) {
  if (!sc.is_qutrit()) throw std::invalid_argument("scan_ab needs a qutrit scenario");
  opts.validate();
  ScanGrid g;
  g.x = {"a", a_range, scan_opts.resolution.nx};
  g.y = {"b", b_range, scan_opts.resolution.ny};
  check_axis(g.x);
  check_axis(g.y);
  g.meta = make_metadata(sc, f, eta, noise, scan_opts, opts);
  g.values = sweep(sc, f, noise, g.x, g.y, scan_opts, opts,
                   [eta](double a, double b) { return NodeSpec{eta, {a, b}}; });
  return g;
}

ScanGrid scan_eta_a(const Scenario& sc, const bell::BellFunctional& f, Interval eta_range,
                    Interval a_range, const ScanOptions& scan_opts, const OptimOptions& opts) {
  if (sc.kind() != scenarios::Kind::qubit) throw std::invalid_argument("scan_eta_a needs the qubit scenario");
  if (!(eta_range.lo >= 0.0 && eta_range.hi <= 1.0)) {
    throw std::invalid_argument("efficiency axis must lie inside [0,1]");
  }
  opts.validate();
  ScanGrid g;
  g.x = {"eta", eta_range, scan_opts.resolution.nx};
  g.y = {"a", a_range, scan_opts.resolution.ny};
  check_axis(g.x);
  check_axis(g.y);
  g.meta = make_metadata(sc, f, 1.0, 0.0, scan_opts, opts);
  g.values = sweep(sc, f, 0.0, g.x, g.y, scan_opts, opts,
                   [](double eta, double a) { return NodeSpec{eta, {a, 0.0}}; });
  return g;
}

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  throw std::invalid_argument("unknown grid format '" + text + "' (csv or json)");
}

const char* to_string(Format format) noexcept { return format == Format::csv ? "csv" : "json"; }

std::string to_csv(const ScanGrid& grid) {
  std::string out = grid.x.name + "," + grid.y.name + ",CH\n";
  char line[96];
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      std::snprintf(line, sizeof line, "%.17e,%.17e,%.17e\n", grid.x.node(ix), grid.y.node(iy),
                    grid.at(ix, iy));
      out += line;
    }
  }
  return out;
}

std::string to_json(const ScanGrid& grid) {
  const auto& m = grid.meta;
  json bounds = json::array();
  for (const auto& b : m.options.entanglement_bounds) bounds.push_back({b.lo, b.hi});
  // Thread count is left out on purpose: results do not depend on it.
  json options = {{"multistarts", m.options.multistarts},
                  {"seed", m.options.rng_seed},
                  {"function_tolerance", m.options.function_tolerance},
                  {"max_iterations", m.options.max_iterations},
                  {"threshold_tolerance", m.options.threshold_tolerance},
                  {"entanglement_bounds", bounds}};
  json meta = {{"scenario", scenarios::to_string(m.kind)},
               {"outcomes", scenarios::to_string(m.outcomes)},
               {"functional", m.functional},
               {"functional_table", m.functional_table},
               {"eta", m.eta},
               {"noise", m.noise},
               {"warm_start", m.warm_start},
               {"options", options}};
  json j = {{"x", axis_json(grid.x)}, {"y", axis_json(grid.y)}, {"values", grid.values},
            {"metadata", meta}};
  return j.dump(2) + "\n";
}

ScanGrid from_json(const std::string& text) {
  ScanGrid g;
  try {
    const json j = json::parse(text);
    g.x = axis_from(j.at("x"));
    g.y = axis_from(j.at("y"));
    g.values = j.at("values").get<std::vector<double>>();
    const auto& m = j.at("metadata");
    g.meta.kind = scenarios::parse_kind(m.at("scenario").get<std::string>());
    g.meta.outcomes = scenarios::parse_outcome_pair(m.at("outcomes").get<std::string>());
    g.meta.functional = m.at("functional").get<std::string>();
    g.meta.functional_table = m.at("functional_table").get<std::string>();
    g.meta.eta = m.at("eta").get<double>();
    g.meta.noise = m.at("noise").get<double>();
    g.meta.warm_start = m.at("warm_start").get<bool>();
    const auto& o = m.at("options");
    g.meta.options.multistarts = o.at("multistarts").get<std::size_t>();
    g.meta.options.rng_seed = o.at("seed").get<std::uint64_t>();
    g.meta.options.function_tolerance = o.at("function_tolerance").get<double>();
    g.meta.options.max_iterations = o.at("max_iterations").get<std::size_t>();
    g.meta.options.threshold_tolerance = o.at("threshold_tolerance").get<double>();
    for (const auto& b : o.at("entanglement_bounds")) {
      g.meta.options.entanglement_bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed grid JSON: ") + e.what());
  }
  if (g.values.size() != g.nx() * g.ny()) throw std::invalid_argument("grid JSON has the wrong number of values");
  return g;
}

void export_grid(const ScanGrid& grid, Format format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  out << (format == Format::csv ? to_csv(grid) : to_json(grid));
  out.flush();
  if (!out) throw std::ios_base::failure("failed writing '" + path + "'");
}

ScanGrid import_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::optional<ZeroCrossing> leftmost_zero_crossing(const ScanGrid& grid) {
  std::optional<ZeroCrossing> best;
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    if (grid.at(0, iy) > 0.0) {
      const ZeroCrossing edge{grid.x.node(0), grid.y.node(iy), true};
      if (!best || edge.x < best->x) best = edge;
      continue;
    }
    for (std::size_t ix = 1; ix < grid.nx(); ++ix) {
      const double v0 = grid.at(ix - 1, iy);
      const double v1 = grid.at(ix, iy);
      if (!(v0 <= 0.0 && v1 > 0.0)) continue;
      const double x0 = grid.x.node(ix - 1);
      const double x1 = grid.x.node(ix);
      const double x = x0 + (x1 - x0) * (-v0) / (v1 - v0);
      if (!best || x < best->x) best = ZeroCrossing{x, grid.y.node(iy), false};
      break;
    }
  }
  return best;
}

}  // namespace bellthresh::scan
