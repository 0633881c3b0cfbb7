// Rectangular parameter sweeps of the maximal Bell value, with CSV and JSON
// export. At every node the measurement settings are re-optimized while the
// swept quantities stay fixed.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bellthresh/bell.hpp"
#include "bellthresh/optim.hpp"
#include "bellthresh/scenarios.hpp"

namespace bellthresh::scan {

using optim::OptimOptions;
using scenarios::Interval;
using scenarios::Scenario;

struct Axis {
  std::string name;
  Interval range;
  std::size_t points = 41;

  /// Node i of the axis; the end points are hit exactly.
  double node(std::size_t i) const;
  std::vector<double> nodes() const;
};

struct Resolution {
  std::size_t nx = 41;
  std::size_t ny = 41;
};

struct ScanMetadata {
  scenarios::Kind kind = scenarios::Kind::tritter;
  scenarios::OutcomePair outcomes = scenarios::OutcomePair::none;
  std::string functional;        // preset or file name
  std::string functional_table;  // full term table, text format
  double eta = 1.0;              // unused when eta is an axis
  double noise = 0.0;
  bool warm_start = false;
  OptimOptions options;
};

struct ScanGrid {
  Axis x;
  Axis y;
  /// Row-major with y outer: values[iy * nx + ix].
  std::vector<double> values;
  ScanMetadata meta;

  std::size_t nx() const noexcept { return x.points; }
  std::size_t ny() const noexcept { return y.points; }
  double at(std::size_t ix, std::size_t iy) const { return values.at(iy * x.points + ix); }
};

struct ScanOptions {
  Resolution resolution;
  /// Seed each node with the best settings of its left neighbour as an
  /// additional start. Off by default since it can drag contours across
  /// optimum switches.
  bool warm_start = false;
};

/// Default sweep ranges: (a, b) for qutrit scenarios, (eta, a) for qubits.
Interval default_a_range(const Scenario& sc);
Interval default_b_range(const Scenario& sc);
Interval default_eta_range();

/// CH maximized over the settings at each (a, b) node, x = a and y = b.
/// Qutrit scenarios only; throws std::invalid_argument on empty or
/// non-finite ranges and resolutions below 1.
ScanGrid scan_ab(const Scenario& sc, const bell::BellFunctional& f, double eta, double noise,
                 Interval a_range, Interval b_range, const ScanOptions& scan_opts,
                 const OptimOptions& opts);

/// Qubit sweep with x = eta and y = a.
ScanGrid scan_eta_a(const Scenario& sc, const bell::BellFunctional& f, Interval eta_range,
                    Interval a_range, const ScanOptions& scan_opts, const OptimOptions& opts);

enum class Format { csv, json };

Format parse_format(const std::string& text);
const char* to_string(Format format) noexcept;

std::string to_csv(const ScanGrid& grid);
std::string to_json(const ScanGrid& grid);
ScanGrid from_json(const std::string& text);

/// Writes the grid; throws std::ios_base::failure when the path cannot be
/// written.
void export_grid(const ScanGrid& grid, Format format, const std::string& path);
ScanGrid import_json(const std::string& path);

struct ZeroCrossing {
  double x = 0.0;
  double y = 0.0;
  /// The row was already positive at its first node, so the contour leaves
  /// the grid and x is only an upper bound.
  bool at_edge = false;
};

/// Smallest x at which a row turns from non-positive to positive, linearly
/// interpolated between the two nodes. Rows that never become positive are
/// skipped; empty when no row does.
std::optional<ZeroCrossing> leftmost_zero_crossing(const ScanGrid& grid);

}  // namespace bellthresh::scan
