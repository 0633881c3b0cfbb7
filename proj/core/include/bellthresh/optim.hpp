// Maximization of Bell functionals over measurement settings and
// entanglement parameters, and the threshold searches built on it.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellthresh/bell.hpp"
#include "bellthresh/scenarios.hpp"

namespace bellthresh::optim {

using bell::BellFunctional;
using bell::BellValue;
using scenarios::EntanglementParams;
using scenarios::Interval;
using scenarios::Scenario;

/// Thrown when not a single multistart converged.
class OptimizationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OptimOptions {
  std::size_t multistarts = 64;
  std::uint64_t rng_seed = 20050101;
  double function_tolerance = 1e-9;
  std::size_t max_iterations = 5000;
  /// Bracket width at which the eta and F bisections stop.
  double threshold_tolerance = 1e-4;
  /// Worker threads for the multistarts; 0 picks hardware concurrency.
  std::size_t threads = 1;
  /// Overrides the scenario's entanglement search box when non-empty.
  std::vector<Interval> entanglement_bounds;

  void validate() const;
};

// --- generic bounded simplex ------------------------------------------------

struct Coordinate {
  Interval bounds;
  /// Periodic coordinates wrap instead of being clipped.
  bool periodic = false;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead maximization with dimension-adaptive coefficients. Points are
/// kept inside the box (clipped or wrapped per coordinate). The search is
/// restarted from its best vertex until a restart no longer improves the
/// value by more than the tolerance.
SimplexResult simplex_maximize(const Objective& f, std::vector<double> start,
                               std::span<const Coordinate> coords, double tolerance,
                               std::size_t max_iterations);

/// Randomly shifted Halton points in the box; point `index` of a sequence
/// depends only on (seed, index, dimension).
std::vector<double> halton_point(std::uint64_t seed, std::size_t index,
                                 std::span<const Coordinate> coords);

struct MultistartResult {
  SimplexResult best;
  std::size_t best_start = 0;
  std::size_t starts_converged = 0;
  std::size_t best_duplicates = 0;
  std::vector<double> start_values;  // final value per start, by start index
};

/// Runs one simplex search per low-discrepancy start and reduces the results
/// in start order (ties go to the lowest start index).
MultistartResult multistart_maximize(const Objective& f, std::span<const Coordinate> coords,
                                     const OptimOptions& opts);

// --- Bell-specific ----------------------------------------------------------

struct ViolationResult {
  /// Decomposition at the evaluated (eta, F).
  BellValue best;
  /// Decomposition of the same point at eta = 1.
  BellValue unscaled;
  EntanglementParams params;
  bool params_free = false;
  std::vector<double> settings;
  double eta = 1.0;
  double noise = 0.0;
  std::size_t starts = 0;
  std::size_t starts_converged = 0;
  std::size_t best_duplicates = 0;
  std::size_t evaluations = 0;
};

/// Maximizes eta^2 J + eta S on (1-F)|psi><psi| + F I/d over the settings,
/// and over the entanglement parameters unless `fixed` pins them.
ViolationResult maximize(const Scenario& sc, const BellFunctional& f, double eta, double noise,
                         const std::optional<EntanglementParams>& fixed, const OptimOptions& opts);

inline constexpr double kEtaBracketLo = 0.5;
inline constexpr double kEtaBracketHi = 1.0;

struct EfficiencyThreshold {
  /// False when the functional is not violated at eta = 1.
  bool found = false;
  /// Smallest probed eta with a positive maximal violation.
  double eta_star = 1.0;
  /// True when the violation persisted down to the bracket floor.
  bool below_bracket = false;
  /// -S/J of the optimum at eta = 1; equals eta_star when the singles do
  /// not depend on the optimized parameters.
  double closed_form = 0.0;
  ViolationResult at_unit_efficiency;
  /// Maximizer at eta_star.
  ViolationResult at_threshold;
  std::size_t probes = 0;
};

EfficiencyThreshold critical_efficiency(const Scenario& sc, const BellFunctional& f,
                                        const std::optional<EntanglementParams>& fixed,
                                        const OptimOptions& opts);

struct NoiseThreshold {
  bool found = false;
  /// CH* / (CH* - CH_noise).
  double closed_form = 0.0;
  /// Largest probed F with a positive maximal violation.
  double bisection = 0.0;
  double optimum = 0.0;         // CH* at F = 0
  double noise_value = 0.0;     // CH on I/d
  ViolationResult at_zero_noise;
  std::size_t probes = 0;
};

NoiseThreshold noise_threshold(const Scenario& sc, const BellFunctional& f,
                               const std::optional<EntanglementParams>& fixed,
                               const OptimOptions& opts, double eta = 1.0);

}  // namespace bellthresh::optim
