#include "bellthresh/optim.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace bellthresh::optim {

namespace {

constexpr std::array<unsigned, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::size_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

double wrap(double x, const Interval& b) {
  const double width = b.hi - b.lo;
  if (!(width > 0.0)) return b.lo;
  double r = std::fmod(x - b.lo, width);
  if (r < 0.0) r += width;
  return b.lo + r;
}

double clip(double x, const Interval& b) { return std::clamp(x, b.lo, b.hi); }

struct Vertex {
  std::vector<double> x;
  double cost;  // negated objective
};

// Periodic coordinates float freely inside the search so that the simplex
// geometry never tears across the wrap point; they are wrapped on output.
void project(std::vector<double>& x, std::span<const Coordinate> coords) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!coords[i].periodic) x[i] = clip(x[i], coords[i].bounds);
  }
}

// One Nelder-Mead run with the adaptive coefficients of Gao and Han.
SimplexResult nelder_mead(const Objective& f, const std::vector<double>& start,
                          std::span<const Coordinate> coords, double step_fraction,
                          double tolerance, std::size_t max_iterations) {
  const std::size_t n = start.size();
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 1.0 / (2.0 * dn);
  const double delta = 1.0 - 1.0 / dn;

  SimplexResult out;
  auto cost = [&](const std::vector<double>& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
  };

  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  {
    std::vector<double> x0 = start;
    project(x0, coords);
    simplex.push_back({x0, cost(x0)});
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x = x0;
      const auto& b = coords[i].bounds;
      const double step = step_fraction * (b.hi - b.lo);
      // Step away from a clipped face when the start sits on it.
      x[i] += (!coords[i].periodic && x[i] + step > b.hi) ? -step : step;
      project(x, coords);
      simplex.push_back({x, cost(x)});
    }
  }

  std::vector<double> centroid(n);
  std::vector<double> trial(n);
  auto point = [&](double t, const std::vector<double>& worst) {
    std::vector<double> x(n);
    for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + t * (centroid[d] - worst[d]);
    project(x, coords);
    return x;
  };

  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.cost < b.cost; });
    const double spread = simplex.back().cost - simplex.front().cost;
    double diameter = 0.0;
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t d = 0; d < n; ++d) {
        diameter = std::max(diameter, std::abs(simplex[v].x[d] - simplex[0].x[d]));
      }
    }
    if (spread <= tolerance || diameter <= 1e-12) {
      out.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[v].x[d];
    }
    for (auto& c : centroid) c /= dn;

    Vertex& worst = simplex.back();
    const double best_cost = simplex.front().cost;
    const double second_worst = simplex[n - 1].cost;

    auto xr = point(alpha, worst.x);
    const double fr = cost(xr);
    if (fr < best_cost) {
      auto xe = point(alpha * beta, worst.x);
      const double fe = cost(xe);
      if (fe < fr) {
        worst = {std::move(xe), fe};
      } else {
        worst = {std::move(xr), fr};
      }
      continue;
    }
    if (fr < second_worst) {
      worst = {std::move(xr), fr};
      continue;
    }
    if (fr < worst.cost) {
      auto xc = point(alpha * gamma, worst.x);
      const double fc = cost(xc);
      if (fc <= fr) {
        worst = {std::move(xc), fc};
        continue;
      }
    } else {
      auto xc = point(-gamma, worst.x);
      const double fc = cost(xc);
      if (fc < worst.cost) {
        worst = {std::move(xc), fc};
        continue;
      }
    }
    // Shrink toward the best vertex.
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t d = 0; d < n; ++d) {
        simplex[v].x[d] = simplex[0].x[d] + delta * (simplex[v].x[d] - simplex[0].x[d]);
      }
      project(simplex[v].x, coords);
      simplex[v].cost = cost(simplex[v].x);
    }
  }

  const auto best = std::min_element(simplex.begin(), simplex.end(),
                                     [](const Vertex& a, const Vertex& b) { return a.cost < b.cost; });
  out.x = best->x;
  out.value = -best->cost;
  return out;
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
  return requested;
}

}  // namespace

void OptimOptions::validate() const {
  if (multistarts < 1) throw std::invalid_argument("multistarts must be at least 1");
  if (!(function_tolerance > 0.0)) throw std::invalid_argument("function tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(threshold_tolerance > 0.0)) throw std::invalid_argument("threshold tolerance must be positive");
  for (const auto& b : entanglement_bounds) {
    if (!(std::isfinite(b.lo) && std::isfinite(b.hi) && b.lo <= b.hi)) {
      throw std::invalid_argument("entanglement bounds must be finite with lo <= hi");
    }
  }
}

SimplexResult simplex_maximize(const Objective& f, std::vector<double> start,
                               std::span<const Coordinate> coords, double tolerance,
                               std::size_t max_iterations) {
  if (start.size() != coords.size()) throw std::invalid_argument("start point dimension mismatch");
  if (start.empty()) throw std::invalid_argument("nothing to optimize");

  SimplexResult total;
  double step = 0.1;
  std::vector<double> x = std::move(start);
  bool first = true;
  std::size_t budget = max_iterations;
  // Restarting from the best vertex with a fresh simplex guards against the
  // classic Nelder-Mead collapse onto a non-stationary point.
  for (int restart = 0; restart < 8 && budget > 0; ++restart) {
    SimplexResult run = nelder_mead(f, x, coords, step, tolerance, budget);
    total.evaluations += run.evaluations;
    total.iterations += run.iterations;
    budget -= std::min(budget, run.iterations);
    const bool improved = first || run.value > total.value + tolerance;
    if (first || run.value > total.value) {
      total.value = run.value;
      total.x = run.x;
    }
    total.converged = run.converged;
    first = false;
    if (!improved || !run.converged) break;
    x = total.x;
    step = 0.02;
  }
  for (std::size_t i = 0; i < total.x.size(); ++i) {
    if (coords[i].periodic) total.x[i] = wrap(total.x[i], coords[i].bounds);
  }
  return total;
}

std::vector<double> halton_point(std::uint64_t seed, std::size_t index,
                                 std::span<const Coordinate> coords) {
  if (coords.size() > kPrimes.size()) throw std::invalid_argument("too many coordinates for the Halton sequence");
  std::mt19937_64 rng(seed);
  std::vector<double> x(coords.size());
  for (std::size_t d = 0; d < coords.size(); ++d) {
    const double shift = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double u = radical_inverse(index + 1, kPrimes[d]) + shift;
    u -= std::floor(u);
    const auto& b = coords[d].bounds;
    x[d] = b.lo + u * (b.hi - b.lo);
  }
  return x;
}

MultistartResult multistart_maximize(const Objective& f, std::span<const Coordinate> coords,
                                     const OptimOptions& opts) {
  opts.validate();
  const std::size_t starts = opts.multistarts;
  std::vector<SimplexResult> results(starts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s = next.fetch_add(1); s < starts; s = next.fetch_add(1)) {
      results[s] = simplex_maximize(f, halton_point(opts.rng_seed, s, coords), coords,
                                    opts.function_tolerance, opts.max_iterations);
    }
  };
  const std::size_t threads = std::min(resolve_threads(opts.threads), starts);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  MultistartResult out;
  out.start_values.reserve(starts);
  bool have_best = false;
  for (std::size_t s = 0; s < starts; ++s) {
    const auto& r = results[s];
    out.start_values.push_back(r.value);
    if (r.converged) ++out.starts_converged;
    if (!have_best || r.value > out.best.value) {
      out.best = r;
      out.best_start = s;
      have_best = true;
    }
  }
  std::size_t evaluations = 0;
  for (const auto& r : results) evaluations += r.evaluations;
  out.best.evaluations = evaluations;
  for (double v : out.start_values) {
    if (std::abs(v - out.best.value) <= 1e-6) ++out.best_duplicates;
  }
  if (out.starts_converged == 0) {
    throw OptimizationFailure("no multistart converged (" + std::to_string(starts) +
                              " starts, best value " + std::to_string(out.best.value) + ")");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bell-specific

namespace {

void check_inputs(const Scenario& sc, const BellFunctional& f, double eta, double noise) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("detection efficiency must lie in [0,1]");
  if (!(noise >= 0.0 && noise <= 1.0)) throw std::invalid_argument("noise fraction must lie in [0,1]");
  if (noise > 0.0 && !sc.is_qutrit()) throw std::invalid_argument("noise is only modeled for qutrit scenarios");
  if (!f.compatible_with(sc)) {
    throw std::invalid_argument("functional " + f.name() + " is incompatible with scenario " + sc.name());
  }
}

BellValue evaluate_point(const Scenario& sc, const BellFunctional& f, double noise,
                         const scenarios::SettingParams& settings, const EntanglementParams& p) {
  const auto psi = scenarios::entangled_state(sc, p);
  if (noise > 0.0) return bell::evaluate(f, sc, scenarios::mix_with_noise(psi, noise), settings);
  return bell::evaluate(f, sc, psi, settings);
}

}  // namespace

ViolationResult maximize(const Scenario& sc, const BellFunctional& f, double eta, double noise,
                         const std::optional<EntanglementParams>& fixed, const OptimOptions& opts) {
  check_inputs(sc, f, eta, noise);
  opts.validate();

  const std::size_t n_settings = sc.setting_coords();
  std::vector<Coordinate> coords(n_settings, Coordinate{{0.0, sc.setting_period()}, true});
  const bool free_params = !fixed.has_value();
  if (free_params) {
    const auto bounds = opts.entanglement_bounds.empty() ? sc.entanglement_bounds() : opts.entanglement_bounds;
    if (bounds.size() != sc.entanglement_coords()) {
      throw std::invalid_argument("scenario " + sc.name() + " expects " +
                                  std::to_string(sc.entanglement_coords()) + " entanglement bounds");
    }
    for (const auto& b : bounds) coords.push_back({b, false});
  }

  auto params_of = [&](std::span<const double> x) {
    if (!free_params) return *fixed;
    EntanglementParams p{x[n_settings], 0.0};
    if (sc.entanglement_coords() > 1) p.b = x[n_settings + 1];
    return p;
  };

  const Objective objective = [&](std::span<const double> x) {
    const scenarios::SettingParams settings(sc, {x.begin(), x.begin() + n_settings});
    return bell::value_at_efficiency(evaluate_point(sc, f, noise, settings, params_of(x)), eta);
  };

  const auto ms = multistart_maximize(objective, coords, opts);

  ViolationResult out;
  const std::span<const double> x(ms.best.x);
  const scenarios::SettingParams settings(sc, {x.begin(), x.begin() + n_settings});
  out.params = params_of(x);
  out.params_free = free_params;
  out.settings.assign(settings.coords().begin(), settings.coords().end());
  out.unscaled = evaluate_point(sc, f, noise, settings, out.params);
  out.best = bell::at_efficiency(out.unscaled, eta);
  out.eta = eta;
  out.noise = noise;
  out.starts = opts.multistarts;
  out.starts_converged = ms.starts_converged;
  out.best_duplicates = ms.best_duplicates;
  out.evaluations = ms.best.evaluations;
  return out;
}

EfficiencyThreshold critical_efficiency(const Scenario& sc, const BellFunctional& f,
                                        const std::optional<EntanglementParams>& fixed,
                                        const OptimOptions& opts) {
  EfficiencyThreshold out;
  out.at_unit_efficiency = maximize(sc, f, 1.0, 0.0, fixed, opts);
  ++out.probes;
  const auto& unit = out.at_unit_efficiency;
  if (!(unit.best.total > 0.0)) return out;
  out.found = true;
  out.closed_form = -unit.unscaled.single / unit.unscaled.joint;
  out.at_threshold = unit;

  double lo = kEtaBracketLo;
  double hi = kEtaBracketHi;
  {
    auto floor_probe = maximize(sc, f, lo, 0.0, fixed, opts);
    ++out.probes;
    if (floor_probe.best.total > 0.0) {
      out.below_bracket = true;
      out.eta_star = lo;
      out.at_threshold = std::move(floor_probe);
      return out;
    }
  }
  while (hi - lo > opts.threshold_tolerance) {
    const double mid = 0.5 * (lo + hi);
    auto probe = maximize(sc, f, mid, 0.0, fixed, opts);
    ++out.probes;
    if (probe.best.total > 0.0) {
      hi = mid;
      out.at_threshold = std::move(probe);
    } else {
      lo = mid;
    }
  }
  out.eta_star = hi;
  return out;
}

NoiseThreshold noise_threshold(const Scenario& sc, const BellFunctional& f,
                               const std::optional<EntanglementParams>& fixed,
                               const OptimOptions& opts, double eta) {
  if (!sc.is_qutrit()) throw std::invalid_argument("noise thresholds are defined for qutrit scenarios");
  NoiseThreshold out;
  out.at_zero_noise = maximize(sc, f, eta, 0.0, fixed, opts);
  ++out.probes;
  const auto& best = out.at_zero_noise;
  out.optimum = best.best.total;

  const scenarios::SettingParams settings(sc, best.settings);
  const auto psi = scenarios::entangled_state(sc, best.params);
  const auto noise_value = bell::evaluate(f, sc, scenarios::mix_with_noise(psi, 1.0), settings);
  out.noise_value = bell::value_at_efficiency(noise_value, eta);

  if (!(out.optimum > 0.0)) {
    out.closed_form = 0.0;
    out.bisection = 0.0;
    return out;
  }
  out.found = true;
  out.closed_form = out.optimum / (out.optimum - out.noise_value);

  double lo = 0.0;
  double hi = 1.0;
  {
    const auto top = maximize(sc, f, eta, hi, fixed, opts);
    ++out.probes;
    if (top.best.total > 0.0) {
      out.bisection = 1.0;
      return out;
    }
  }
  while (hi - lo > opts.threshold_tolerance) {
    const double mid = 0.5 * (lo + hi);
    const auto probe = maximize(sc, f, eta, mid, fixed, opts);
    ++out.probes;
    (probe.best.total > 0.0 ? lo : hi) = mid;
  }
  out.bisection = lo;
  return out;
}

}  // namespace bellthresh::optim
