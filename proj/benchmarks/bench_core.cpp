#include <benchmark/benchmark.h>

#include "bellthresh/bell.hpp"
#include "bellthresh/optim.hpp"
#include "bellthresh/scenarios.hpp"

using namespace bellthresh;
using scenarios::Scenario;

namespace {

std::vector<double> settings_for(const Scenario& sc) {
  std::vector<double> x(sc.setting_coords());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.37 * static_cast<double>(i + 1);
  return x;
}

void BM_ProbabilityTablePure(benchmark::State& state) {
  const auto sc = Scenario::tritter();
  const auto psi = scenarios::entangled_state(sc, {1.0, 1.0});
  const scenarios::SettingParams s(sc, settings_for(sc));
  for (auto _ : state) benchmark::DoNotOptimize(scenarios::ProbabilityTable(sc, psi, s));
}
BENCHMARK(BM_ProbabilityTablePure);

void BM_ProbabilityTableMixed(benchmark::State& state) {
  const auto sc = Scenario::tritter();
  const auto rho = scenarios::mix_with_noise(scenarios::entangled_state(sc, {1.0, 1.0}), 0.3);
  const scenarios::SettingParams s(sc, settings_for(sc));
  for (auto _ : state) benchmark::DoNotOptimize(scenarios::ProbabilityTable(sc, rho, s));
}
BENCHMARK(BM_ProbabilityTableMixed);

void BM_GeneralPathJoint(benchmark::State& state) {
  const auto sc = Scenario::biphoton(scenarios::OutcomePair::p1p3);
  const qcore::QuantumState psi = scenarios::entangled_state(sc, {-1.0, -1.0});
  const scenarios::SettingParams s(sc, settings_for(sc));
  for (auto _ : state) benchmark::DoNotOptimize(scenarios::joint_probability(sc, psi, s, 0, 1, 2, 0));
}
BENCHMARK(BM_GeneralPathJoint);

void BM_EvaluateFunctional(benchmark::State& state) {
  const auto sc = Scenario::tritter();
  const auto f = bell::ch_qutrit_functional();
  const auto psi = scenarios::entangled_state(sc, {1.0, 1.0});
  const scenarios::SettingParams s(sc, settings_for(sc));
  for (auto _ : state) benchmark::DoNotOptimize(bell::evaluate(f, sc, psi, s));
}
BENCHMARK(BM_EvaluateFunctional);

void BM_LhvMaxQutrit(benchmark::State& state) {
  const auto f = bell::ch_qutrit_functional();
  for (auto _ : state) benchmark::DoNotOptimize(bell::lhv_max(f));
}
BENCHMARK(BM_LhvMaxQutrit);

void BM_MaximizeFixed(benchmark::State& state) {
  const auto sc = Scenario::tritter();
  const auto f = bell::ch_qutrit_functional();
  optim::OptimOptions o;
  o.multistarts = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(optim::maximize(sc, f, 1.0, 0.0, scenarios::EntanglementParams{1.0, 1.0}, o));
  }
}
BENCHMARK(BM_MaximizeFixed)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
