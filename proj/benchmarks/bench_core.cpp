#include "scapm/scapm.hpp"

#include <benchmark/benchmark.h>

namespace {

scapm::MarketSpec example() {
  scapm::MarketSpec s;
  s.r = 0.02;
  s.mu = Eigen::Vector2d(0.08, 0.05);
  s.sigma.resize(2, 2);
  s.sigma << 0.2, 0.0, 0.1, 0.3;
  return s;
}

void BM_InverseNormalCdf(benchmark::State& state) {
  double p = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scapm::inverse_normal_cdf(p));
    p += 1e-6;
    if (p >= 1.0) p = 1e-6;
  }
}
BENCHMARK(BM_InverseNormalCdf);

void BM_GenerateIncrements(benchmark::State& state) {
  const scapm::SimulationConfig cfg{1.0, static_cast<std::size_t>(state.range(0)), 1024, 7};
  std::size_t path = 0;
  for (auto _ : state) benchmark::DoNotOptimize(scapm::generate_increments(cfg, path++ % 1024, 2));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_GenerateIncrements)->Arg(256)->Arg(4096);

void BM_RiskProfile(benchmark::State& state) {
  const auto spec = example();
  for (auto _ : state) benchmark::DoNotOptimize(scapm::risk_profile(spec));
}
BENCHMARK(BM_RiskProfile);

void BM_SimulateWithWealth(benchmark::State& state) {
  const auto spec = example();
  const scapm::SimulationConfig cfg{10.0, 1000, static_cast<std::size_t>(state.range(0)), 3};
  for (auto _ : state) {
    auto b = scapm::log_wealth_path(spec, scapm::simulate_prices(spec, cfg));
    benchmark::DoNotOptimize(b.log_K(0)(1000));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_SimulateWithWealth)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
