#include "scapm/error.hpp"
#include "scapm/normal.hpp"
#include "scapm/simulation.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace {

using scapm::SimulationConfig;
using scapm::testing::make_market;
using scapm::testing::running_example;

TEST(GenerateIncrements, DeterministicPerPath) {
  const SimulationConfig cfg{1.0, 50, 10, 1234};
  const auto a = scapm::generate_increments(cfg, 3, 2);
  const auto b = scapm::generate_increments(cfg, 3, 2);
  EXPECT_TRUE((a.array() == b.array()).all());
  const auto c = scapm::generate_increments(cfg, 4, 2);
  EXPECT_FALSE((a.array() == c.array()).all());
  // Call order does not matter.
  (void)scapm::generate_increments(cfg, 9, 2);
  const auto d = scapm::generate_increments(cfg, 3, 2);
  EXPECT_TRUE((a.array() == d.array()).all());
}

TEST(GenerateIncrements, SeedChangesOutput) {
  const auto a = scapm::generate_increments({1.0, 20, 2, 1}, 0, 1);
  const auto b = scapm::generate_increments({1.0, 20, 2, 2}, 0, 1);
  EXPECT_FALSE((a.array() == b.array()).all());
}

TEST(GenerateIncrements, MeanAndVarianceConcentrate) {
  const SimulationConfig cfg{1.0, 100'000, 1, 99};
  const auto m = scapm::generate_increments(cfg, 0, 2);
  const double dt = cfg.dt();
  const double n = static_cast<double>(m.size());
  const double mean = m.mean();
  EXPECT_LE(std::abs(mean), 4.0 * std::sqrt(dt) / std::sqrt(n));
  const double var = (m.array() - mean).square().sum() / (n - 1.0);
  EXPECT_NEAR(var / dt, 1.0, 0.05);
}

TEST(GenerateIncrements, RejectsPathOutOfRange) {
  EXPECT_THROW(scapm::generate_increments({1.0, 5, 2, 0}, 2, 1), scapm::ConfigError);
}

TEST(SimulationConfig, Validation) {
  EXPECT_THROW((SimulationConfig{0.0, 1, 1, 0}).validate(), scapm::ConfigError);
  EXPECT_THROW((SimulationConfig{1.0, 0, 1, 0}).validate(), scapm::ConfigError);
  EXPECT_THROW((SimulationConfig{1.0, 1, 0, 0}).validate(), scapm::ConfigError);
  EXPECT_THROW((SimulationConfig{NAN, 1, 1, 0}).validate(), scapm::ConfigError);
}

TEST(SimulatePrices, StartsAtOneAndFollowsRecursion) {
  const auto spec = running_example();
  const SimulationConfig cfg{2.0, 40, 5, 7};
  const auto b = scapm::simulate_prices(spec, cfg);
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    const auto S = b.log_S(p);
    const auto W = b.dW(p);
    EXPECT_EQ(S(0, 0), 0.0);
    EXPECT_EQ(S(0, 1), 0.0);
    for (Eigen::Index i = 0; i < 40; ++i) {
      for (Eigen::Index k = 0; k < 2; ++k) {
        const double expected = (spec.mu(k) - 0.5 * spec.sigma.row(k).squaredNorm()) * cfg.dt() +
                                spec.sigma.row(k).dot(W.row(i));
        EXPECT_NEAR(S(i + 1, k) - S(i, k), expected, 1e-15);
      }
    }
  }
  EXPECT_EQ(b.log_R()[0], 0.0);
  EXPECT_NEAR(b.log_R().back(), spec.r * 2.0, 1e-15);
  EXPECT_EQ(b.times().back(), 2.0);
}

TEST(SimulatePrices, DeterministicSecurity) {
  const auto spec = make_market(0.01, {0.07, 0.03}, {{0.2}, {0.0}});
  const SimulationConfig cfg{3.0, 30, 20, 5};
  const auto b = scapm::simulate_prices(spec, cfg);
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    EXPECT_NEAR(b.log_S(p)(30, 1), 0.03 * 3.0, 1e-14);
  }
}

TEST(SimulatePrices, LognormalMoments) {
  const auto spec = running_example();
  const double T = 2.0;
  const std::size_t n = 100'000;
  const auto b = scapm::simulate_prices(spec, {T, 1, n, 2024});
  for (Eigen::Index k = 0; k < 2; ++k) {
    std::vector<double> x(n);
    for (std::size_t p = 0; p < n; ++p) x[p] = b.log_S(p)(1, k);
    const double mean_S =
        std::accumulate(x.begin(), x.end(), 0.0, [](double a, double v) { return a + std::exp(v); }) / n;
    double ss_S = 0.0;
    for (double v : x) ss_S += std::pow(std::exp(v) - mean_S, 2);
    const double se = std::sqrt(ss_S / (n - 1.0) / n);
    EXPECT_NEAR(mean_S, std::exp(spec.mu(k) * T), 4.0 * se) << "k=" << k;

    const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean_x) * (v - mean_x);
    const double var_theory = spec.sigma.row(k).squaredNorm() * T;
    EXPECT_NEAR(ss / (n - 1.0) / var_theory, 1.0, 0.05) << "k=" << k;
  }
}

TEST(SimulatePrices, TerminalLogPriceKolmogorovSmirnov) {
  const auto spec = running_example();
  const double T = 1.5;
  const std::size_t n = 10'000;
  const auto b = scapm::simulate_prices(spec, {T, 8, n, 31337});
  const double m = (spec.mu(1) - 0.5 * spec.sigma.row(1).squaredNorm()) * T;
  const double s = spec.sigma.row(1).norm() * std::sqrt(T);
  std::vector<double> u(n);
  for (std::size_t p = 0; p < n; ++p) u[p] = scapm::normal_cdf((b.log_S(p)(8, 1) - m) / s);
  std::sort(u.begin(), u.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d = std::max({d, (i + 1.0) / n - u[i], u[i] - static_cast<double>(i) / n});
  }
  EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));  // 1% critical value
}

TEST(SimulatePrices, ThreadCountIsUnobservable) {
  const auto spec = running_example();
  const SimulationConfig cfg{1.0, 64, 37, 77};
  const auto one = scapm::simulate_prices(spec, cfg, 1);
  const auto many = scapm::simulate_prices(spec, cfg, 6);
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    const auto a = one.log_S_data(p);
    const auto c = many.log_S_data(p);
    ASSERT_TRUE(std::equal(a.begin(), a.end(), c.begin()));
    const auto wa = one.dW_data(p);
    const auto wc = many.dW_data(p);
    ASSERT_TRUE(std::equal(wa.begin(), wa.end(), wc.begin()));
  }
}

TEST(PriceModel, RefinementWithPairwiseSums) {
  const auto spec = running_example();
  const std::size_t n = 32;
  const scapm::SimulationConfig fine{1.0, 2 * n, 1, 11};
  const scapm::SimulationConfig coarse{1.0, n, 1, 11};
  const auto halves = scapm::generate_increments(fine, 0, 2);  // Normal(0, dt/2)
  scapm::RowMatrix fine_dW = halves;
  scapm::RowMatrix coarse_dW(n, 2);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    coarse_dW.row(i) = fine_dW.row(2 * i) + fine_dW.row(2 * i + 1);
  }
  const scapm::Schedule sched{{1.0, spec}};
  const scapm::PriceModel fm(sched, fine);
  const scapm::PriceModel cm(sched, coarse);
  std::vector<double> fS((2 * n + 1) * 2);
  std::vector<double> cS((n + 1) * 2);
  fm.propagate({fine_dW.data(), static_cast<std::size_t>(fine_dW.size())}, fS);
  cm.propagate({coarse_dW.data(), static_cast<std::size_t>(coarse_dW.size())}, cS);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(fS[2 * i * 2 + k], cS[i * 2 + k], 1e-14) << "i=" << i;
    }
  }
}

TEST(ScheduleSimulate, SingleSegmentMatchesConstantMarket) {
  const auto spec = running_example();
  const SimulationConfig cfg{4.0, 40, 6, 3};
  const auto a = scapm::simulate_prices(spec, cfg);
  const auto b = scapm::schedule_simulate({{4.0, spec}}, cfg);
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    const auto x = a.log_S_data(p);
    const auto y = b.log_S_data(p);
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin()));
  }
}

TEST(ScheduleSimulate, TwoIdenticalSegmentsMatchOneLongSegment) {
  const auto spec = running_example();
  const SimulationConfig cfg{4.0, 40, 6, 3};
  const auto a = scapm::schedule_simulate({{4.0, spec}}, cfg);
  const auto b = scapm::schedule_simulate({{2.0, spec}, {2.0, spec}}, cfg);
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    const auto x = a.log_S_data(p);
    const auto y = b.log_S_data(p);
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin()));
  }
}

TEST(ScheduleSimulate, UsesEachSegmentsCoefficients) {
  const auto a = make_market(0.0, {0.10}, {{0.0001}});
  const auto b = make_market(0.0, {-0.20}, {{0.0001}});
  const SimulationConfig cfg{2.0, 4, 1, 1};
  const auto bundle = scapm::schedule_simulate({{1.0, a}, {1.0, b}}, cfg);
  EXPECT_NEAR(bundle.log_S(0)(2, 0), 0.10, 1e-3);
  EXPECT_NEAR(bundle.log_S(0)(4, 0), -0.10, 1e-3);
}

TEST(ScheduleSimulate, RejectsBadSchedules) {
  const auto spec = running_example();
  const SimulationConfig cfg{1.0, 10, 1, 0};
  EXPECT_THROW(scapm::schedule_simulate({{0.55, spec}, {0.45, spec}}, cfg), scapm::ConfigError);
  EXPECT_THROW(scapm::schedule_simulate({{0.5, spec}}, cfg), scapm::ConfigError);
  EXPECT_THROW(scapm::schedule_simulate({}, cfg), scapm::ConfigError);
  const auto other = make_market(0.0, {0.1, 0.1, 0.1}, {{0.1, 0}, {0, 0.1}, {0.1, 0.1}});
  EXPECT_THROW(scapm::schedule_simulate({{0.5, spec}, {0.5, other}}, cfg), scapm::StructuralError);
}

TEST(GridIndex, OnAndOffGrid) {
  const SimulationConfig cfg{10.0, 100, 1, 0};
  EXPECT_EQ(scapm::grid_index(cfg, 0.0), 0u);
  EXPECT_EQ(scapm::grid_index(cfg, 2.5), 25u);
  EXPECT_EQ(scapm::grid_index(cfg, 10.0), 100u);
  EXPECT_THROW(scapm::grid_index(cfg, 2.55), scapm::ConfigError);
  EXPECT_THROW(scapm::grid_index(cfg, 11.0), scapm::ConfigError);
}

TEST(SimulateStreaming, AgreesWithStoredBundle) {
  const auto spec = running_example();
  const SimulationConfig cfg{1.0, 16, 9, 8};
  const auto bundle = scapm::simulate_prices(spec, cfg);
  const scapm::PriceModel model({{1.0, spec}}, cfg);
  std::vector<char> same(cfg.n_paths, 0);
  scapm::simulate_streaming(model, cfg, 3,
                            [&](std::size_t p, std::span<const double>, std::span<const double> s) {
                              const auto ref = bundle.log_S_data(p);
                              same[p] = std::equal(ref.begin(), ref.end(), s.begin());
                            });
  EXPECT_EQ(std::count(same.begin(), same.end(), char{1}), 9);
}

}  // namespace
