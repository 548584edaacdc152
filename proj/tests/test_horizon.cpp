#include "scapm/error.hpp"
#include "scapm/horizon.hpp"
#include "scapm/normal.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using scapm::testing::running_example;
using scapm::testing::with_discrepancy;

TEST(Thresholds, FrozenValues) {
  auto t = scapm::detection_thresholds(0.05, 0.05, 100.0);
  EXPECT_NEAR(t.weak, 0.45939226327910099, 1e-13);
  EXPECT_NEAR(t.loose, 0.57374540845837619, 1e-13);
  EXPECT_NEAR(t.improved, 0.32897072539029454, 1e-13);

  t = scapm::detection_thresholds(0.025, 0.1, 1.0);
  EXPECT_NEAR(t.weak, 4.8662724689721898, 1e-12);
  EXPECT_NEAR(t.loose, 6.0658939953694556, 1e-12);
  EXPECT_NEAR(t.improved, 3.2415155500846546, 1e-12);

  t = scapm::detection_thresholds(0.01, 0.01, 250.0);
  EXPECT_NEAR(t.weak, 0.38897602424042486, 1e-13);
  EXPECT_NEAR(t.loose, 0.48620335296190543, 1e-13);
  EXPECT_NEAR(t.improved, 0.29426231647438218, 1e-13);
}

TEST(Thresholds, OrderingAndScaling) {
  for (double eps : {0.001, 0.01, 0.05, 0.2, 0.45}) {
    for (double delta : {0.001, 0.05, 0.3, 0.9}) {
      const auto a = scapm::detection_thresholds(eps, delta, 1.0);
      const auto b = scapm::detection_thresholds(eps, delta, 400.0);
      EXPECT_LE(a.improved, a.weak + 1e-15);
      EXPECT_LE(a.weak, a.loose + 1e-15);
      EXPECT_NEAR(b.weak * 20.0, a.weak, 1e-12 * a.weak);
    }
  }
}

TEST(Thresholds, DomainErrors) {
  EXPECT_THROW(scapm::detection_thresholds(0.0, 0.05, 1.0), scapm::DomainError);
  EXPECT_THROW(scapm::detection_thresholds(0.05, 1.0, 1.0), scapm::DomainError);
  EXPECT_THROW(scapm::detection_thresholds(0.05, 0.05, 0.0), scapm::DomainError);
  EXPECT_THROW(scapm::outperformance_probability(-0.1, 1.0, 0.5), scapm::DomainError);
  EXPECT_THROW(scapm::outperformance_probability(0.1, 1.0, 0.0), scapm::DomainError);
}

TEST(Outperformance, FrozenValues) {
  EXPECT_NEAR(scapm::outperformance_probability(0.1, 100.0, 1.0), 0.6914624612740131, 1e-13);
  EXPECT_NEAR(scapm::outperformance_probability(0.1, 100.0, 0.05), 0.0062848715758696062, 1e-15);
  EXPECT_NEAR(scapm::outperformance_probability(0.3, 100.0, 0.05), 0.69196312252882012, 1e-13);
  EXPECT_EQ(scapm::outperformance_probability(0.0, 100.0, 0.05), 0.0);
  EXPECT_EQ(scapm::outperformance_probability(0.0, 100.0, 1.0), 0.5);
}

TEST(Outperformance, WeakThresholdGivesExactlyOneMinusEpsilon) {
  for (double eps : {0.001, 0.01, 0.05, 0.2, 0.45}) {
    for (double delta : {0.001, 0.05, 0.3, 0.9}) {
      for (double T : {0.5, 10.0, 1000.0}) {
        const double w = scapm::detection_thresholds(eps, delta, T).weak;
        EXPECT_NEAR(scapm::outperformance_probability(w, T, delta), 1.0 - eps, 1e-9);
      }
    }
  }
}

TEST(Outperformance, MonotoneInDiscrepancyAndHorizon) {
  double prev = -1.0;
  for (double d = 0.01; d < 2.0; d += 0.01) {
    const double p = scapm::outperformance_probability(d, 50.0, 0.1);
    EXPECT_GE(p, prev);
    prev = p;
  }
  prev = -1.0;
  for (double T = 1.0; T < 5000.0; T *= 1.3) {
    const double p = scapm::outperformance_probability(0.1, T, 0.1);
    EXPECT_GE(p, prev);
    prev = p;
  }
}

TEST(HorizonReport, VerdictFollowsWeakThreshold) {
  const auto spec = running_example();  // ||disc|| = 0.1
  const auto short_run = scapm::horizon_report(spec, 0.05, 0.05, 100.0);
  EXPECT_EQ(short_run.verdict, scapm::Verdict::kScapmApproxHolds);
  EXPECT_NEAR(short_run.disc_norm, 0.1, 1e-15);
  EXPECT_LT(short_run.p_outperform, 0.95);

  const auto long_run = scapm::horizon_report(spec, 0.05, 0.05, 3000.0);
  EXPECT_EQ(long_run.verdict, scapm::Verdict::kOutperformsWhp);
  EXPECT_GE(long_run.p_outperform, 0.95);
  EXPECT_NEAR(long_run.z_epsilon, 1.6448536269514722, 1e-12);

  EXPECT_EQ(scapm::to_string(scapm::Verdict::kOutperformsWhp), "OUTPERFORMS_WHP");
  EXPECT_EQ(scapm::to_string(scapm::Verdict::kScapmApproxHolds), "SCAPM_APPROX_HOLDS");
}

TEST(HorizonReport, TieCountsAsOutperformance) {
  const double w = scapm::detection_thresholds(0.1, 0.2, 30.0).weak;
  EXPECT_EQ(scapm::horizon_report(w, 0.1, 0.2, 30.0).verdict, scapm::Verdict::kOutperformsWhp);
  EXPECT_EQ(scapm::horizon_report(std::nextafter(w, 0.0), 0.1, 0.2, 30.0).verdict,
            scapm::Verdict::kScapmApproxHolds);
}

TEST(HorizonReport, VerdictAgreesWithProbabilityOnRandomInputs) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int disagreements = 0;
  for (int i = 0; i < 5000; ++i) {
    const double eps = 0.001 + 0.49 * u(gen);
    const double delta = 0.001 + 0.99 * u(gen);
    const double T = std::exp(8.0 * u(gen) - 2.0);
    const double d = 3.0 * u(gen);
    const auto rep = scapm::horizon_report(d, eps, delta, T);
    const bool by_prob = rep.p_outperform >= 1.0 - eps;
    const bool by_threshold = rep.verdict == scapm::Verdict::kOutperformsWhp;
    // Only a knife-edge draw could split the two; require agreement away from it.
    if (by_prob != by_threshold && std::abs(rep.p_outperform - (1.0 - eps)) > 1e-9) ++disagreements;
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(Wilson, FrozenValues) {
  auto ci = scapm::wilson_interval(50, 100, 0.99);
  EXPECT_NEAR(ci.lo, 0.37527962504483982, 1e-12);
  EXPECT_NEAR(ci.hi, 0.62472037495516018, 1e-12);
  ci = scapm::wilson_interval(0, 20, 0.99);
  EXPECT_NEAR(ci.lo, 0.0, 1e-15);
  EXPECT_NEAR(ci.hi, 0.24910540109875347, 1e-12);
  ci = scapm::wilson_interval(7, 1000, 0.99);
  EXPECT_NEAR(ci.lo, 0.0027411771547325059, 1e-13);
  EXPECT_NEAR(ci.hi, 0.017757711440026629, 1e-13);
  EXPECT_THROW(scapm::wilson_interval(0, 0, 0.99), scapm::DomainError);
  EXPECT_THROW(scapm::wilson_interval(3, 2, 0.99), scapm::DomainError);
}

TEST(MonteCarloOutperformance, ZeroDiscrepancyNeverClearsPositiveHurdle) {
  const auto spec = with_discrepancy(running_example(), Eigen::VectorXd::Zero(2));
  const auto mc = scapm::monte_carlo_outperformance(spec, {100.0, 1, 2000, 4}, 0.5);
  EXPECT_EQ(mc.successes, 0u);
  EXPECT_EQ(mc.probability, 0.0);
}

TEST(MonteCarloOutperformance, MatchesClosedForm) {
  const auto spec = running_example();
  const std::size_t n = 100'000;
  const auto mc = scapm::monte_carlo_outperformance(spec, {100.0, 1, n, 2024}, 1.0);
  const double p = scapm::outperformance_probability(0.1, 100.0, 1.0);
  EXPECT_EQ(mc.trials, n);
  EXPECT_NEAR(mc.probability, p, 4.0 * std::sqrt(p * (1.0 - p) / n));
  EXPECT_TRUE(mc.ci99.contains(p));
}

TEST(MonteCarloOutperformance, IntervalsAreCalibrated) {
  const auto spec = running_example();
  const double delta = 0.5;
  const double p = scapm::outperformance_probability(0.1, 200.0, delta);
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto mc = scapm::monte_carlo_outperformance(spec, {200.0, 1, 2000, 1000 + seed}, delta);
    covered += mc.ci99.contains(p) ? 1 : 0;
  }
  // Nominal 99%; four or fewer misses out of 100 has probability above 0.997.
  EXPECT_GE(covered, 96);
}

TEST(AsymptoticRatio, ConcentratesAtOneHalf) {
  const auto spec = running_example();
  const scapm::SimulationConfig cfg{10'000.0, 100, 2000, 12};
  const auto rows = scapm::asymptotic_ratio_experiment(spec, cfg, {100.0, 1000.0, 10'000.0});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_NEAR(row.scaled_time, 0.01 * row.t, 1e-12 * row.t);
    EXPECT_NEAR(row.expected_sd, 1.0 / std::sqrt(row.scaled_time), 1e-14);
    EXPECT_NEAR(row.mean, 0.5, 4.0 * row.standard_error);
    EXPECT_NEAR(row.sd / row.expected_sd, 1.0, 0.08);
    EXPECT_LE(row.q05, row.q50);
    EXPECT_LE(row.q50, row.q95);
  }
  EXPECT_LT(rows[2].sd, rows[0].sd);
}

TEST(AsymptoticRatio, ZeroDiscrepancyIsDomainError) {
  const auto spec = with_discrepancy(running_example(), Eigen::VectorXd::Zero(2));
  EXPECT_THROW(scapm::asymptotic_ratio_experiment(spec, {10.0, 10, 10, 1}, {10.0}),
               scapm::DomainError);
}

}  // namespace
