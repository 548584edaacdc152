#include "scapm/error.hpp"
#include "scapm/normal.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace {

// Independent oracle: bisection on the long-double erfc CDF.
long double cdf_ld(long double x) { return 0.5L * std::erfc(-x / std::sqrt(2.0L)); }

long double bisect_quantile(long double p) {
  long double lo = -40.0L;
  long double hi = 40.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (cdf_ld(mid) < p) lo = mid; else hi = mid;
  }
  return 0.5L * (lo + hi);
}

TEST(InverseNormalCdf, Median) { EXPECT_EQ(scapm::inverse_normal_cdf(0.5), 0.0); }

TEST(InverseNormalCdf, KnownQuantiles) {
  // Frozen from the bisection oracle (agrees with mpmath to 1e-15).
  EXPECT_NEAR(scapm::inverse_normal_cdf(0.975), 1.959964, 1e-5);
  EXPECT_NEAR(scapm::inverse_normal_cdf(0.841344746), 1.000000, 1e-5);
  EXPECT_NEAR(static_cast<double>(bisect_quantile(0.975L)), 1.959963984540054, 1e-12);
}

TEST(InverseNormalCdf, MatchesBisectionOracle) {
  for (double p : {1e-6, 1e-4, 0.01, 0.02425, 0.03, 0.2, 0.49, 0.51, 0.8, 0.97575, 0.999, 1 - 1e-6}) {
    const double q = scapm::inverse_normal_cdf(p);
    EXPECT_NEAR(q, static_cast<double>(bisect_quantile(p)), 1e-9 * std::max(1.0, std::abs(q)))
        << "p=" << p;
  }
}

TEST(InverseNormalCdf, Symmetric) {
  // p chosen so that 1 - p is exact in binary.
  for (double p : {0x1p-20, 0x1p-7, 0.25, 0.375}) {
    EXPECT_EQ(scapm::inverse_normal_cdf(p), -scapm::inverse_normal_cdf(1.0 - p));
  }
}

TEST(InverseNormalCdf, RoundTripLogGrid) {
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double p = std::exp(std::log(1e-6) + (std::log(0.5) - std::log(1e-6)) * i / 400.0);
    for (double x : {p, 1.0 - p}) {
      worst = std::max(worst, std::abs(scapm::normal_cdf(scapm::inverse_normal_cdf(x)) - x));
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(InverseNormalCdf, RejectsOutsideUnitInterval) {
  for (double p : {0.0, 1.0, -0.1, 1.5, std::numeric_limits<double>::quiet_NaN()}) {
    EXPECT_THROW(scapm::inverse_normal_cdf(p), scapm::DomainError) << p;
  }
}

TEST(NormalCdf, HalfAtZeroAndKnownValue) {
  EXPECT_DOUBLE_EQ(scapm::normal_cdf(0.0), 0.5);
  EXPECT_NEAR(scapm::normal_cdf(0.5), 0.691462461274013, 1e-15);
}

}  // namespace
