#include "scapm/normal.hpp"

#include "scapm/error.hpp"

#include <cmath>
#include <numbers>

namespace scapm {

namespace {

// P. J. Acklam's rational approximation, relative error below 1.15e-9.
constexpr double kA[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                         -2.759285104469687e+02, 1.383577518672690e+02,
                         -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kB[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                         -1.556989798598866e+02, 6.680131188771931e+01,
                         -1.328068155288572e+01};
constexpr double kC[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                         -2.400758277161838e+00, -2.549732539343734e+00,
                         4.374664141464968e+00,  2.938163982698783e+00};
constexpr double kD[] = {7.784695709041462e-03, 3.224671290700398e-01,
                         2.445134137142996e+00, 3.754408661907416e+00};
constexpr double kLowBreak = 0.02425;

// p in (0, 0.5]
double acklam_lower(double p) {
  if (p < kLowBreak) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
           ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double t = q * q;
  return (((((kA[0] * t + kA[1]) * t + kA[2]) * t + kA[3]) * t + kA[4]) * t + kA[5]) * q /
         (((((kB[0] * t + kB[1]) * t + kB[2]) * t + kB[3]) * t + kB[4]) * t + 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("inverse_normal_cdf: p must lie in (0, 1)");
  }
  // Work in the lower half, where 1 - p is exact for p >= 0.5.
  if (p > 0.5) return -inverse_normal_cdf(1.0 - p);
  if (p == 0.5) return 0.0;

  double x = acklam_lower(p);
  // One Halley step against the erfc-based CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double upper_normal_quantile(double p) { return inverse_normal_cdf(1.0 - p); }

}  // namespace scapm
