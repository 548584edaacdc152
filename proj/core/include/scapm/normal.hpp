#pragma once

namespace scapm {

/// Standard normal CDF, 0.5 * erfc(-x / sqrt(2)).
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Quantile of the standard normal distribution: |Phi(result) - p| <= 1e-9
/// on (0, 1). Acklam's rational approximation followed by one Halley step
/// on the erfc-based CDF. Throws DomainError for p outside (0, 1).
double inverse_normal_cdf(double p);

/// Upper p-quantile, i.e. inverse_normal_cdf(1 - p).
double upper_normal_quantile(double p);

}  // namespace scapm
