#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace scapm {

/// Constant-coefficient multi-asset Black-Scholes market.
///
/// Row 0 of `sigma` and entry 0 of `mu` belong to the index; rows 1..K are
/// the stocks. `sigma` is (K+1) x D_b where D_b is the Brownian dimension.
/// All prices start at 1.
struct MarketSpec {
  double r = 0.0;
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  std::vector<std::string> labels;

  Eigen::Index num_securities() const { return sigma.rows(); }
  Eigen::Index brownian_dim() const { return sigma.cols(); }

  /// Excess appreciation mu - r*1.
  Eigen::VectorXd excess_return() const;

  /// Label of security k, falling back to "S<k>".
  std::string label(Eigen::Index k) const;

  /// Throws StructuralError on shape, finiteness or rank violations.
  void validate() const;
};

bool operator==(const MarketSpec& a, const MarketSpec& b);

/// Default relative tolerance used by check_viability/solve_theta.
inline constexpr double kViabilityTolerance = 1e-9;

struct ViabilityResult {
  bool viable = false;
  double residual = 0.0;          ///< ||sigma*theta_ls - (mu - r1)||
  double condition_number = 0.0;  ///< 2-norm condition number of sigma
};

/// Least-squares solve of sigma*theta = mu - r1. The market is viable iff
/// the residual norm is at most tol * max(||mu - r1||, 1e-12).
/// Throws StructuralError if sigma is rank deficient.
ViabilityResult check_viability(const MarketSpec& spec, double tol = kViabilityTolerance);

/// Market price of risk. Exact inverse when D_b = K+1, normal equations
/// otherwise. Throws NonViableMarket (carrying the residual) or
/// StructuralError.
Eigen::VectorXd solve_theta(const MarketSpec& spec, double tol = kViabilityTolerance);

struct RiskProfile {
  Eigen::VectorXd theta;
  Eigen::VectorXd disc;             ///< theta - sigma^0
  double disc_norm_sq = 0.0;
  Eigen::VectorXd scapm_residuals;  ///< mu^k - r - sigma^k . sigma^0
  Eigen::VectorXd deficits;         ///< 0.5 ||theta - sigma^k||^2
  double optimal_growth_rate = 0.0; ///< r + 0.5 ||theta||^2
  double condition_number = 0.0;

  double disc_norm() const;
  bool scapm_holds() const { return disc_norm_sq == 0.0; }
};

/// Scale-aware tolerance below which SCAPM residuals count as zero.
inline constexpr double kScapmTolerance = 1e-12;

/// Derives every static risk quantity. When all SCAPM residuals vanish to
/// within kScapmTolerance (scaled by the coefficient magnitude), sigma^0 is
/// the exact market price of risk and theta is set to it, so disc is
/// exactly zero.
RiskProfile risk_profile(const MarketSpec& spec, double tol = kViabilityTolerance);

/// Fractions of wealth held in each risky security (the rest earns r) with
/// sigma^T pi = theta. Minimum-norm solution when D_b < K+1.
Eigen::VectorXd replication_weights(const MarketSpec& spec, double tol = kViabilityTolerance);

/// Same, from an already computed theta.
Eigen::VectorXd replication_weights(const MarketSpec& spec, const Eigen::VectorXd& theta);

}  // namespace scapm
