#pragma once

#include "scapm/market_model.hpp"
#include "scapm/simulation.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace scapm {

/// The index-beating wealth process K_t = R_t dP/dQ, compiled per segment.
///
/// log K accumulates (r + 0.5||theta||^2) dt + theta . dW on the same
/// increments as the prices. A segment with zero discrepancy has
/// theta = sigma^0 and K moves exactly like the index there, so it reuses
/// the index coefficients.
class WealthModel {
 public:
  WealthModel(const Schedule& schedule, const SimulationConfig& cfg,
              double tol = kViabilityTolerance);
  WealthModel(const MarketSpec& spec, const SimulationConfig& cfg,
              double tol = kViabilityTolerance);

  const PriceModel& prices() const { return prices_; }
  const RiskProfile& profile(std::size_t seg) const { return profiles_[seg]; }

  /// log_K over the grid, log_K[0] = 0.
  void propagate(std::span<const double> dW, std::span<double> log_K) const;

  /// Integral of ||disc_s||^2 from 0 to grid time t_i.
  double integrated_disc_sq(std::size_t i) const;

  /// Integral of r_s from 0 to t_i.
  double integrated_rate(std::size_t i) const;

 private:
  PriceModel prices_;
  std::vector<RiskProfile> profiles_;
  std::vector<double> drift_;
  std::vector<Eigen::VectorXd> vol_;
  std::vector<double> disc_sq_cum_;
  std::vector<double> rate_cum_;
};

/// Returns the bundle with log_K filled. Throws StructuralError if the
/// bundle's dimensions disagree with the market.
PathBundle log_wealth_path(const MarketSpec& spec, PathBundle bundle);
PathBundle log_wealth_path(const Schedule& schedule, PathBundle bundle);

/// [log K(t) - log S^0(t)] - [0.5 int ||disc||^2 + int disc . dW], per path
/// (rows) and grid time (columns). Zero up to rounding.
Eigen::MatrixXd central_identity_residual(const MarketSpec& spec, const PathBundle& bundle);
Eigen::MatrixXd central_identity_residual(const Schedule& schedule, const PathBundle& bundle);

/// Single-path form used by the streaming drivers.
double max_identity_residual(const WealthModel& model, std::span<const double> dW,
                             std::span<const double> log_S, std::span<const double> log_K);

struct ReplicationResult {
  std::vector<double> max_error;  ///< per path, max over grid |log V - log K|
  std::vector<char> censored;     ///< 1 if V hit zero or below
  std::size_t censored_count = 0;
  double mean_max_error = 0.0;    ///< over uncensored paths
  double worst_max_error = 0.0;
};

/// Runs the discretised self-financing portfolio with constant fractions pi
/// V(t+dt) = V(t) [1 + (r + pi . (mu - r1)) dt + pi^T sigma dW]
/// along each stored path and compares it with the analytic log K.
ReplicationResult replicate_and_compare(const MarketSpec& spec, const PathBundle& bundle);

/// Single-path replication error; returns a negative value for a censored path.
double replication_error(const MarketSpec& spec, const Eigen::VectorXd& pi, double dt,
                         std::span<const double> dW, std::span<const double> log_K,
                         Eigen::Index dim);

/// (excess - V/2) / sqrt(2 V ln ln V). Throws DomainError unless V > e.
double lil_normalize(double excess, double integrated_disc_sq);

/// Iterated-logarithm statistic at grid time t for every path.
Eigen::VectorXd lil_statistic(const MarketSpec& spec, const PathBundle& bundle, double t);
Eigen::VectorXd lil_statistic(const Schedule& schedule, const PathBundle& bundle, double t);

/// Streams prices and wealth. Called concurrently for different paths.
using WealthVisitor = std::function<void(std::size_t path, std::span<const double> dW,
                                         std::span<const double> log_S,
                                         std::span<const double> log_K)>;
void simulate_with_wealth(const WealthModel& model, const SimulationConfig& cfg,
                          unsigned threads, const WealthVisitor& visit);

}  // namespace scapm
