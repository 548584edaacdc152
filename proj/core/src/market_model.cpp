#include "scapm/market_model.hpp"

#include "scapm/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scapm {

namespace {

struct RankInfo {
  bool full_column_rank = false;
  double condition_number = 0.0;
};

RankInfo column_rank(const Eigen::MatrixXd& sigma) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sigma);
  const auto& s = svd.singularValues();
  RankInfo info;
  if (s.size() == 0) return info;
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  info.full_column_rank = smax > 0.0 && smin > smax * 1e-12;
  info.condition_number = smin > 0.0 ? smax / smin : INFINITY;
  return info;
}

// Least-squares theta: exact inverse for square sigma, normal equations otherwise.
Eigen::VectorXd least_squares_theta(const MarketSpec& spec, const Eigen::VectorXd& excess) {
  if (spec.brownian_dim() == spec.num_securities()) {
    return spec.sigma.partialPivLu().solve(excess);
  }
  const Eigen::MatrixXd gram = spec.sigma.transpose() * spec.sigma;
  return gram.llt().solve(spec.sigma.transpose() * excess);
}

}  // namespace

Eigen::VectorXd MarketSpec::excess_return() const {
  return mu - Eigen::VectorXd::Constant(mu.size(), r);
}

std::string MarketSpec::label(Eigen::Index k) const {
  if (k >= 0 && static_cast<std::size_t>(k) < labels.size() && !labels[k].empty()) {
    return labels[k];
  }
  return "S" + std::to_string(k);
}

void MarketSpec::validate() const {
  const auto rows = sigma.rows();
  const auto cols = sigma.cols();
  if (rows < 1) throw StructuralError("sigma must have at least one row (the index)");
  if (cols < 1) throw StructuralError("sigma must have at least one column");
  if (mu.size() != rows) {
    std::ostringstream os;
    os << "mu has " << mu.size() << " entries but sigma has " << rows << " rows";
    throw StructuralError(os.str());
  }
  if (cols > rows) {
    std::ostringstream os;
    os << "Brownian dimension " << cols << " exceeds number of securities " << rows;
    throw StructuralError(os.str());
  }
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != rows) {
    throw StructuralError("labels must be empty or have one entry per security");
  }
  if (!std::isfinite(r) || !mu.allFinite() || !sigma.allFinite()) {
    throw StructuralError("market coefficients must be finite");
  }
  if (!column_rank(sigma).full_column_rank) {
    throw StructuralError("sigma is rank deficient: market is incomplete");
  }
}

bool operator==(const MarketSpec& a, const MarketSpec& b) {
  return a.r == b.r && a.mu.size() == b.mu.size() && a.mu == b.mu &&
         a.sigma.rows() == b.sigma.rows() && a.sigma.cols() == b.sigma.cols() &&
         a.sigma == b.sigma && a.labels == b.labels;
}

ViabilityResult check_viability(const MarketSpec& spec, double tol) {
  spec.validate();
  if (!(tol > 0.0)) throw DomainError("viability tolerance must be positive");
  const Eigen::VectorXd excess = spec.excess_return();
  const Eigen::VectorXd theta = least_squares_theta(spec, excess);
  ViabilityResult out;
  out.residual = (spec.sigma * theta - excess).norm();
  out.condition_number = column_rank(spec.sigma).condition_number;
  out.viable = out.residual <= tol * std::max(excess.norm(), 1e-12);
  return out;
}

Eigen::VectorXd solve_theta(const MarketSpec& spec, double tol) {
  const ViabilityResult v = check_viability(spec, tol);
  if (!v.viable) {
    std::ostringstream os;
    os << "market is not viable: mu - r1 is outside the column span of sigma (residual "
       << v.residual << ")";
    throw NonViableMarket(os.str(), v.residual);
  }
  return least_squares_theta(spec, spec.excess_return());
}

double RiskProfile::disc_norm() const { return std::sqrt(disc_norm_sq); }

RiskProfile risk_profile(const MarketSpec& spec, double tol) {
  RiskProfile p;
  p.theta = solve_theta(spec, tol);
  p.condition_number = column_rank(spec.sigma).condition_number;

  const Eigen::VectorXd index_vol = spec.sigma.row(0).transpose();
  const auto n = spec.num_securities();
  p.scapm_residuals.resize(n);
  bool scapm = true;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double cov = spec.sigma.row(k).dot(index_vol);
    p.scapm_residuals(k) = spec.mu(k) - spec.r - cov;
    const double scale =
        std::max({1.0, std::abs(spec.mu(k)), std::abs(spec.r), std::abs(cov)});
    if (std::abs(p.scapm_residuals(k)) > kScapmTolerance * scale) scapm = false;
  }
  // sigma has full column rank, so sigma^0 is then the unique solution.
  if (scapm) p.theta = index_vol;

  p.disc = p.theta - index_vol;
  p.disc_norm_sq = p.disc.squaredNorm();
  p.deficits.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    p.deficits(k) = 0.5 * (p.theta - spec.sigma.row(k).transpose()).squaredNorm();
  }
  p.optimal_growth_rate = spec.r + 0.5 * p.theta.squaredNorm();
  return p;
}

Eigen::VectorXd replication_weights(const MarketSpec& spec, const Eigen::VectorXd& theta) {
  if (theta.size() != spec.brownian_dim()) {
    throw StructuralError("theta length does not match the Brownian dimension");
  }
  const Eigen::MatrixXd st = spec.sigma.transpose();
  if (spec.brownian_dim() == spec.num_securities()) {
    return st.partialPivLu().solve(theta);
  }
  const Eigen::MatrixXd gram = st * spec.sigma;
  return spec.sigma * gram.llt().solve(theta);
}

Eigen::VectorXd replication_weights(const MarketSpec& spec, double tol) {
  return replication_weights(spec, risk_profile(spec, tol).theta);
}

}  // namespace scapm
