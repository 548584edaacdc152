#include "scapm/strategy.hpp"

#include "scapm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace scapm {

WealthModel::WealthModel(const Schedule& schedule, const SimulationConfig& cfg, double tol)
    : prices_(schedule, cfg) {
  const std::size_t n = cfg.n_steps;
  const auto& starts = prices_.segment_starts();
  disc_sq_cum_.assign(n + 1, 0.0);
  rate_cum_.assign(n + 1, 0.0);

  for (std::size_t s = 0; s < prices_.num_segments(); ++s) {
    const MarketSpec& m = prices_.market(s);
    RiskProfile profile = risk_profile(m, tol);
    if (profile.scapm_holds()) {
      // K is the index itself over this segment.
      drift_.push_back(prices_.log_drift(s, 0));
      const auto v = prices_.volatility(s, 0);
      vol_.emplace_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    } else {
      drift_.push_back(m.r + 0.5 * profile.theta.squaredNorm());
      vol_.push_back(profile.theta);
    }

    const double t0 = cfg.time_at(starts[s]);
    const double disc_base = disc_sq_cum_[starts[s]];
    const double rate_base = rate_cum_[starts[s]];
    for (std::size_t i = starts[s] + 1; i <= starts[s + 1]; ++i) {
      const double elapsed = cfg.time_at(i) - t0;
      disc_sq_cum_[i] = disc_base + profile.disc_norm_sq * elapsed;
      rate_cum_[i] = rate_base + m.r * elapsed;
    }
    profiles_.push_back(std::move(profile));
  }
}

WealthModel::WealthModel(const MarketSpec& spec, const SimulationConfig& cfg, double tol)
    : WealthModel(Schedule{Segment{cfg.horizon_T, spec}}, cfg, tol) {}

void WealthModel::propagate(std::span<const double> dW, std::span<double> log_K) const {
  const auto D = static_cast<std::size_t>(prices_.brownian_dim());
  const double dt = prices_.dt();
  log_K[0] = 0.0;
  for (std::size_t i = 0; i < prices_.n_steps(); ++i) {
    const std::size_t seg = prices_.segment_of_step(i);
    log_K[i + 1] = log_K[i] + log_increment(drift_[seg], vol_[seg].data(), dW.data() + i * D,
                                            prices_.brownian_dim(), dt);
  }
}

double WealthModel::integrated_disc_sq(std::size_t i) const { return disc_sq_cum_.at(i); }

double WealthModel::integrated_rate(std::size_t i) const { return rate_cum_.at(i); }

namespace {

void check_compatible(const WealthModel& model, const PathBundle& bundle) {
  const auto& p = model.prices();
  if (p.brownian_dim() != bundle.brownian_dim() ||
      p.num_securities() != bundle.num_securities() || p.n_steps() != bundle.n_steps()) {
    std::ostringstream os;
    os << "bundle shape (K+1=" << bundle.num_securities() << ", D_b=" << bundle.brownian_dim()
       << ", steps=" << bundle.n_steps() << ") does not match the market (K+1="
       << p.num_securities() << ", D_b=" << p.brownian_dim() << ", steps=" << p.n_steps()
       << ")";
    throw StructuralError(os.str());
  }
}

void require_wealth(const PathBundle& bundle) {
  if (!bundle.has_wealth()) throw StructuralError("bundle has no log wealth; call log_wealth_path");
}

Schedule as_schedule(const MarketSpec& spec, const PathBundle& bundle) {
  return Schedule{Segment{bundle.config().horizon_T, spec}};
}

}  // namespace

PathBundle log_wealth_path(const Schedule& schedule, PathBundle bundle) {
  const WealthModel model(schedule, bundle.config());
  check_compatible(model, bundle);
  parallel_chunks(bundle.n_paths(), 0, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      model.propagate(bundle.dW_data(p), bundle.log_K_data(p));
    }
  });
  bundle.set_has_wealth(true);
  return bundle;
}

PathBundle log_wealth_path(const MarketSpec& spec, PathBundle bundle) {
  // Brownian dimension is checked before the spec is used to build a schedule.
  if (spec.sigma.cols() != bundle.brownian_dim()) {
    throw StructuralError("market Brownian dimension differs from the bundle's");
  }
  auto schedule = as_schedule(spec, bundle);
  return log_wealth_path(schedule, std::move(bundle));
}

double max_identity_residual(const WealthModel& model, std::span<const double> dW,
                             std::span<const double> log_S, std::span<const double> log_K) {
  const auto& prices = model.prices();
  const auto D = static_cast<std::size_t>(prices.brownian_dim());
  const auto A = static_cast<std::size_t>(prices.num_securities());
  double noise = 0.0;
  double worst = 0.0;
  for (std::size_t i = 1; i <= prices.n_steps(); ++i) {
    const auto& disc = model.profile(prices.segment_of_step(i - 1)).disc;
    const double* dw = dW.data() + (i - 1) * D;
    for (std::size_t d = 0; d < D; ++d) noise += disc(static_cast<Eigen::Index>(d)) * dw[d];
    const double lhs = log_K[i] - log_S[i * A];
    const double rhs = 0.5 * model.integrated_disc_sq(i) + noise;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

Eigen::MatrixXd central_identity_residual(const Schedule& schedule, const PathBundle& bundle) {
  require_wealth(bundle);
  const WealthModel model(schedule, bundle.config());
  check_compatible(model, bundle);
  const auto& prices = model.prices();
  const auto D = static_cast<std::size_t>(prices.brownian_dim());
  const auto A = static_cast<std::size_t>(prices.num_securities());
  const std::size_t n = bundle.n_steps();

  Eigen::MatrixXd out(static_cast<Eigen::Index>(bundle.n_paths()), static_cast<Eigen::Index>(n + 1));
  for (std::size_t p = 0; p < bundle.n_paths(); ++p) {
    const auto dW = bundle.dW_data(p);
    const auto log_S = bundle.log_S_data(p);
    const auto log_K = bundle.log_K_data(p);
    double noise = 0.0;
    const auto row = static_cast<Eigen::Index>(p);
    out(row, 0) = log_K[0] - log_S[0];
    for (std::size_t i = 1; i <= n; ++i) {
      const auto& disc = model.profile(prices.segment_of_step(i - 1)).disc;
      const double* dw = dW.data() + (i - 1) * D;
      for (std::size_t d = 0; d < D; ++d) noise += disc(static_cast<Eigen::Index>(d)) * dw[d];
      out(row, static_cast<Eigen::Index>(i)) =
          (log_K[i] - log_S[i * A]) - (0.5 * model.integrated_disc_sq(i) + noise);
    }
  }
  return out;
}

Eigen::MatrixXd central_identity_residual(const MarketSpec& spec, const PathBundle& bundle) {
  return central_identity_residual(as_schedule(spec, bundle), bundle);
}

double replication_error(const MarketSpec& spec, const Eigen::VectorXd& pi, double dt,
                         std::span<const double> dW, std::span<const double> log_K,
                         Eigen::Index dim) {
  const double growth = spec.r + pi.dot(spec.excess_return());
  const Eigen::VectorXd exposure = spec.sigma.transpose() * pi;
  const std::size_t n = log_K.size() - 1;
  double log_V = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* dw = dW.data() + i * static_cast<std::size_t>(dim);
    double ret = growth * dt;
    for (Eigen::Index d = 0; d < dim; ++d) ret += exposure(d) * dw[d];
    if (ret <= -1.0) return -1.0;
    log_V += std::log1p(ret);
    worst = std::max(worst, std::abs(log_V - log_K[i + 1]));
  }
  return worst;
}

ReplicationResult replicate_and_compare(const MarketSpec& spec, const PathBundle& bundle) {
  require_wealth(bundle);
  if (spec.num_securities() != bundle.num_securities() ||
      spec.brownian_dim() != bundle.brownian_dim()) {
    throw StructuralError("market shape does not match the bundle");
  }
  const RiskProfile profile = risk_profile(spec);
  const Eigen::VectorXd pi = replication_weights(spec, profile.theta);
  const double dt = bundle.config().dt();

  ReplicationResult out;
  out.max_error.resize(bundle.n_paths());
  out.censored.assign(bundle.n_paths(), 0);
  parallel_chunks(bundle.n_paths(), 0, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const double e = replication_error(spec, pi, dt, bundle.dW_data(p), bundle.log_K_data(p),
                                         bundle.brownian_dim());
      out.max_error[p] = e;
      out.censored[p] = e < 0.0 ? 1 : 0;
    }
  });

  double sum = 0.0;
  for (std::size_t p = 0; p < bundle.n_paths(); ++p) {
    if (out.censored[p]) {
      ++out.censored_count;
      continue;
    }
    sum += out.max_error[p];
    out.worst_max_error = std::max(out.worst_max_error, out.max_error[p]);
  }
  const std::size_t kept = bundle.n_paths() - out.censored_count;
  out.mean_max_error = kept > 0 ? sum / static_cast<double>(kept) : NAN;
  return out;
}

double lil_normalize(double excess, double integrated_disc_sq) {
  const double v = integrated_disc_sq;
  if (!(v > std::numbers::e)) {
    std::ostringstream os;
    os << "iterated-logarithm statistic needs integrated discrepancy > e, got " << v;
    throw DomainError(os.str());
  }
  return (excess - 0.5 * v) / std::sqrt(2.0 * v * std::log(std::log(v)));
}

Eigen::VectorXd lil_statistic(const Schedule& schedule, const PathBundle& bundle, double t) {
  require_wealth(bundle);
  const WealthModel model(schedule, bundle.config());
  check_compatible(model, bundle);
  const std::size_t i = grid_index(bundle.config(), t);
  const double v = model.integrated_disc_sq(i);
  const auto A = static_cast<std::size_t>(bundle.num_securities());
  Eigen::VectorXd out(static_cast<Eigen::Index>(bundle.n_paths()));
  for (std::size_t p = 0; p < bundle.n_paths(); ++p) {
    const double excess = bundle.log_K_data(p)[i] - bundle.log_S_data(p)[i * A];
    out(static_cast<Eigen::Index>(p)) = lil_normalize(excess, v);
  }
  return out;
}

Eigen::VectorXd lil_statistic(const MarketSpec& spec, const PathBundle& bundle, double t) {
  return lil_statistic(as_schedule(spec, bundle), bundle, t);
}

void simulate_with_wealth(const WealthModel& model, const SimulationConfig& cfg,
                          unsigned threads, const WealthVisitor& visit) {
  const auto& prices = model.prices();
  if (prices.n_steps() != cfg.n_steps) throw StructuralError("model grid differs from config");
  const auto D = static_cast<std::size_t>(prices.brownian_dim());
  const auto A = static_cast<std::size_t>(prices.num_securities());
  parallel_chunks(cfg.n_paths, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> dW(cfg.n_steps * D);
    std::vector<double> log_S((cfg.n_steps + 1) * A);
    std::vector<double> log_K(cfg.n_steps + 1);
    for (std::size_t p = begin; p < end; ++p) {
      fill_increments(cfg, p, prices.brownian_dim(), dW);
      prices.propagate(dW, log_S);
      model.propagate(dW, log_K);
      visit(p, dW, log_S, log_K);
    }
  });
}

}  // namespace scapm
