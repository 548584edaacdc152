#include "scapm/simulation.hpp"

#include "scapm/error.hpp"
#include "scapm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace scapm {

double SimulationConfig::time_at(std::size_t i) const {
  if (i >= n_steps) return horizon_T;
  return horizon_T * static_cast<double>(i) / static_cast<double>(n_steps);
}

void SimulationConfig::validate() const {
  if (!(horizon_T > 0.0) || !std::isfinite(horizon_T)) {
    throw ConfigError("horizon_T must be positive and finite");
  }
  if (n_steps < 1) throw ConfigError("n_steps must be at least 1");
  if (n_paths < 1) throw ConfigError("n_paths must be at least 1");
}

std::size_t grid_index(const SimulationConfig& cfg, double t) {
  if (!(t >= 0.0) || t > cfg.horizon_T * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "time " << t << " lies outside [0, " << cfg.horizon_T << "]";
    throw ConfigError(os.str());
  }
  const double x = t / cfg.dt();
  const auto i = static_cast<std::size_t>(std::llround(x));
  if (std::abs(cfg.time_at(i) - t) > 1e-9 * cfg.horizon_T) {
    std::ostringstream os;
    os << "time " << t << " is not on the simulation grid (dt = " << cfg.dt() << ")";
    throw ConfigError(os.str());
  }
  return std::min(i, cfg.n_steps);
}

void fill_increments(const SimulationConfig& cfg, std::size_t path_index, Eigen::Index d,
                     std::span<double> out) {
  if (path_index >= cfg.n_paths) throw ConfigError("path_index out of range");
  const std::size_t count = cfg.n_steps * static_cast<std::size_t>(d);
  if (out.size() < count) throw StructuralError("increment buffer too small");
  const CounterRng rng(cfg.seed, path_index);
  const double scale = std::sqrt(cfg.dt());
  for (std::size_t c = 0; c < count; ++c) out[c] = scale * rng.normal(c);
}

Eigen::MatrixXd generate_increments(const SimulationConfig& cfg, std::size_t path_index,
                                    Eigen::Index d) {
  cfg.validate();
  if (d < 1) throw StructuralError("Brownian dimension must be at least 1");
  RowMatrix m(static_cast<Eigen::Index>(cfg.n_steps), d);
  fill_increments(cfg, path_index, d, std::span<double>(m.data(), m.size()));
  return m;
}

PriceModel::PriceModel(const Schedule& schedule, const SimulationConfig& cfg)
    : segments_(schedule), n_steps_(cfg.n_steps), dt_(cfg.dt()) {
  cfg.validate();
  if (segments_.empty()) throw ConfigError("schedule has no segments");
  assets_ = segments_.front().market.num_securities();
  dim_ = segments_.front().market.brownian_dim();

  double elapsed = 0.0;
  starts_.push_back(0);
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const auto& seg = segments_[s];
    seg.market.validate();
    if (seg.market.num_securities() != assets_ || seg.market.brownian_dim() != dim_) {
      throw StructuralError("all schedule segments must share the same shape");
    }
    if (!(seg.duration > 0.0) || !std::isfinite(seg.duration)) {
      throw ConfigError("segment durations must be positive and finite");
    }
    elapsed += seg.duration;
    const double steps = elapsed / dt_;
    const auto boundary = static_cast<std::size_t>(std::llround(steps));
    if (std::abs(steps - static_cast<double>(boundary)) > 1e-9 * std::max(1.0, steps)) {
      std::ostringstream os;
      os << "segment " << s << " ends at t = " << elapsed << ", which is not a grid point";
      throw ConfigError(os.str());
    }
    if (boundary <= starts_.back()) {
      throw ConfigError("segment shorter than one grid step");
    }
    starts_.push_back(boundary);

    const auto& m = seg.market;
    Eigen::VectorXd drift(assets_);
    for (Eigen::Index k = 0; k < assets_; ++k) {
      drift(k) = m.mu(k) - 0.5 * m.sigma.row(k).squaredNorm();
    }
    log_drift_.push_back(std::move(drift));
    sigma_.emplace_back(m.sigma);
  }
  if (starts_.back() != n_steps_ ||
      std::abs(elapsed - cfg.horizon_T) > 1e-9 * cfg.horizon_T) {
    std::ostringstream os;
    os << "schedule durations sum to " << elapsed << " but the horizon is " << cfg.horizon_T;
    throw ConfigError(os.str());
  }

  step_segment_.resize(n_steps_);
  for (std::size_t s = 0; s + 1 < starts_.size(); ++s) {
    std::fill(step_segment_.begin() + static_cast<std::ptrdiff_t>(starts_[s]),
              step_segment_.begin() + static_cast<std::ptrdiff_t>(starts_[s + 1]), s);
  }
}

double PriceModel::log_drift(std::size_t seg, Eigen::Index k) const {
  return log_drift_[seg](k);
}

std::span<const double> PriceModel::volatility(std::size_t seg, Eigen::Index k) const {
  return {sigma_[seg].data() + k * dim_, static_cast<std::size_t>(dim_)};
}

void PriceModel::propagate(std::span<const double> dW, std::span<double> log_S) const {
  const auto A = static_cast<std::size_t>(assets_);
  const auto D = static_cast<std::size_t>(dim_);
  std::fill_n(log_S.begin(), A, 0.0);
  for (std::size_t i = 0; i < n_steps_; ++i) {
    const std::size_t seg = step_segment_[i];
    const double* dw = dW.data() + i * D;
    const double* vol = sigma_[seg].data();
    const double* drift = log_drift_[seg].data();
    const double* prev = log_S.data() + i * A;
    double* next = log_S.data() + (i + 1) * A;
    for (std::size_t k = 0; k < A; ++k) {
      next[k] = prev[k] + log_increment(drift[k], vol + k * D, dw, dim_, dt_);
    }
  }
}

PathBundle::PathBundle(const SimulationConfig& cfg, Eigen::Index assets, Eigen::Index dim)
    : cfg_(cfg), assets_(assets), dim_(dim) {
  cfg_.validate();
  const std::size_t n = cfg_.n_steps;
  times_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) times_[i] = cfg_.time_at(i);
  log_R_.assign(n + 1, 0.0);
  dW_.assign(cfg_.n_paths * n * static_cast<std::size_t>(dim), 0.0);
  log_S_.assign(cfg_.n_paths * (n + 1) * static_cast<std::size_t>(assets), 0.0);
  log_K_.assign(cfg_.n_paths * (n + 1), 0.0);
}

ConstRowMap PathBundle::dW(std::size_t path) const {
  return {dW_data(path).data(), static_cast<Eigen::Index>(cfg_.n_steps), dim_};
}

ConstRowMap PathBundle::log_S(std::size_t path) const {
  return {log_S_data(path).data(), static_cast<Eigen::Index>(cfg_.n_steps + 1), assets_};
}

Eigen::Map<const Eigen::VectorXd> PathBundle::log_K(std::size_t path) const {
  return {log_K_data(path).data(), static_cast<Eigen::Index>(cfg_.n_steps + 1)};
}

std::span<double> PathBundle::dW_data(std::size_t path) {
  const std::size_t len = cfg_.n_steps * static_cast<std::size_t>(dim_);
  return {dW_.data() + path * len, len};
}

std::span<double> PathBundle::log_S_data(std::size_t path) {
  const std::size_t len = (cfg_.n_steps + 1) * static_cast<std::size_t>(assets_);
  return {log_S_.data() + path * len, len};
}

std::span<double> PathBundle::log_K_data(std::size_t path) {
  const std::size_t len = cfg_.n_steps + 1;
  return {log_K_.data() + path * len, len};
}

std::span<const double> PathBundle::dW_data(std::size_t path) const {
  return const_cast<PathBundle*>(this)->dW_data(path);
}

std::span<const double> PathBundle::log_S_data(std::size_t path) const {
  return const_cast<PathBundle*>(this)->log_S_data(path);
}

std::span<const double> PathBundle::log_K_data(std::size_t path) const {
  return const_cast<PathBundle*>(this)->log_K_data(path);
}

unsigned resolve_threads(unsigned threads) {
  if (threads != 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_chunks(std::size_t n, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), n);
  if (workers <= 1) {
    if (n > 0) body(0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

void fill_log_R(const PriceModel& model, const SimulationConfig& cfg, std::vector<double>& log_R) {
  const auto& starts = model.segment_starts();
  log_R[0] = 0.0;
  for (std::size_t s = 0; s < model.num_segments(); ++s) {
    const double r = model.market(s).r;
    const double t0 = cfg.time_at(starts[s]);
    const double base = log_R[starts[s]];
    for (std::size_t i = starts[s] + 1; i <= starts[s + 1]; ++i) {
      log_R[i] = base + r * (cfg.time_at(i) - t0);
    }
  }
}

}  // namespace

PathBundle schedule_simulate(const Schedule& schedule, const SimulationConfig& cfg,
                             unsigned threads) {
  const PriceModel model(schedule, cfg);
  PathBundle bundle(cfg, model.num_securities(), model.brownian_dim());
  fill_log_R(model, cfg, bundle.log_R());
  parallel_chunks(cfg.n_paths, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      auto dW = bundle.dW_data(p);
      fill_increments(cfg, p, model.brownian_dim(), dW);
      model.propagate(dW, bundle.log_S_data(p));
    }
  });
  return bundle;
}

PathBundle simulate_prices(const MarketSpec& spec, const SimulationConfig& cfg,
                           unsigned threads) {
  return schedule_simulate(Schedule{Segment{cfg.horizon_T, spec}}, cfg, threads);
}

void simulate_streaming(const PriceModel& model, const SimulationConfig& cfg, unsigned threads,
                        const PathVisitor& visit) {
  if (model.n_steps() != cfg.n_steps) throw StructuralError("model grid differs from config");
  const auto D = static_cast<std::size_t>(model.brownian_dim());
  const auto A = static_cast<std::size_t>(model.num_securities());
  parallel_chunks(cfg.n_paths, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> dW(cfg.n_steps * D);
    std::vector<double> log_S((cfg.n_steps + 1) * A);
    for (std::size_t p = begin; p < end; ++p) {
      fill_increments(cfg, p, model.brownian_dim(), dW);
      model.propagate(dW, log_S);
      visit(p, dW, log_S);
    }
  });
}

}  // namespace scapm
