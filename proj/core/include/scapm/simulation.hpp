#pragma once

#include "scapm/market_model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace scapm {

struct SimulationConfig {
  double horizon_T = 1.0;
  std::size_t n_steps = 1;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;

  double dt() const { return horizon_T / static_cast<double>(n_steps); }
  /// Grid time of step boundary i, computed as T * i / n.
  double time_at(std::size_t i) const;
  /// Throws ConfigError unless T > 0, n_steps >= 1, n_paths >= 1.
  void validate() const;
};

/// One piece of a deterministic piecewise-constant coefficient schedule.
struct Segment {
  double duration = 0.0;
  MarketSpec market;
};

using Schedule = std::vector<Segment>;

/// Index of the grid step nearest to time t; throws ConfigError if t is not
/// a grid point (relative tolerance 1e-9).
std::size_t grid_index(const SimulationConfig& cfg, double t);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;

/// i.i.d. Normal(0, dt) increments for one path, n_steps x d. A pure
/// function of (cfg.seed, path_index); entry (i, j) uses counter i*d + j.
Eigen::MatrixXd generate_increments(const SimulationConfig& cfg, std::size_t path_index,
                                    Eigen::Index d);

/// Allocation-free variant writing n_steps*d row-major values into `out`.
void fill_increments(const SimulationConfig& cfg, std::size_t path_index, Eigen::Index d,
                     std::span<double> out);

/// Schedule compiled against a grid: per-step segment lookup plus the
/// log-drift mu^k - 0.5||sigma^k||^2 of every security in every segment.
class PriceModel {
 public:
  PriceModel(const Schedule& schedule, const SimulationConfig& cfg);

  Eigen::Index num_securities() const { return assets_; }
  Eigen::Index brownian_dim() const { return dim_; }
  std::size_t n_steps() const { return n_steps_; }
  double dt() const { return dt_; }
  std::size_t num_segments() const { return segments_.size(); }

  /// Segment index active over step i (from t_i to t_{i+1}).
  std::size_t segment_of_step(std::size_t i) const { return step_segment_[i]; }
  /// First step of each segment, plus n_steps as a sentinel.
  const std::vector<std::size_t>& segment_starts() const { return starts_; }
  const MarketSpec& market(std::size_t seg) const { return segments_[seg].market; }
  const Schedule& schedule() const { return segments_; }

  /// Exact log-space recursion. dW is n_steps x D row-major, log_S is
  /// (n_steps+1) x (K+1) row-major; row 0 is set to zero.
  void propagate(std::span<const double> dW, std::span<double> log_S) const;

  /// Log drift of security k in segment seg.
  double log_drift(std::size_t seg, Eigen::Index k) const;
  /// Row k of sigma in segment seg, contiguous.
  std::span<const double> volatility(std::size_t seg, Eigen::Index k) const;

 private:
  Schedule segments_;
  Eigen::Index assets_ = 0;
  Eigen::Index dim_ = 0;
  std::size_t n_steps_ = 0;
  double dt_ = 0.0;
  std::vector<std::size_t> step_segment_;
  std::vector<std::size_t> starts_;
  std::vector<Eigen::VectorXd> log_drift_;
  std::vector<RowMatrix> sigma_;
};

/// One simulated batch with full path storage.
class PathBundle {
 public:
  PathBundle() = default;
  PathBundle(const SimulationConfig& cfg, Eigen::Index assets, Eigen::Index dim);

  const SimulationConfig& config() const { return cfg_; }
  std::size_t n_paths() const { return cfg_.n_paths; }
  std::size_t n_steps() const { return cfg_.n_steps; }
  Eigen::Index num_securities() const { return assets_; }
  Eigen::Index brownian_dim() const { return dim_; }

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& log_R() const { return log_R_; }
  std::vector<double>& log_R() { return log_R_; }

  ConstRowMap dW(std::size_t path) const;
  ConstRowMap log_S(std::size_t path) const;
  Eigen::Map<const Eigen::VectorXd> log_K(std::size_t path) const;

  std::span<double> dW_data(std::size_t path);
  std::span<double> log_S_data(std::size_t path);
  std::span<double> log_K_data(std::size_t path);
  std::span<const double> dW_data(std::size_t path) const;
  std::span<const double> log_S_data(std::size_t path) const;
  std::span<const double> log_K_data(std::size_t path) const;

  bool has_wealth() const { return has_wealth_; }
  void set_has_wealth(bool v) { has_wealth_ = v; }

 private:
  SimulationConfig cfg_;
  Eigen::Index assets_ = 0;
  Eigen::Index dim_ = 0;
  std::vector<double> times_;
  std::vector<double> log_R_;
  std::vector<double> dW_;
  std::vector<double> log_S_;
  std::vector<double> log_K_;
  bool has_wealth_ = false;
};

/// Exact simulation of a constant-coefficient market.
PathBundle simulate_prices(const MarketSpec& spec, const SimulationConfig& cfg,
                           unsigned threads = 0);

/// Exact per-segment simulation. Durations must sum to cfg.horizon_T and
/// every boundary must fall on the grid.
PathBundle schedule_simulate(const Schedule& schedule, const SimulationConfig& cfg,
                             unsigned threads = 0);

/// Streams paths without storing them. `visit(path, dW, log_S)` is called
/// once per path, possibly concurrently from several worker threads, with
/// row-major buffers that are reused after it returns.
using PathVisitor =
    std::function<void(std::size_t, std::span<const double>, std::span<const double>)>;
void simulate_streaming(const PriceModel& model, const SimulationConfig& cfg, unsigned threads,
                        const PathVisitor& visit);

/// Splits [0, n) into contiguous chunks and runs body(begin, end) on up to
/// `threads` workers (0 = hardware concurrency). Exceptions are rethrown.
void parallel_chunks(std::size_t n, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& body);

unsigned resolve_threads(unsigned threads);

/// drift*dt + vol . dw, summed left to right; every log-price and
/// log-wealth increment goes through here.
inline double log_increment(double drift, const double* vol, const double* dw, Eigen::Index dim,
                            double dt) {
  double acc = drift * dt;
  for (Eigen::Index d = 0; d < dim; ++d) acc += vol[d] * dw[d];
  return acc;
}

}  // namespace scapm
