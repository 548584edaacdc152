#pragma once

#include <cstdint>

namespace scapm {

/// Stateless keyed generator: every draw is a pure function of
/// (seed, stream, counter), so the order in which paths are generated
/// cannot change any value. Mixing follows SplitMix64.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t bits(std::uint64_t counter) const;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform(std::uint64_t counter) const;

  /// Standard normal via inverse CDF of uniform(counter).
  double normal(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace scapm
