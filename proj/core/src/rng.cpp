#include "scapm/rng.hpp"

#include "scapm/normal.hpp"

namespace scapm {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ (stream * 0xd1b54a32d192ed03ULL + kGolden))) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  // Two rounds so that neighbouring (key, counter) pairs decorrelate.
  return mix64(mix64(key_ + (counter + 1) * kGolden) ^ key_);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const {
  return inverse_normal_cdf(uniform(counter));
}

}  // namespace scapm
