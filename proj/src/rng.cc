#include "mapuq/rng.h"

#include <cmath>
#include <numbers>

namespace mapuq {

namespace {
constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream + 0xD1B54A32D192ED03ULL))) {}

std::uint64_t CounterRng::mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * golden_gamma);
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::below(std::uint64_t n) {
  // largest multiple of n representable, reject above it
  std::uint64_t const limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n + 1) % n;
  for(;;) {
    auto const v = next_u64();
    if(v <= limit)
      return v % n;
  }
}

double CounterRng::normal() {
  if(has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double const u1 = 1.0 - uniform(); // (0, 1]
  double const u2 = uniform();
  double const radius = std::sqrt(-2.0 * std::log(u1));
  double const angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

} // namespace mapuq
