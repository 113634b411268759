#pragma once

#include <cstdint>

namespace mapuq {

//! \brief Counter-based 64-bit generator.
//!
//! Output i of stream (seed, stream) is `mix64(key + (i + 1) * 0x9E3779B97F4A7C15)`
//! where `key = mix64(seed ^ mix64(stream + 0xD1B54A32D192ED03))` and `mix64` is the
//! SplitMix64 finaliser (shift/multiply constants 30/0xBF58476D1CE4E5B9,
//! 27/0x94D049BB133111EB, 31). This is exactly the SplitMix64 sequence started at
//! `key`, so any implementation can reproduce masks and noise from the seed alone.
//!
//! Uniform doubles use the top 53 bits. Normals use Box-Muller on two consecutive
//! uniforms, cosine branch first, sine branch cached for the next call.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static std::uint64_t mix64(std::uint64_t z);

  std::uint64_t next_u64();
  //! Uniform on [0, 1).
  double uniform();
  //! Uniform integer on [0, n) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n);
  //! Standard normal.
  double normal();

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_cached_ = false;
  double cached_ = 0;
};

} // namespace mapuq
