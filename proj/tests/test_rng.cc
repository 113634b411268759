#include <doctest.h>

#include <cmath>
#include <set>

#include "mapuq/rng.h"

using mapuq::CounterRng;

namespace {

// Plain SplitMix64, written out independently of the library.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

} // namespace

TEST_CASE("mix64 matches the published SplitMix64 first output") {
  CHECK(CounterRng::mix64(0x9E3779B97F4A7C15ULL) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("stream output is the SplitMix64 sequence started at the derived key") {
  std::uint64_t const seed = 42, stream = 3;
  std::uint64_t const key = CounterRng::mix64(seed ^ CounterRng::mix64(stream + 0xD1B54A32D192ED03ULL));
  SplitMix64 reference{key};
  CounterRng rng(seed, stream);
  for(int i = 0; i < 1000; ++i)
    REQUIRE(rng.next_u64() == reference.next());
  CHECK(rng.counter() == 1000);
}

TEST_CASE("uniform draws use the top 53 bits") {
  CounterRng a(7), b(7);
  for(int i = 0; i < 100; ++i) {
    double const u = a.uniform();
    CHECK(u == static_cast<double>(b.next_u64() >> 11) * 0x1.0p-53);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("streams and seeds give distinct sequences; equal inputs repeat") {
  CounterRng a(1, 0), b(1, 1), c(2, 0), d(1, 0);
  std::set<std::uint64_t> firsts{a.next_u64(), b.next_u64(), c.next_u64()};
  CHECK(firsts.size() == 3);
  CounterRng a2(1, 0);
  for(int i = 0; i < 10; ++i)
    CHECK(a2.next_u64() == d.next_u64());
}

TEST_CASE("below stays in range and covers every value") {
  CounterRng rng(3);
  std::set<std::uint64_t> seen;
  for(int i = 0; i < 2000; ++i) {
    auto const v = rng.below(7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("normal draws have unit moments") {
  CounterRng rng(11);
  int const n = 200000;
  double sum = 0, sum_sq = 0, sum_4 = 0;
  for(int i = 0; i < n; ++i) {
    double const z = rng.normal();
    sum += z;
    sum_sq += z * z;
    sum_4 += z * z * z * z;
  }
  double const mean = sum / n, var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 4 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(sum_4 / n - 3) < 4 * std::sqrt(96.0 / n));
}
