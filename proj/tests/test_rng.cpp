#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "glspec/rng.hpp"

using namespace glspec;

TEST_CASE("splitmix64 counter stream matches the reference sequence") {
  // First outputs of SplitMix64 seeded with 0, from the published reference
  // implementation.
  CounterRng rng(0);
  CHECK(rng.next_u64() == 0xe220a8397b1dcdafull);
  CHECK(rng.next_u64() == 0x6e789e6aa1b965f4ull);
  CHECK(rng.next_u64() == 0x06c45d188009454full);
}

TEST_CASE("counter stream is a pure function of the key") {
  CounterRng a(42);
  CHECK(a.next_u64() == 0xbdd732262feb6e95ull);
  CHECK(a.next_u64() == 0x28efe333b266f103ull);

  CounterRng b(42);
  CHECK(b.next_u64() == 0xbdd732262feb6e95ull);
}

TEST_CASE("derive_stream known answers and sensitivity") {
  CHECK(derive_stream(0, 0) == 0x0397ab29740681d9ull);
  CHECK(derive_stream(123, 7) == 0x5080c11889f907f2ull);
  CHECK(derive_stream(0, 1) != derive_stream(0, 0));
  CHECK(derive_stream(1, 0) != derive_stream(0, 0));
  CHECK(derive_stream(0, 1) != derive_stream(1, 0));
}

TEST_CASE("next_double lands in [0,1) and matches the bit construction") {
  CounterRng rng(42);
  CHECK(rng.next_double() == doctest::Approx(0.7415648787718233).epsilon(1e-15));
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("next_double is roughly uniform") {
  CounterRng rng(7);
  const int n = 200000;
  std::vector<int> histogram(10, 0);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    sum += u;
    ++histogram[static_cast<std::size_t>(u * 10.0)];
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  for (const int c : histogram) {
    // 10 bins, expectation n/10; allow 5 sigma of binomial noise.
    CHECK(std::abs(c - n / 10) < 5.0 * std::sqrt(n * 0.1 * 0.9));
  }
}

TEST_CASE("next_index stays in range and covers small bounds") {
  CounterRng rng(9001);
  std::vector<int> seen(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = rng.next_index(5);
    REQUIRE(v < 5);
    ++seen[v];
  }
  for (const int c : seen) CHECK(c > 0);
}
