#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "ssqa/rng.hpp"

using namespace ssqa;

namespace {

// Reference splitmix64 spelled out independently of the header under test.
struct SplitMix {
  uint64_t state;
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

}  // namespace

TEST_CASE("mix64 matches the splitmix64 output stream") {
  // Walking the reference generator from state s yields mix64(s), mix64(s+g),
  // mix64(s+2g), ... for the golden-ratio increment g.
  for (uint64_t s0 : {uint64_t(0), uint64_t(1), uint64_t(0xdeadbeef),
                      uint64_t(0x123456789abcdefull)}) {
    SplitMix ref{s0};
    uint64_t x = s0;
    for (int i = 0; i < 16; ++i) {
      CHECK(mix64(x) == ref.next());
      x += 0x9e3779b97f4a7c15ull;
    }
  }
  CHECK(mix64(0) == 0xe220a8397b1dcdafull);
  CHECK(mix64(1) == 0x910a2dec89025cc1ull);
}

TEST_CASE("counter rng reproduces frozen draws") {
  CounterRng r(42, kStreamSweepNoise);
  CHECK(r.key() == 0x0eaba014b9afe772ull);
  CHECK(r.raw(0) == 0x6d3ffc4694a32db4ull);
  CHECK(r.raw(1) == 0x7db981c830543b70ull);
  CHECK(r.raw(1ull << 32) == 0x246d125b3b72f451ull);
  CHECK(r.uniform01(7) == doctest::Approx(0.54184610102375963).epsilon(1e-15));
  CHECK(r.pm1(5) == -1.0);
  CHECK(r.pm1(6) == 1.0);
  CHECK(r.below(9, 10) == 5);
  CounterRng other(42, kStreamSaPick);
  CHECK(other.raw(0) == 0x0a3b34d3e50885fbull);
}

TEST_CASE("draws are pure functions of seed, stream, counter") {
  CounterRng a(7, kStreamSpinInit);
  CounterRng b(7, kStreamSpinInit);
  CounterRng c(8, kStreamSpinInit);
  CounterRng d(7, kStreamSweepNoise);
  for (uint64_t k = 0; k < 64; ++k) {
    CHECK(a.raw(k) == b.raw(k));
    CHECK(a.raw(k) != c.raw(k));
    CHECK(a.raw(k) != d.raw(k));
  }
}

TEST_CASE("raw is the mixed affine counter walk") {
  CounterRng r(1234, kStreamGiEdges);
  for (uint64_t k : {uint64_t(0), uint64_t(3), uint64_t(1) << 40}) {
    CHECK(r.raw(k) == mix64(r.key() + k * 0x9e3779b97f4a7c15ull));
  }
}

TEST_CASE("uniform01 stays in [0,1) and is roughly balanced") {
  CounterRng r(99, kStreamSweepNoise);
  double sum = 0.0;
  int low = 0;
  const int kDraws = 100000;
  for (int k = 0; k < kDraws; ++k) {
    double u = r.uniform01(uint64_t(k));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    low += u < 0.5;
  }
  CHECK(std::abs(sum / kDraws - 0.5) < 0.01);
  CHECK(std::abs(double(low) / kDraws - 0.5) < 0.01);
}

TEST_CASE("pm1 is a fair sign draw") {
  CounterRng r(5, kStreamSweepNoise);
  int plus = 0;
  const int kDraws = 100000;
  for (int k = 0; k < kDraws; ++k) {
    double v = r.pm1(uint64_t(k));
    CHECK((v == 1.0 || v == -1.0));
    plus += v > 0.0;
  }
  CHECK(std::abs(double(plus) / kDraws - 0.5) < 0.01);
}

TEST_CASE("below covers [0, bound) evenly") {
  CounterRng r(11, kStreamSaPick);
  const uint64_t bound = 7;
  std::vector<int> hits(bound, 0);
  const int kDraws = 70000;
  for (int k = 0; k < kDraws; ++k) {
    uint64_t v = r.below(uint64_t(k), bound);
    REQUIRE(v < bound);
    ++hits[v];
  }
  for (uint64_t v = 0; v < bound; ++v) {
    CHECK(std::abs(hits[v] - kDraws / double(bound)) < 0.05 * kDraws / bound);
  }
  CHECK(r.below(123, 1) == 0);
}

TEST_CASE("spin counters pack cycle, replica, spin without collision") {
  CHECK(spin_counter(1, 2, 3) == 0x100200003ull);
  CHECK(spin_counter(0, 0, 0) == 0);
  std::set<uint64_t> seen;
  for (uint64_t cycle = 0; cycle < 3; ++cycle) {
    for (int k = 0; k < 5; ++k) {
      for (int i = 0; i < 7; ++i) {
        CHECK(seen.insert(spin_counter(cycle, k, i)).second);
      }
    }
  }
  // Extremes of the packed ranges stay disjoint.
  CHECK(spin_counter(0, 0, (1 << 20) - 1) < spin_counter(0, 1, 0));
  CHECK(spin_counter(0, (1 << 12) - 1, (1 << 20) - 1) < spin_counter(1, 0, 0));
}
