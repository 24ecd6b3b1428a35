#pragma once

#include <cstdint>

namespace ssqa {

// Counter-based generator: every value is a pure function of (key, counter),
// so draws can be made from any thread or loop order and still reproduce the
// sequence a serial run would see.  The mixer is the splitmix64 finalizer.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent draw streams.  Annealer streams are shared between engines on
// purpose: a replica-coupled run degenerates to the single-network engine
// exactly when both consume identical draws.
enum Stream : uint32_t {
  kStreamSpinInit = 1,
  kStreamSweepNoise = 2,
  kStreamSaPick = 3,
  kStreamSaAccept = 4,
  kStreamGiEdges = 5,
  kStreamGiPerm = 6,
  kStreamTrialInstance = 7,
};

class CounterRng {
 public:
  CounterRng() : key_(0) {}
  CounterRng(uint64_t seed, uint32_t stream)
      : key_(mix64(mix64(seed) ^ (0x100000000ull + stream))) {}

  uint64_t raw(uint64_t counter) const {
    return mix64(key_ + counter * 0x9e3779b97f4a7c15ull);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01(uint64_t counter) const {
    return double(raw(counter) >> 11) * 0x1.0p-53;
  }

  // Fair draw from {-1.0, +1.0}.
  double pm1(uint64_t counter) const {
    return (raw(counter) >> 63) ? 1.0 : -1.0;
  }

  // Uniform integer in [0, bound) via 128-bit fixed-point scaling.  The
  // bias is bound/2^64, far below anything observable here.
  uint64_t below(uint64_t counter, uint64_t bound) const {
    return uint64_t((static_cast<unsigned __int128>(raw(counter)) * bound) >> 64);
  }

  uint64_t key() const { return key_; }

 private:
  uint64_t key_;
};

// Counter layout shared by all per-spin draws: one unique counter per
// (cycle, replica, spin).  Bounds are enforced by the annealer parameter
// checks (n < 2^20, replicas < 2^12, cycles < 2^32).
inline uint64_t spin_counter(uint64_t cycle, int replica, int spin) {
  return (cycle << 32) | (uint64_t(replica) << 20) | uint64_t(spin);
}

}  // namespace ssqa
