#pragma once

#include <cstdint>
#include <vector>

#include "ssqa/model.hpp"

namespace ssqa {

// Exhaustive search is capped here; 2^24 states keeps the oracle usable
// inside test suites.
inline constexpr int kOracleMaxVars = 24;
inline constexpr size_t kOracleStateCap = 1024;

struct OracleReport {
  double min_energy = 0.0;
  std::vector<BitVector> ground_states;  // listing capped, see truncated
  uint64_t state_count_checked = 0;
  bool truncated = false;
  uint64_t minimizer_count = 0;  // true count, even when listing is capped
};

OracleReport brute_force_min(const IsingModel& m);
OracleReport brute_force_min(const QuboModel& q);

}  // namespace ssqa
