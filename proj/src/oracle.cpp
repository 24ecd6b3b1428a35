#include "ssqa/oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace ssqa {

namespace {

// Gray-code walk over all 2^n states with O(n) deltas per step.  The running
// sum is resynced periodically and candidates re-evaluated in full, so the
// reported minimum and its minimizers are exact, not drift-accumulated.
template <class State, class EnergyFn, class DeltaFn, class FlipFn>
OracleReport gray_walk(int n, State state, EnergyFn energy, DeltaFn delta,
                       FlipFn flip) {
  if (n > kOracleMaxVars) {
    throw std::invalid_argument("exhaustive search capped at n=" +
                                std::to_string(kOracleMaxVars));
  }
  OracleReport report;
  const uint64_t total = 1ull << n;
  constexpr uint64_t kResync = 1ull << 16;
  const double guard = 1e-6;

  double e_inc = energy(state);
  double min_exact = e_inc;
  report.ground_states.push_back(BitVector(state.begin(), state.end()));
  report.minimizer_count = 1;

  for (uint64_t k = 1; k < total; ++k) {
    int b = std::countr_zero(k);
    e_inc += delta(state, b);
    flip(state, b);
    if (k % kResync == 0) e_inc = energy(state);
    if (e_inc <= min_exact + guard) {
      double e_full = energy(state);
      if (e_full < min_exact) {
        min_exact = e_full;
        report.ground_states.clear();
        report.ground_states.push_back(BitVector(state.begin(), state.end()));
        report.minimizer_count = 1;
        report.truncated = false;
      } else if (e_full == min_exact) {
        ++report.minimizer_count;
        if (report.ground_states.size() < kOracleStateCap) {
          report.ground_states.push_back(BitVector(state.begin(), state.end()));
        } else {
          report.truncated = true;
        }
      }
    }
  }
  report.min_energy = min_exact;
  report.state_count_checked = total;
  return report;
}

}  // namespace

OracleReport brute_force_min(const IsingModel& m) {
  const int n = m.n();
  SpinVector s(n, -1);
  auto energy = [&](const SpinVector& v) { return ising_energy(m, v); };
  auto delta = [&](const SpinVector& v, int b) { return ising_flip_delta(m, v, b); };
  auto flip = [](SpinVector& v, int b) { v[b] = -v[b]; };

  // Walk in spin space, report states as bits (1 means spin +1).
  OracleReport r = gray_walk(n, s, energy, delta, flip);
  for (auto& state : r.ground_states) {
    for (auto& bit : state) bit = (int8_t(bit) == 1) ? 1 : 0;
  }
  return r;
}

OracleReport brute_force_min(const QuboModel& q) {
  const int n = q.n();
  BitVector x(n, 0);
  auto energy = [&](const BitVector& v) { return qubo_energy(q, v); };
  auto delta = [&](const BitVector& v, int b) {
    double field = q.coeff(b, b);
    for (int j = 0; j < n; ++j) {
      if (j != b && v[j]) field += q.coeff(b, j);
    }
    return v[b] ? -field : field;
  };
  auto flip = [](BitVector& v, int b) { v[b] ^= 1; };
  return gray_walk(n, x, energy, delta, flip);
}

}  // namespace ssqa
