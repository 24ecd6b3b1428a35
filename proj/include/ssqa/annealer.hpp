#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ssqa/model.hpp"
#include "ssqa/rng.hpp"

namespace ssqa {

// Replica-coupled engine parameters.  Defaults follow the reference
// operating point; r and sc always come from the caller.
struct SsqaParams {
  int r = 0;                // replica count
  double jperp_min = 0.0;   // replica coupling at iteration start
  double jperp_max = 0.5;   // replica coupling at iteration end
  int beta = 3;             // coupling schedule steps per iteration
  int tau = 100;            // cycles per schedule step
  int delay = 1;            // coupling reads spins d cycles back
  double i0 = 2.0;          // accumulator saturation bound
  double n_rnd = 1.0;       // noise magnitude
  double alpha = 1.0;       // clamp resolution constant
  long sc = 0;              // total sweeps
  bool bidirectional = false;  // couple to k-1 as well as k+1

  long cycles_per_iteration() const { return long(tau) * (beta + 1); }
  long iterations() const { return sc / cycles_per_iteration(); }
  void validate(int n) const;  // throws std::invalid_argument
};

// Coupling staircase: starts at jperp_min, steps up every tau cycles,
// holds jperp_max for the final tau cycles, then resets each iteration.
double jperp_schedule(long cycle, const SsqaParams& p);

// Single-network engine parameters; the accumulator bound grows
// geometrically (i0 <- i0 / beta every tau cycles) and wraps to i0_min.
struct SsaParams {
  double i0_min = 1.0;
  double i0_max = 16.0;
  double beta = 0.5;   // bound multiplier, in (0,1)
  int tau = 10;        // cycles per bound step
  double n_rnd = 1.0;
  double alpha = 1.0;
  long sc = 0;

  std::vector<double> i0_levels() const;
  long cycles_per_iteration() const;
  void validate(int n) const;
};

double i0_schedule(long cycle, const SsaParams& p);

// Serial Metropolis parameters.  The temperature follows the harmonic
// schedule T(t+1) = 1/(1/T(t) + delta_it); delta_it <= 0 means "derive
// from the endpoints", i.e. (1/t_final - 1/t_init)/cycles.
struct SaParams {
  double t_init = 1000.0;
  double t_final = 0.1;
  double delta_it = 0.0;
  long cycles = 0;

  double effective_delta_it() const;
  double temperature(long cycle) const;
  void validate(int n) const;
};

struct ReplicaLattice {
  int n = 0;
  int replicas = 0;
  int delay = 0;
  long cycle = 0;                 // sweeps performed so far
  std::vector<double> sigma;      // [i*replicas + k], entries -1.0/+1.0
  std::vector<double> is_acc;     // same layout, clamped accumulators
  std::vector<std::vector<double>> history;  // delay+1 sigma snapshots

  double spin(int i, int k) const { return sigma[size_t(i) * replicas + k]; }
  double acc(int i, int k) const { return is_acc[size_t(i) * replicas + k]; }
  // Snapshot the coupling term reads this cycle, i.e. sigma(cycle - delay).
  const std::vector<double>& delayed_sigma() const;
};

// Fair +-1 spins from the seed's init stream, accumulators all zero,
// history primed with the initial snapshot.
ReplicaLattice init_lattice(int n, int replicas, int delay, uint64_t seed);

// One synchronous sweep: every (i, k) reads only pre-sweep state, the
// coupling term reads the delayed snapshot with replica r-1 wrapping to 0.
void ssqa_sweep(ReplicaLattice& lat, const IsingModel& m, double jperp,
                const SsqaParams& p, uint64_t seed, long cycle);

// Ising energy of each replica's current spin column (offset included).
std::vector<double> replica_energies(const ReplicaLattice& lat, const IsingModel& m);

struct TracePoint {
  long cycle;
  int replica;
  double energy;
  double jperp;
};

struct AnnealResult {
  double best_energy = 0.0;
  SpinVector best_state;
  int best_replica = 0;
  bool reached_target = false;
  long first_hit_cycle = -1;  // cycle at which best first reached target
  long cycles_used = 0;
  std::vector<TracePoint> trace;  // filled only when requested
  double wall_seconds = 0.0;
};

inline constexpr double kTargetTol = 1e-9;

struct RunOptions {
  bool record_trace = false;
  bool stop_at_target = true;  // benchmark mode runs the full budget instead
};

AnnealResult ssqa_run(const IsingModel& m, const SsqaParams& p, uint64_t seed,
                      std::optional<double> target_energy = {},
                      const RunOptions& opts = {});

AnnealResult ssa_run(const IsingModel& m, const SsaParams& p, uint64_t seed,
                     std::optional<double> target_energy = {},
                     const RunOptions& opts = {});

AnnealResult sa_run(const IsingModel& m, const SaParams& p, uint64_t seed,
                    std::optional<double> target_energy = {},
                    const RunOptions& opts = {});

}  // namespace ssqa
