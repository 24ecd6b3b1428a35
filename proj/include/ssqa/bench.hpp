#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssqa/annealer.hpp"
#include "ssqa/model.hpp"

#include "json.hpp"

namespace ssqa {

enum class Engine { kSsqa, kSsa, kSa };

std::string engine_name(Engine e);
Engine engine_from_name(const std::string& name);

// Where trial problems come from: either the GI generator or a model file.
struct ProblemSpec {
  // GI generator (active when n_nodes > 0).
  int n_nodes = 0;
  double edge_prob = 0.5;
  bool permute = false;
  double c1 = 0.75;
  double c2 = 0.75;
  bool fresh_instance = true;   // new instance per trial
  uint64_t gi_seed = 0;         // instance seed when fresh_instance is false

  // Model file (active when path nonempty).
  std::string model_file;
  std::optional<double> target_energy;  // required above oracle size

  void validate() const;
};

struct BenchConfig {
  Engine engine = Engine::kSsqa;
  SsqaParams ssqa;
  SsaParams ssa;
  SaParams sa;
  ProblemSpec problem;
  int trials = 100;
  long ec = 0;          // total spin-update budget; sc = ec / r for the replica engine
  double p_target = 0.99;
  uint64_t base_seed = 0;
  int workers = 1;

  void validate() const;
  nlohmann::json to_json() const;
  static BenchConfig from_json(const nlohmann::json& j);
};

long compute_ec(int r, long sc);

struct TtsValue {
  enum class Kind { kFinite, kSaturatedZero, kUndefined };
  Kind kind = Kind::kUndefined;
  double seconds = 0.0;

  bool defined() const { return kind != Kind::kUndefined; }
  bool saturated() const { return kind == Kind::kSaturatedZero; }
  // Numeric value with saturation reported as 0; undefined compares as +inf.
  double value_or_inf() const;
  std::string csv_field() const;  // "-" when undefined, numeric otherwise
  nlohmann::json to_json() const;
  static TtsValue from_json(const nlohmann::json& j);
};

// t * ln(1 - p_target) / ln(1 - p_s); saturates to zero at p_s == 1 and is
// undefined at p_s == 0.
TtsValue compute_tts(double p_s, double t_seconds, double p_target);

struct TrialOutcome {
  uint64_t seed = 0;
  bool reached_target = false;
  long first_hit_cycle = -1;
  double best_energy = 0.0;
  double wall_seconds = 0.0;
};

struct BenchRecord {
  std::string label;  // nonempty for case-suite rows
  Engine engine = Engine::kSsqa;
  int n = 0;
  int r = 1;
  long ec = 0;
  int tau = 0;
  int trials = 0;
  double p_s = 0.0;
  double t_mean_s = 0.0;
  TtsValue tts;
  uint64_t base_seed = 0;
  std::vector<TrialOutcome> per_trial;

  nlohmann::json to_json() const;
  static BenchRecord from_json(const nlohmann::json& j);
};

// Runs cfg.trials independent runs with seeds base_seed + trial index over a
// worker pool; each trial gets a fresh generated instance unless pinned.
BenchRecord run_trials(const BenchConfig& cfg);

// run_trials once per replica count with sc = ec / r and the budget fixed.
std::vector<BenchRecord> replica_sweep(const BenchConfig& cfg,
                                       const std::vector<int>& r_values);

struct CaseSpec {
  std::string label;
  long ec = 0;
  int tau = 0;
  long iterations = 0;
};

// The five fixed budget/schedule combinations used by the case benchmark.
std::vector<CaseSpec> case_suite();

std::vector<BenchRecord> run_cases(const BenchConfig& cfg);

void write_results_csv(const std::vector<BenchRecord>& records,
                       const std::string& path);
// Plot-style tables: success probability, mean time, and time-to-solution
// against the swept quantity.
void write_sweep_csv(const std::vector<BenchRecord>& records,
                     const std::string& path);
void write_cases_csv(const std::vector<BenchRecord>& records,
                     const std::string& path);

// Everything needed to reproduce a batch bit-for-bit, plus its outcomes.
nlohmann::json make_manifest(const std::string& kind, const BenchConfig& cfg,
                             const std::vector<int>& r_values,
                             const std::vector<BenchRecord>& records,
                             const std::vector<std::string>& output_paths);

struct ReplayResult {
  bool match = true;
  std::vector<BenchRecord> records;
  std::string mismatch;  // first difference, for diagnostics
};

// Re-executes a manifest's config and compares seeds, hit flags, first-hit
// cycles, and best energies bitwise against the recorded outcomes.
ReplayResult replay_manifest(const nlohmann::json& manifest,
                             std::optional<int> workers_override = {});

}  // namespace ssqa
