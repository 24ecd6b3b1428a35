#include "ssqa/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ssqa/gi.hpp"
#include "ssqa/oracle.hpp"
#include "ssqa/rng.hpp"
#include "ssqa/version.hpp"

namespace ssqa {

namespace {

std::string format_double(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> keys,
                  const char* where) {
  for (const char* k : keys) {
    if (!j.contains(k)) {
      throw std::runtime_error(std::string(where) + ": missing key '" + k + "'");
    }
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::runtime_error(std::string(where) + ": unknown key '" + it.key() + "'");
    }
  }
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::kSsqa: return "ssqa";
    case Engine::kSsa: return "ssa";
    case Engine::kSa: return "sa";
  }
  throw std::logic_error("bad engine enum");
}

Engine engine_from_name(const std::string& name) {
  if (name == "ssqa") return Engine::kSsqa;
  if (name == "ssa") return Engine::kSsa;
  if (name == "sa") return Engine::kSa;
  throw std::invalid_argument("unknown engine '" + name + "' (ssqa|ssa|sa)");
}

void ProblemSpec::validate() const {
  const bool gi = n_nodes > 0;
  const bool file = !model_file.empty();
  if (gi == file) {
    throw std::invalid_argument("problem needs exactly one of: GI node count, model file");
  }
  if (gi) {
    if (edge_prob < 0.0 || edge_prob > 1.0) {
      throw std::invalid_argument("edge_prob outside [0, 1]");
    }
    if (c1 <= 0.0 || c2 <= 0.0) throw std::invalid_argument("penalties must be positive");
  }
}

void BenchConfig::validate() const {
  problem.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (ec < 1) throw std::invalid_argument("ec must be >= 1");
  if (p_target <= 0.0 || p_target >= 1.0) {
    throw std::invalid_argument("p_target must lie in (0, 1)");
  }
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (engine == Engine::kSsqa) {
    if (ssqa.r < 1) throw std::invalid_argument("replica count required (>= 1)");
    if (ec / ssqa.r < 1) throw std::invalid_argument("ec too small for replica count");
  }
}

long compute_ec(int r, long sc) {
  if (r < 1 || sc < 1) throw std::invalid_argument("compute_ec needs r >= 1, sc >= 1");
  return long(r) * sc;
}

double TtsValue::value_or_inf() const {
  switch (kind) {
    case Kind::kFinite: return seconds;
    case Kind::kSaturatedZero: return 0.0;
    case Kind::kUndefined: return std::numeric_limits<double>::infinity();
  }
  throw std::logic_error("bad tts kind");
}

std::string TtsValue::csv_field() const {
  switch (kind) {
    case Kind::kFinite: return format_double(seconds);
    case Kind::kSaturatedZero: return "0";
    case Kind::kUndefined: return "-";
  }
  throw std::logic_error("bad tts kind");
}

nlohmann::json TtsValue::to_json() const {
  return {{"defined", kind != Kind::kUndefined},
          {"saturated", kind == Kind::kSaturatedZero},
          {"seconds", kind == Kind::kFinite ? nlohmann::json(seconds) : nlohmann::json()}};
}

TtsValue TtsValue::from_json(const nlohmann::json& j) {
  require_keys(j, {"defined", "saturated", "seconds"}, "tts");
  TtsValue v;
  if (!j["defined"].get<bool>()) {
    v.kind = Kind::kUndefined;
  } else if (j["saturated"].get<bool>()) {
    v.kind = Kind::kSaturatedZero;
  } else {
    v.kind = Kind::kFinite;
    v.seconds = j["seconds"].get<double>();
  }
  return v;
}

TtsValue compute_tts(double p_s, double t_seconds, double p_target) {
  if (p_target <= 0.0 || p_target >= 1.0) {
    throw std::invalid_argument("p_target must lie in (0, 1)");
  }
  if (p_s < 0.0 || p_s > 1.0) throw std::invalid_argument("p_s outside [0, 1]");
  if (t_seconds <= 0.0) throw std::invalid_argument("t must be > 0");
  TtsValue v;
  if (p_s == 0.0) {
    v.kind = TtsValue::Kind::kUndefined;
  } else if (p_s == 1.0) {
    v.kind = TtsValue::Kind::kSaturatedZero;
  } else {
    v.kind = TtsValue::Kind::kFinite;
    v.seconds = t_seconds * std::log(1.0 - p_target) / std::log(1.0 - p_s);
  }
  return v;
}

nlohmann::json BenchConfig::to_json() const {
  nlohmann::json j;
  j["engine"] = engine_name(engine);
  j["ssqa"] = {{"r", ssqa.r},         {"jperp_min", ssqa.jperp_min},
               {"jperp_max", ssqa.jperp_max}, {"beta", ssqa.beta},
               {"tau", ssqa.tau},     {"delay", ssqa.delay},
               {"i0", ssqa.i0},       {"n_rnd", ssqa.n_rnd},
               {"alpha", ssqa.alpha}, {"bidirectional", ssqa.bidirectional}};
  j["ssa"] = {{"i0_min", ssa.i0_min}, {"i0_max", ssa.i0_max}, {"beta", ssa.beta},
              {"tau", ssa.tau},       {"n_rnd", ssa.n_rnd},   {"alpha", ssa.alpha}};
  j["sa"] = {{"t_init", sa.t_init}, {"t_final", sa.t_final}, {"delta_it", sa.delta_it}};
  j["problem"] = {{"n_nodes", problem.n_nodes},
                  {"edge_prob", problem.edge_prob},
                  {"permute", problem.permute},
                  {"c1", problem.c1},
                  {"c2", problem.c2},
                  {"fresh_instance", problem.fresh_instance},
                  {"gi_seed", problem.gi_seed},
                  {"model_file", problem.model_file},
                  {"target_energy", problem.target_energy
                                        ? nlohmann::json(*problem.target_energy)
                                        : nlohmann::json()}};
  j["trials"] = trials;
  j["ec"] = ec;
  j["p_target"] = p_target;
  j["base_seed"] = base_seed;
  j["workers"] = workers;
  return j;
}

BenchConfig BenchConfig::from_json(const nlohmann::json& j) {
  require_keys(j, {"engine", "ssqa", "ssa", "sa", "problem", "trials", "ec",
                   "p_target", "base_seed", "workers"},
               "config");
  BenchConfig c;
  c.engine = engine_from_name(j["engine"].get<std::string>());

  const auto& q = j["ssqa"];
  require_keys(q, {"r", "jperp_min", "jperp_max", "beta", "tau", "delay", "i0",
                   "n_rnd", "alpha", "bidirectional"},
               "config.ssqa");
  c.ssqa.r = q["r"].get<int>();
  c.ssqa.jperp_min = q["jperp_min"].get<double>();
  c.ssqa.jperp_max = q["jperp_max"].get<double>();
  c.ssqa.beta = q["beta"].get<int>();
  c.ssqa.tau = q["tau"].get<int>();
  c.ssqa.delay = q["delay"].get<int>();
  c.ssqa.i0 = q["i0"].get<double>();
  c.ssqa.n_rnd = q["n_rnd"].get<double>();
  c.ssqa.alpha = q["alpha"].get<double>();
  c.ssqa.bidirectional = q["bidirectional"].get<bool>();

  const auto& s = j["ssa"];
  require_keys(s, {"i0_min", "i0_max", "beta", "tau", "n_rnd", "alpha"}, "config.ssa");
  c.ssa.i0_min = s["i0_min"].get<double>();
  c.ssa.i0_max = s["i0_max"].get<double>();
  c.ssa.beta = s["beta"].get<double>();
  c.ssa.tau = s["tau"].get<int>();
  c.ssa.n_rnd = s["n_rnd"].get<double>();
  c.ssa.alpha = s["alpha"].get<double>();

  const auto& a = j["sa"];
  require_keys(a, {"t_init", "t_final", "delta_it"}, "config.sa");
  c.sa.t_init = a["t_init"].get<double>();
  c.sa.t_final = a["t_final"].get<double>();
  c.sa.delta_it = a["delta_it"].get<double>();

  const auto& p = j["problem"];
  require_keys(p, {"n_nodes", "edge_prob", "permute", "c1", "c2", "fresh_instance",
                   "gi_seed", "model_file", "target_energy"},
               "config.problem");
  c.problem.n_nodes = p["n_nodes"].get<int>();
  c.problem.edge_prob = p["edge_prob"].get<double>();
  c.problem.permute = p["permute"].get<bool>();
  c.problem.c1 = p["c1"].get<double>();
  c.problem.c2 = p["c2"].get<double>();
  c.problem.fresh_instance = p["fresh_instance"].get<bool>();
  c.problem.gi_seed = p["gi_seed"].get<uint64_t>();
  c.problem.model_file = p["model_file"].get<std::string>();
  if (!p["target_energy"].is_null()) {
    c.problem.target_energy = p["target_energy"].get<double>();
  }

  c.trials = j["trials"].get<int>();
  c.ec = j["ec"].get<long>();
  c.p_target = j["p_target"].get<double>();
  c.base_seed = j["base_seed"].get<uint64_t>();
  c.workers = j["workers"].get<int>();
  return c;
}

nlohmann::json BenchRecord::to_json() const {
  nlohmann::json trials_json = nlohmann::json::array();
  for (const auto& t : per_trial) {
    trials_json.push_back({{"seed", t.seed},
                           {"reached_target", t.reached_target},
                           {"first_hit_cycle", t.first_hit_cycle},
                           {"best_energy", t.best_energy},
                           {"wall_seconds", t.wall_seconds}});
  }
  return {{"label", label},   {"engine", engine_name(engine)},
          {"n", n},           {"r", r},
          {"ec", ec},         {"tau", tau},
          {"trials", trials}, {"p_s", p_s},
          {"t_mean_s", t_mean_s}, {"tts", tts.to_json()},
          {"seed", base_seed},    {"per_trial", trials_json}};
}

BenchRecord BenchRecord::from_json(const nlohmann::json& j) {
  require_keys(j, {"label", "engine", "n", "r", "ec", "tau", "trials", "p_s",
                   "t_mean_s", "tts", "seed", "per_trial"},
               "record");
  BenchRecord rec;
  rec.label = j["label"].get<std::string>();
  rec.engine = engine_from_name(j["engine"].get<std::string>());
  rec.n = j["n"].get<int>();
  rec.r = j["r"].get<int>();
  rec.ec = j["ec"].get<long>();
  rec.tau = j["tau"].get<int>();
  rec.trials = j["trials"].get<int>();
  rec.p_s = j["p_s"].get<double>();
  rec.t_mean_s = j["t_mean_s"].get<double>();
  rec.tts = TtsValue::from_json(j["tts"]);
  rec.base_seed = j["seed"].get<uint64_t>();
  for (const auto& t : j["per_trial"]) {
    require_keys(t, {"seed", "reached_target", "first_hit_cycle", "best_energy",
                     "wall_seconds"},
                 "per_trial");
    rec.per_trial.push_back({t["seed"].get<uint64_t>(),
                             t["reached_target"].get<bool>(),
                             t["first_hit_cycle"].get<long>(),
                             t["best_energy"].get<double>(),
                             t["wall_seconds"].get<double>()});
  }
  return rec;
}

namespace {

struct ResolvedProblem {
  IsingModel model;
  double target;
};

// Builds the trial's problem.  GI instances convert with target 0 (the
// expansion constant makes a perfect mapping sit exactly there); file models
// take the user target or fall back to the oracle when small enough.
ResolvedProblem resolve_gi(const ProblemSpec& p, uint64_t instance_seed) {
  GiInstance inst = generate_gi(p.n_nodes, p.edge_prob, instance_seed, p.permute,
                                p.c1, p.c2);
  return {qubo_to_ising(build_gi_qubo(inst)), 0.0};
}

ResolvedProblem resolve_file(const ProblemSpec& p) {
  AnyModel any = load_model(p.model_file);
  IsingModel m = std::holds_alternative<QuboModel>(any)
                     ? qubo_to_ising(std::get<QuboModel>(any))
                     : std::get<IsingModel>(any);
  double target;
  if (p.target_energy) {
    target = *p.target_energy;
  } else if (m.n() <= kOracleMaxVars) {
    target = brute_force_min(m).min_energy;
  } else {
    throw std::invalid_argument(
        "target energy unresolvable: model exceeds oracle size, pass one explicitly");
  }
  return {m, target};
}

AnnealResult run_engine(const BenchConfig& cfg, const IsingModel& m, long budget,
                        uint64_t seed, double target) {
  RunOptions opts;
  opts.record_trace = false;
  opts.stop_at_target = false;  // fixed budget; P_s is measured at full EC
  switch (cfg.engine) {
    case Engine::kSsqa: {
      SsqaParams p = cfg.ssqa;
      p.sc = budget;
      return ssqa_run(m, p, seed, target, opts);
    }
    case Engine::kSsa: {
      SsaParams p = cfg.ssa;
      p.sc = budget;
      return ssa_run(m, p, seed, target, opts);
    }
    case Engine::kSa: {
      SaParams p = cfg.sa;
      p.cycles = budget;
      return sa_run(m, p, seed, target, opts);
    }
  }
  throw std::logic_error("bad engine enum");
}

}  // namespace

BenchRecord run_trials(const BenchConfig& cfg) {
  cfg.validate();
  const bool gi = cfg.problem.n_nodes > 0;
  const int r = cfg.engine == Engine::kSsqa ? cfg.ssqa.r : 1;
  const long budget = cfg.ec / r;  // sweeps (or flip attempts) per trial

  // Shared problem when not regenerating per trial.
  std::optional<ResolvedProblem> shared;
  if (!gi) {
    shared = resolve_file(cfg.problem);
  } else if (!cfg.problem.fresh_instance) {
    shared = resolve_gi(cfg.problem, cfg.problem.gi_seed);
  }

  CounterRng instance_seeds(cfg.base_seed, kStreamTrialInstance);
  std::vector<TrialOutcome> outcomes(cfg.trials);
  std::atomic<int> next{0};
  std::exception_ptr first_err;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    try {
      for (int t = next.fetch_add(1); t < cfg.trials; t = next.fetch_add(1)) {
        if (failed.load(std::memory_order_relaxed)) return;
        const uint64_t run_seed = cfg.base_seed + uint64_t(t);
        AnnealResult res;
        if (shared) {
          res = run_engine(cfg, shared->model, budget, run_seed, shared->target);
        } else {
          ResolvedProblem prob = resolve_gi(cfg.problem, instance_seeds.raw(uint64_t(t)));
          res = run_engine(cfg, prob.model, budget, run_seed, prob.target);
        }
        outcomes[t] = {run_seed, res.reached_target, res.first_hit_cycle,
                       res.best_energy, res.wall_seconds};
      }
    } catch (...) {
      if (!failed.exchange(true)) first_err = std::current_exception();
    }
  };

  const int pool = std::min(cfg.workers, cfg.trials);
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (int i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  if (failed.load()) std::rethrow_exception(first_err);

  BenchRecord rec;
  rec.engine = cfg.engine;
  rec.n = gi ? cfg.problem.n_nodes * cfg.problem.n_nodes : shared->model.n();
  rec.r = r;
  rec.ec = cfg.engine == Engine::kSsqa ? compute_ec(r, budget) : cfg.ec;
  rec.tau = cfg.engine == Engine::kSsqa ? cfg.ssqa.tau
            : cfg.engine == Engine::kSsa ? cfg.ssa.tau
                                         : 0;
  rec.trials = cfg.trials;
  rec.base_seed = cfg.base_seed;
  rec.per_trial = std::move(outcomes);

  int hits = 0;
  double t_sum = 0.0;
  for (const auto& t : rec.per_trial) {
    hits += t.reached_target ? 1 : 0;
    t_sum += t.wall_seconds;
  }
  rec.p_s = double(hits) / cfg.trials;
  rec.t_mean_s = t_sum / cfg.trials;
  rec.tts = compute_tts(rec.p_s, rec.t_mean_s, cfg.p_target);
  return rec;
}

std::vector<BenchRecord> replica_sweep(const BenchConfig& cfg,
                                       const std::vector<int>& r_values) {
  if (cfg.engine != Engine::kSsqa) {
    throw std::invalid_argument("replica sweep applies to the replica engine only");
  }
  if (r_values.empty()) throw std::invalid_argument("no replica counts given");
  std::vector<BenchRecord> records;
  for (int rv : r_values) {
    BenchConfig c = cfg;
    c.ssqa.r = rv;
    records.push_back(run_trials(c));
  }
  return records;
}

std::vector<CaseSpec> case_suite() {
  return {{"case1", 10000, 50, 2},
          {"case2", 10000, 100, 1},
          {"case3", 20000, 50, 4},
          {"case4", 20000, 100, 2},
          {"case5", 40000, 100, 4}};
}

std::vector<BenchRecord> run_cases(const BenchConfig& cfg) {
  if (cfg.engine != Engine::kSsqa) {
    throw std::invalid_argument("the case suite is defined for the replica engine only");
  }
  std::vector<BenchRecord> records;
  for (const CaseSpec& cs : case_suite()) {
    long per_iter = long(cs.tau) * (cfg.ssqa.beta + 1);
    if (cs.ec / cfg.ssqa.r / per_iter != cs.iterations) {
      throw std::invalid_argument(
          "case iteration counts need r*(beta+1)*tau to divide ec as tabulated "
          "(r=25, beta=3 reproduces them)");
    }
    BenchConfig c = cfg;
    c.ec = cs.ec;
    c.ssqa.tau = cs.tau;
    BenchRecord rec = run_trials(c);
    rec.label = cs.label;
    records.push_back(std::move(rec));
  }
  return records;
}

void write_results_csv(const std::vector<BenchRecord>& records, const std::string& path) {
  if (records.empty()) throw std::invalid_argument("no records to write");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "engine,n,r,ec,tau,trials,p_s,t_mean_s,tts_s,seed\n";
  for (const auto& rec : records) {
    out << engine_name(rec.engine) << "," << rec.n << "," << rec.r << "," << rec.ec
        << "," << rec.tau << "," << rec.trials << "," << format_double(rec.p_s) << ","
        << format_double(rec.t_mean_s) << "," << rec.tts.csv_field() << ","
        << rec.base_seed << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_sweep_csv(const std::vector<BenchRecord>& records, const std::string& path) {
  if (records.empty()) throw std::invalid_argument("no records to write");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "r,p_s,t_mean_s,tts_s\n";
  for (const auto& rec : records) {
    out << rec.r << "," << format_double(rec.p_s) << "," << format_double(rec.t_mean_s)
        << "," << rec.tts.csv_field() << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_cases_csv(const std::vector<BenchRecord>& records, const std::string& path) {
  if (records.empty()) throw std::invalid_argument("no records to write");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "case,ec,tau,p_s,t_mean_s,tts_s\n";
  for (const auto& rec : records) {
    out << rec.label << "," << rec.ec << "," << rec.tau << ","
        << format_double(rec.p_s) << "," << format_double(rec.t_mean_s) << ","
        << rec.tts.csv_field() << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

nlohmann::json make_manifest(const std::string& kind, const BenchConfig& cfg,
                             const std::vector<int>& r_values,
                             const std::vector<BenchRecord>& records,
                             const std::vector<std::string>& output_paths) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) recs.push_back(r.to_json());
  return {{"kind", kind},
          {"version", kVersion},
          {"created_utc", utc_now()},
          {"config", cfg.to_json()},
          {"r_values", r_values},
          {"outputs", output_paths},
          {"records", recs}};
}

ReplayResult replay_manifest(const nlohmann::json& manifest,
                             std::optional<int> workers_override) {
  require_keys(manifest, {"kind", "version", "created_utc", "config", "r_values",
                          "outputs", "records"},
               "manifest");
  BenchConfig cfg = BenchConfig::from_json(manifest["config"]);
  if (workers_override) cfg.workers = *workers_override;

  const std::string kind = manifest["kind"].get<std::string>();
  ReplayResult out;
  if (kind == "bench") {
    out.records.push_back(run_trials(cfg));
  } else if (kind == "sweep") {
    out.records = replica_sweep(cfg, manifest["r_values"].get<std::vector<int>>());
  } else if (kind == "cases") {
    out.records = run_cases(cfg);
  } else {
    throw std::runtime_error("unknown manifest kind '" + kind + "'");
  }

  std::vector<BenchRecord> want;
  for (const auto& rj : manifest["records"]) want.push_back(BenchRecord::from_json(rj));

  auto fail = [&](const std::string& why) {
    out.match = false;
    if (out.mismatch.empty()) out.mismatch = why;
  };
  if (want.size() != out.records.size()) {
    fail("record count differs");
    return out;
  }
  for (size_t i = 0; i < want.size(); ++i) {
    const auto& a = want[i];
    const auto& b = out.records[i];
    if (a.per_trial.size() != b.per_trial.size()) {
      fail("trial count differs in record " + std::to_string(i));
      continue;
    }
    for (size_t t = 0; t < a.per_trial.size(); ++t) {
      const auto& x = a.per_trial[t];
      const auto& y = b.per_trial[t];
      // Bitwise comparison; wall_seconds is a measurement, not a result.
      if (x.seed != y.seed || x.reached_target != y.reached_target ||
          x.first_hit_cycle != y.first_hit_cycle || x.best_energy != y.best_energy) {
        fail("trial " + std::to_string(t) + " of record " + std::to_string(i) +
             " differs");
        break;
      }
    }
  }
  return out;
}

}  // namespace ssqa
