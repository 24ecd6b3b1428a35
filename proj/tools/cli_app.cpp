#include "cli_app.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "ssqa/annealer.hpp"
#include "ssqa/bench.hpp"
#include "ssqa/gi.hpp"
#include "ssqa/model.hpp"
#include "ssqa/oracle.hpp"
#include "ssqa/version.hpp"

namespace ssqa::cli {

namespace {

int default_workers() {
  if (const char* env = std::getenv("SSQA_WORKERS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? int(hc) : 1;
}

// The --config flag is expanded before parsing (see expand_config_args); the
// option here only documents it and catches stray unexpanded uses.
void enable_config(CLI::App* sub) {
  sub->add_option("--config", "Read options from a key=value file (# comments)")
      ->expected(1);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Turns each `key=value` line of the file into a `--key=value` token and each
// bare `key` line into `--key`, so config files go through the exact same
// parsing and validation as command-line arguments.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(f, line)) {
    std::string entry = trim(line);
    if (entry.empty() || entry[0] == '#') continue;
    size_t eq = entry.find('=');
    std::string key = trim(entry.substr(0, eq == std::string::npos ? entry.size() : eq));
    if (key.empty()) throw std::invalid_argument("bad config line: " + line);
    if (key == "config") throw std::invalid_argument("config files cannot nest");
    if (eq == std::string::npos) {
      tokens.push_back("--" + key);
    } else {
      tokens.push_back("--" + key + "=" + trim(entry.substr(eq + 1)));
    }
  }
  return tokens;
}

// Replaces `--config FILE` / `--config=FILE` with the file's tokens in place,
// so the options land in the scope (subcommand) where the flag appeared.
std::vector<std::string> expand_config_args(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (size_t i = 0; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file");
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    std::vector<std::string> tokens = config_tokens(file);
    out.insert(out.end(), tokens.begin(), tokens.end());
  }
  return out;
}

// Engine parameters, exposed with the same names everywhere.
struct EngineFlags {
  int replicas = 0;
  double jperp_min = 0.0;
  double jperp_max = 0.5;
  int beta = 3;
  int tau = 100;
  int delay = 1;
  double i0 = 2.0;
  double n_rnd = 1.0;
  double alpha = 1.0;
  bool bidirectional = false;
  double i0_min = 1.0;
  double i0_max = 16.0;
  double ssa_beta = 0.5;
  int ssa_tau = 10;
  double t_init = 1000.0;
  double t_final = 0.1;
  double delta_it = 0.0;

  void add_to(CLI::App* sub) {
    sub->add_option("--replicas", replicas, "Replica count R (replica engine)");
    sub->add_option("--jperp-min", jperp_min, "Replica coupling at iteration start");
    sub->add_option("--jperp-max", jperp_max, "Replica coupling at iteration end");
    sub->add_option("--beta", beta, "Coupling schedule steps per iteration");
    sub->add_option("--tau", tau, "Cycles per coupling step");
    sub->add_option("--delay", delay, "Replica coupling delay in cycles");
    sub->add_option("--i0", i0, "Accumulator saturation bound (replica engine)");
    sub->add_option("--n-rnd", n_rnd, "Noise magnitude");
    sub->add_option("--alpha", alpha, "Accumulator clamp resolution");
    sub->add_flag("--bidirectional-coupling", bidirectional,
                  "Couple each replica to both neighbours");
    sub->add_option("--i0-min", i0_min, "Starting bound of the growing-i0 schedule");
    sub->add_option("--i0-max", i0_max, "Ceiling of the growing-i0 schedule");
    sub->add_option("--ssa-beta", ssa_beta, "Bound multiplier per schedule step, in (0,1)");
    sub->add_option("--ssa-tau", ssa_tau, "Cycles per bound step (single-network engine)");
    sub->add_option("--t-init", t_init, "Initial Metropolis temperature");
    sub->add_option("--t-final", t_final, "Final Metropolis temperature");
    sub->add_option("--delta-it", delta_it,
                    "Inverse-temperature increment (0 derives it from the endpoints)");
  }

  void fill(BenchConfig& cfg) const {
    cfg.ssqa.r = replicas;
    cfg.ssqa.jperp_min = jperp_min;
    cfg.ssqa.jperp_max = jperp_max;
    cfg.ssqa.beta = beta;
    cfg.ssqa.tau = tau;
    cfg.ssqa.delay = delay;
    cfg.ssqa.i0 = i0;
    cfg.ssqa.n_rnd = n_rnd;
    cfg.ssqa.alpha = alpha;
    cfg.ssqa.bidirectional = bidirectional;
    cfg.ssa.i0_min = i0_min;
    cfg.ssa.i0_max = i0_max;
    cfg.ssa.beta = ssa_beta;
    cfg.ssa.tau = ssa_tau;
    cfg.ssa.n_rnd = n_rnd;
    cfg.ssa.alpha = alpha;
    cfg.sa.t_init = t_init;
    cfg.sa.t_final = t_final;
    cfg.sa.delta_it = delta_it;
  }
};

struct ProblemFlags {
  std::string model_file;
  std::optional<double> target;
  int nodes = 0;
  double edge_prob = 0.5;
  bool permute = false;
  double c1 = 0.75;
  double c2 = 0.75;
  bool fixed_instance = false;
  uint64_t instance_seed = 0;
  CLI::Option* instance_seed_opt = nullptr;

  void add_to(CLI::App* sub, bool bench_mode) {
    sub->add_option("--model", model_file, "Ising or QUBO model file");
    sub->add_option("--target", target,
                    "Target energy (default: 0 for generated instances, the oracle "
                    "minimum for small model files)");
    sub->add_option("--nodes", nodes, "Node count for generated instances");
    sub->add_option("--edge-prob", edge_prob, "Edge probability for generated instances");
    sub->add_flag("--permute", permute, "Relabel the second graph");
    sub->add_option("--c1", c1, "Vertex one-hot penalty weight");
    sub->add_option("--c2", c2, "Edge inconsistency penalty weight");
    if (bench_mode) {
      sub->add_flag("--fixed-instance", fixed_instance,
                    "Reuse one generated instance across all trials");
      instance_seed_opt = sub->add_option("--instance-seed", instance_seed,
                                          "Seed of the fixed/generated instance");
    } else {
      instance_seed_opt = sub->add_option("--instance-seed", instance_seed,
                                          "Seed of the generated instance");
    }
  }

  void fill(ProblemSpec& p, uint64_t fallback_seed) const {
    p.model_file = model_file;
    p.target_energy = target;
    p.n_nodes = nodes;
    p.edge_prob = edge_prob;
    p.permute = permute;
    p.c1 = c1;
    p.c2 = c2;
    p.fresh_instance = !fixed_instance;
    p.gi_seed = (instance_seed_opt && instance_seed_opt->count()) ? instance_seed
                                                                  : fallback_seed;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(f);
}

void cmd_generate(CLI::App* sub, std::ostream& out) {
  auto nodes = std::make_shared<int>(0);
  auto edge_prob = std::make_shared<double>(0.5);
  auto seed = std::make_shared<uint64_t>(0);
  auto permute = std::make_shared<bool>(false);
  auto c1 = std::make_shared<double>(0.75);
  auto c2 = std::make_shared<double>(0.75);
  auto prefix = std::make_shared<std::string>();

  sub->add_option("--nodes", *nodes, "Node count")->required();
  sub->add_option("--edge-prob", *edge_prob, "Edge probability");
  sub->add_option("--seed", *seed, "Instance seed")->required();
  sub->add_flag("--permute", *permute, "Relabel the second graph");
  sub->add_option("--c1", *c1, "Vertex one-hot penalty weight");
  sub->add_option("--c2", *c2, "Edge inconsistency penalty weight");
  sub->add_option("-o,--output", *prefix, "Output path prefix")->required();
  enable_config(sub);

  sub->callback([=, &out] {
    GiInstance inst = generate_gi(*nodes, *edge_prob, *seed, *permute, *c1, *c2);
    QuboModel q = build_gi_qubo(inst);

    std::string g1 = *prefix + ".graph1.txt";
    std::string g2 = *prefix + ".graph2.txt";
    std::string qf = *prefix + ".qubo";
    std::string mf = *prefix + ".instance.json";
    save_graph(inst.graph1, g1);
    save_graph(inst.graph2, g2);
    save_qubo(q, qf);

    nlohmann::json manifest = {{"n_nodes", *nodes},
                               {"edge_prob", *edge_prob},
                               {"permute", *permute},
                               {"c1", *c1},
                               {"c2", *c2},
                               {"seed", *seed},
                               {"truth_perm", *inst.truth_perm},
                               {"n_vars", q.n()}};
    write_text(mf, manifest.dump(2) + "\n");

    out << "graph1=" << g1 << "\n"
        << "graph2=" << g2 << "\n"
        << "qubo=" << qf << "\n"
        << "instance=" << mf << "\n";
  });
}

void cmd_oracle(CLI::App* sub, std::ostream& out) {
  auto path = std::make_shared<std::string>();
  sub->add_option("model", *path, "Ising or QUBO model file")->required();

  sub->callback([=, &out] {
    AnyModel any = load_model(*path);
    OracleReport rep = std::holds_alternative<QuboModel>(any)
                           ? brute_force_min(std::get<QuboModel>(any))
                           : brute_force_min(std::get<IsingModel>(any));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", rep.min_energy);
    out << "min_energy=" << buf << "\n"
        << "minimizer_count=" << rep.minimizer_count << "\n"
        << "states_checked=" << rep.state_count_checked << "\n"
        << "truncated=" << (rep.truncated ? "true" : "false") << "\n";
  });
}

void cmd_anneal(CLI::App* sub, std::ostream& out) {
  auto engine = std::make_shared<std::string>("ssqa");
  auto flags = std::make_shared<EngineFlags>();
  auto problem = std::make_shared<ProblemFlags>();
  auto seed = std::make_shared<uint64_t>(0);
  auto sc = std::make_shared<long>(0);
  auto trace_path = std::make_shared<std::string>();
  auto no_early_stop = std::make_shared<bool>(false);

  sub->add_option("--engine", *engine, "ssqa|ssa|sa");
  flags->add_to(sub);
  problem->add_to(sub, false);
  sub->add_option("--seed", *seed, "Run seed")->required();
  sub->add_option("--sc", *sc, "Cycle budget")->required();
  sub->add_option("--trace", *trace_path, "Dump per-cycle energies to this CSV file");
  sub->add_flag("--no-early-stop", *no_early_stop, "Run the full budget even after a hit");
  enable_config(sub);

  sub->callback([=, &out] {
    Engine eng = engine_from_name(*engine);

    IsingModel model(1);
    std::optional<double> target = problem->target;
    if (!problem->model_file.empty()) {
      if (problem->nodes > 0) {
        throw std::invalid_argument("pass either --model or --nodes, not both");
      }
      AnyModel any = load_model(problem->model_file);
      model = std::holds_alternative<QuboModel>(any)
                  ? qubo_to_ising(std::get<QuboModel>(any))
                  : std::get<IsingModel>(any);
      if (!target && model.n() <= kOracleMaxVars) {
        target = brute_force_min(model).min_energy;
      }
    } else if (problem->nodes > 0) {
      uint64_t iseed = (problem->instance_seed_opt && problem->instance_seed_opt->count())
                           ? problem->instance_seed
                           : *seed;
      GiInstance inst = generate_gi(problem->nodes, problem->edge_prob, iseed,
                                    problem->permute, problem->c1, problem->c2);
      model = qubo_to_ising(build_gi_qubo(inst));
      if (!target) target = 0.0;
    } else {
      throw std::invalid_argument("need a problem: --model or --nodes");
    }

    RunOptions opts;
    opts.record_trace = !trace_path->empty();
    opts.stop_at_target = !*no_early_stop;

    AnnealResult res;
    if (eng == Engine::kSsqa) {
      BenchConfig tmp;
      flags->fill(tmp);
      SsqaParams p = tmp.ssqa;
      p.sc = *sc;
      res = ssqa_run(model, p, *seed, target, opts);
    } else if (eng == Engine::kSsa) {
      BenchConfig tmp;
      flags->fill(tmp);
      SsaParams p = tmp.ssa;
      p.sc = *sc;
      res = ssa_run(model, p, *seed, target, opts);
    } else {
      BenchConfig tmp;
      flags->fill(tmp);
      SaParams p = tmp.sa;
      p.cycles = *sc;
      res = sa_run(model, p, *seed, target, opts);
    }

    if (!trace_path->empty()) {
      std::ofstream tf(*trace_path);
      if (!tf) throw std::runtime_error("cannot write " + *trace_path);
      tf << "cycle,replica,energy,jperp\n";
      tf.precision(17);
      for (const auto& pt : res.trace) {
        tf << pt.cycle << "," << pt.replica << "," << pt.energy << "," << pt.jperp << "\n";
      }
      if (!tf) throw std::runtime_error("write failed: " + *trace_path);
    }

    char ebuf[64];
    std::snprintf(ebuf, sizeof(ebuf), "%.17g", res.best_energy);
    out << "engine=" << *engine << "\n"
        << "n=" << model.n() << "\n"
        << "best_energy=" << ebuf << "\n"
        << "best_replica=" << res.best_replica << "\n"
        << "reached_target=" << (res.reached_target ? "true" : "false") << "\n"
        << "first_hit_cycle=" << res.first_hit_cycle << "\n"
        << "cycles_used=" << res.cycles_used << "\n"
        << "wall_seconds=" << res.wall_seconds << "\n";
    if (!trace_path->empty()) out << "trace=" << *trace_path << "\n";
  });
}

// Shared skeleton of bench / sweep-replicas / cases.
struct BatchFlags {
  std::string engine = "ssqa";
  EngineFlags eng;
  ProblemFlags problem;
  int trials = 100;
  long ec = 0;
  double p_target = 0.99;
  uint64_t seed = 0;
  int workers = default_workers();
  std::string prefix = "bench";
  CLI::Option* seed_opt = nullptr;
  CLI::Option* ec_opt = nullptr;

  void add_to(CLI::App* sub, bool with_engine, bool with_ec) {
    if (with_engine) sub->add_option("--engine", engine, "ssqa|ssa|sa");
    eng.add_to(sub);
    problem.add_to(sub, true);
    sub->add_option("--trials", trials, "Trials per record");
    if (with_ec) ec_opt = sub->add_option("--ec", ec, "Total spin-update budget");
    sub->add_option("--p-target", p_target, "Target probability for time-to-solution");
    seed_opt = sub->add_option("--seed", seed, "Base seed (trial t runs with seed+t)");
    sub->add_option("--workers", workers, "Concurrent trial workers");
    sub->add_option("-o,--output", prefix, "Output path prefix");
    enable_config(sub);
  }

  BenchConfig config() const {
    BenchConfig cfg;
    cfg.engine = engine_from_name(engine);
    eng.fill(cfg);
    problem.fill(cfg.problem, seed);
    cfg.trials = trials;
    cfg.ec = ec;
    cfg.p_target = p_target;
    cfg.base_seed = seed;
    cfg.workers = workers;
    return cfg;
  }

  void require_seed() const {
    if (!seed_opt->count()) {
      throw CLI::RequiredError("--seed (reproducibility is mandatory here)");
    }
  }
};

void print_record(const BenchRecord& rec, std::ostream& out) {
  out << "p_s=" << rec.p_s << "\n"
      << "t_mean_s=" << rec.t_mean_s << "\n"
      << "tts_s=" << rec.tts.csv_field() << "\n";
}

void cmd_bench(CLI::App* sub, std::ostream& out) {
  auto flags = std::make_shared<BatchFlags>();
  auto replay_path = std::make_shared<std::string>();

  flags->add_to(sub, true, true);
  sub->add_option("--replay", *replay_path,
                  "Re-execute a manifest and compare per-trial results");

  sub->callback([=, &out] {
    if (!replay_path->empty()) {
      std::optional<int> workers_override;
      if (sub->count("--workers")) workers_override = flags->workers;
      ReplayResult rr = replay_manifest(load_json(*replay_path), workers_override);
      out << "replay_match=" << (rr.match ? "true" : "false") << "\n";
      if (!rr.match) {
        throw std::runtime_error("replay mismatch: " + rr.mismatch);
      }
      return;
    }
    flags->require_seed();
    if (!flags->ec_opt->count()) throw CLI::RequiredError("--ec");

    BenchConfig cfg = flags->config();
    BenchRecord rec = run_trials(cfg);

    std::string csv = flags->prefix + ".results.csv";
    std::string man = flags->prefix + ".manifest.json";
    write_results_csv({rec}, csv);
    write_text(man, make_manifest("bench", cfg, {}, {rec}, {csv}).dump(2) + "\n");

    out << "results_csv=" << csv << "\n"
        << "manifest=" << man << "\n";
    print_record(rec, out);
  });
}

void cmd_sweep(CLI::App* sub, std::ostream& out) {
  auto flags = std::make_shared<BatchFlags>();
  auto r_values = std::make_shared<std::vector<int>>();

  flags->add_to(sub, false, true);
  sub->add_option("--r-list", *r_values, "Replica counts to sweep")
      ->delimiter(',')
      ->required();

  sub->callback([=, &out] {
    flags->require_seed();
    if (!flags->ec_opt->count()) throw CLI::RequiredError("--ec");

    BenchConfig cfg = flags->config();
    cfg.engine = Engine::kSsqa;
    cfg.ssqa.r = r_values->front();
    std::vector<BenchRecord> recs = replica_sweep(cfg, *r_values);

    std::string csv = flags->prefix + ".results.csv";
    std::string plot = flags->prefix + ".sweep.csv";
    std::string man = flags->prefix + ".manifest.json";
    write_results_csv(recs, csv);
    write_sweep_csv(recs, plot);
    write_text(man, make_manifest("sweep", cfg, *r_values, recs, {csv, plot}).dump(2) + "\n");

    out << "results_csv=" << csv << "\n"
        << "sweep_csv=" << plot << "\n"
        << "manifest=" << man << "\n";
    for (const auto& rec : recs) {
      out << "r=" << rec.r << " p_s=" << rec.p_s << " t_mean_s=" << rec.t_mean_s
          << " tts_s=" << rec.tts.csv_field() << "\n";
    }
  });
}

void cmd_cases(CLI::App* sub, std::ostream& out) {
  auto flags = std::make_shared<BatchFlags>();
  flags->add_to(sub, false, false);

  sub->callback([=, &out] {
    flags->require_seed();

    BenchConfig cfg = flags->config();
    cfg.engine = Engine::kSsqa;
    cfg.ec = case_suite().front().ec;  // per-case budgets are set by the suite
    std::vector<BenchRecord> recs = run_cases(cfg);

    std::string csv = flags->prefix + ".results.csv";
    std::string plot = flags->prefix + ".cases.csv";
    std::string man = flags->prefix + ".manifest.json";
    write_results_csv(recs, csv);
    write_cases_csv(recs, plot);
    write_text(man, make_manifest("cases", cfg, {}, recs, {csv, plot}).dump(2) + "\n");

    out << "results_csv=" << csv << "\n"
        << "cases_csv=" << plot << "\n"
        << "manifest=" << man << "\n";
    for (const auto& rec : recs) {
      out << rec.label << ": p_s=" << rec.p_s << " tts_s=" << rec.tts.csv_field() << "\n";
    }
  });
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Annealing toolkit: replica-coupled and single-network stochastic "
               "annealers with a graph-isomorphism benchmark harness"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  cmd_generate(app.add_subcommand("generate", "Generate a graph-isomorphism instance"), out);
  cmd_anneal(app.add_subcommand("anneal", "Run a single annealing trial"), out);
  cmd_bench(app.add_subcommand("bench", "Run a trial battery and report P_s/TTS"), out);
  cmd_sweep(app.add_subcommand("sweep-replicas", "Benchmark across replica counts"), out);
  cmd_cases(app.add_subcommand("cases", "Run the fixed budget/schedule case suite"), out);
  cmd_oracle(app.add_subcommand("oracle", "Exhaustive minimum of a small model file"), out);

  try {
    std::vector<std::string> expanded = expand_config_args(args);
    std::vector<const char*> argv;
    argv.push_back("ssqa");
    for (const auto& a : expanded) argv.push_back(a.c_str());
    app.parse(int(argv.size()), argv.data());
    return 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace ssqa::cli
