#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ssqa/bench.hpp"
#include "ssqa/model.hpp"

using namespace ssqa;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("bench_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

BenchConfig smoke_config() {
  BenchConfig cfg;
  cfg.engine = Engine::kSsqa;
  cfg.ssqa.r = 2;
  cfg.problem.n_nodes = 3;
  cfg.trials = 6;
  cfg.ec = 400;
  cfg.base_seed = 77;
  return cfg;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("equivalent cycles multiply replicas by sweeps") {
  CHECK(compute_ec(10, 2000) == 20000);
  CHECK(compute_ec(40, 500) == 20000);
  CHECK(compute_ec(1, 1) == 1);
  CHECK_THROWS_AS(compute_ec(0, 100), std::invalid_argument);
  CHECK_THROWS_AS(compute_ec(5, 0), std::invalid_argument);
}

TEST_CASE("time to solution interpolates the retry formula") {
  TtsValue v = compute_tts(0.5, 1.0, 0.99);
  REQUIRE(v.kind == TtsValue::Kind::kFinite);
  CHECK(std::abs(v.seconds - 6.6439) <= 1e-3);
  CHECK(v.defined());
  CHECK(v.value_or_inf() == v.seconds);

  TtsValue scaled = compute_tts(0.5, 2.0, 0.99);
  CHECK(scaled.seconds == doctest::Approx(2.0 * v.seconds));

  TtsValue sure = compute_tts(1.0, 3.0, 0.99);
  CHECK(sure.kind == TtsValue::Kind::kSaturatedZero);
  CHECK(sure.value_or_inf() == 0.0);
  CHECK(sure.csv_field() == "0");

  TtsValue never = compute_tts(0.0, 3.0, 0.99);
  CHECK(never.kind == TtsValue::Kind::kUndefined);
  CHECK_FALSE(never.defined());
  CHECK(std::isinf(never.value_or_inf()));
  CHECK(never.csv_field() == "-");

  CHECK_THROWS_AS(compute_tts(0.5, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_tts(0.5, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_tts(-0.1, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(compute_tts(1.1, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(compute_tts(0.5, 0.0, 0.5), std::invalid_argument);

  for (TtsValue x : {v, sure, never}) {
    TtsValue back = TtsValue::from_json(x.to_json());
    CHECK(back.kind == x.kind);
    if (x.kind == TtsValue::Kind::kFinite) CHECK(back.seconds == x.seconds);
  }
}

TEST_CASE("engine names round trip and reject unknowns") {
  for (Engine e : {Engine::kSsqa, Engine::kSsa, Engine::kSa}) {
    CHECK(engine_from_name(engine_name(e)) == e);
  }
  CHECK_THROWS_AS(engine_from_name("quantum"), std::invalid_argument);
}

TEST_CASE("bench config json round trips and rejects malformed documents") {
  BenchConfig cfg = smoke_config();
  cfg.engine = Engine::kSsa;
  cfg.ssa.tau = 25;
  cfg.problem.edge_prob = 0.25;
  cfg.problem.c1 = 1.25;
  cfg.problem.target_energy = -3.5;
  cfg.workers = 4;

  nlohmann::json j = cfg.to_json();
  BenchConfig back = BenchConfig::from_json(j);
  CHECK(back.engine == cfg.engine);
  CHECK(back.ssa.tau == 25);
  CHECK(back.ssqa.r == cfg.ssqa.r);
  CHECK(back.problem.n_nodes == 3);
  CHECK(back.problem.edge_prob == 0.25);
  CHECK(back.problem.c1 == 1.25);
  REQUIRE(back.problem.target_energy.has_value());
  CHECK(*back.problem.target_energy == -3.5);
  CHECK(back.workers == 4);
  CHECK(back.base_seed == 77);

  nlohmann::json extra = cfg.to_json();
  extra["surprise"] = 1;
  CHECK_THROWS_AS(BenchConfig::from_json(extra), std::runtime_error);

  nlohmann::json missing = cfg.to_json();
  missing.erase("trials");
  CHECK_THROWS_AS(BenchConfig::from_json(missing), std::runtime_error);

  nlohmann::json nested = cfg.to_json();
  nested["ssqa"].erase("tau");
  CHECK_THROWS_AS(BenchConfig::from_json(nested), std::runtime_error);
}

TEST_CASE("config validation pins down the problem and budget") {
  BenchConfig cfg = smoke_config();
  CHECK_NOTHROW(cfg.validate());

  BenchConfig both = cfg;
  both.problem.model_file = "x.txt";
  CHECK_THROWS_AS(both.validate(), std::invalid_argument);
  BenchConfig neither = cfg;
  neither.problem.n_nodes = 0;
  CHECK_THROWS_AS(neither.validate(), std::invalid_argument);

  auto reject = [&](auto mutate) {
    BenchConfig bad = cfg;
    mutate(bad);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  };
  reject([](BenchConfig& b) { b.trials = 0; });
  reject([](BenchConfig& b) { b.ec = 0; });
  reject([](BenchConfig& b) { b.p_target = 0.0; });
  reject([](BenchConfig& b) { b.p_target = 1.0; });
  reject([](BenchConfig& b) { b.workers = 0; });
  reject([](BenchConfig& b) { b.ssqa.r = 0; });
  reject([](BenchConfig& b) { b.ssqa.r = 1000; });  // ec / r < 1
  reject([](BenchConfig& b) { b.problem.edge_prob = 1.5; });
  reject([](BenchConfig& b) { b.problem.c2 = 0.0; });
}

TEST_CASE("trial batches aggregate hits and stay deterministic") {
  BenchConfig cfg = smoke_config();
  BenchRecord rec = run_trials(cfg);
  CHECK(rec.engine == Engine::kSsqa);
  CHECK(rec.n == 9);
  CHECK(rec.r == 2);
  CHECK(rec.ec == 400);
  CHECK(rec.tau == cfg.ssqa.tau);
  CHECK(rec.trials == 6);
  REQUIRE(rec.per_trial.size() == 6);
  int hits = 0;
  for (size_t t = 0; t < rec.per_trial.size(); ++t) {
    CHECK(rec.per_trial[t].seed == 77 + t);
    CHECK(rec.per_trial[t].wall_seconds > 0.0);
    hits += rec.per_trial[t].reached_target;
    if (rec.per_trial[t].reached_target) {
      CHECK(rec.per_trial[t].best_energy <= 1e-9);
      CHECK(rec.per_trial[t].first_hit_cycle >= 0);
    }
  }
  CHECK(rec.p_s == double(hits) / 6.0);
  CHECK(rec.p_s > 0.5);  // tiny instances fall quickly
  CHECK(rec.t_mean_s > 0.0);

  BenchRecord again = run_trials(cfg);
  for (size_t t = 0; t < 6; ++t) {
    CHECK(again.per_trial[t].best_energy == rec.per_trial[t].best_energy);
    CHECK(again.per_trial[t].first_hit_cycle == rec.per_trial[t].first_hit_cycle);
  }
}

TEST_CASE("worker pools do not change the results") {
  BenchConfig cfg = smoke_config();
  cfg.trials = 8;
  BenchConfig wide = cfg;
  wide.workers = 4;
  BenchRecord a = run_trials(cfg);
  BenchRecord b = run_trials(wide);
  REQUIRE(a.per_trial.size() == b.per_trial.size());
  for (size_t t = 0; t < a.per_trial.size(); ++t) {
    CHECK(a.per_trial[t].seed == b.per_trial[t].seed);
    CHECK(a.per_trial[t].reached_target == b.per_trial[t].reached_target);
    CHECK(a.per_trial[t].first_hit_cycle == b.per_trial[t].first_hit_cycle);
    CHECK(a.per_trial[t].best_energy == b.per_trial[t].best_energy);
  }
  CHECK(a.p_s == b.p_s);
}

TEST_CASE("pinned instances reuse one problem across trials") {
  BenchConfig cfg = smoke_config();
  cfg.problem.fresh_instance = false;
  cfg.problem.gi_seed = 5;
  BenchRecord a = run_trials(cfg);
  BenchRecord b = run_trials(cfg);
  for (size_t t = 0; t < a.per_trial.size(); ++t) {
    CHECK(a.per_trial[t].best_energy == b.per_trial[t].best_energy);
  }
  BenchConfig other = cfg;
  other.problem.gi_seed = 6;
  BenchRecord c = run_trials(other);
  bool any_diff = false;
  for (size_t t = 0; t < a.per_trial.size(); ++t) {
    any_diff = any_diff || a.per_trial[t].best_energy != c.per_trial[t].best_energy ||
               a.per_trial[t].first_hit_cycle != c.per_trial[t].first_hit_cycle;
  }
  CHECK(any_diff);
}

TEST_CASE("file problems resolve their target from the oracle when small") {
  TempFile f("model.txt");
  QuboModel q(2);
  q.set_coeff(0, 0, -1.0);
  q.set_coeff(1, 1, 2.0);
  save_qubo(q, f.path);  // minimum -1 at x = {1, 0}

  BenchConfig cfg;
  cfg.engine = Engine::kSsa;
  cfg.problem.n_nodes = 0;
  cfg.problem.model_file = f.path;
  cfg.trials = 4;
  cfg.ec = 200;
  cfg.base_seed = 3;
  BenchRecord rec = run_trials(cfg);
  CHECK(rec.n == 2);
  CHECK(rec.r == 1);
  CHECK(rec.p_s == 1.0);
  for (const auto& t : rec.per_trial) {
    CHECK(t.best_energy == doctest::Approx(-1.0).epsilon(1e-12));
  }

  TempFile big("big.txt");
  save_qubo(QuboModel(25), big.path);
  BenchConfig over = cfg;
  over.problem.model_file = big.path;
  CHECK_THROWS_AS(run_trials(over), std::invalid_argument);
  over.problem.target_energy = 0.0;
  CHECK_NOTHROW(run_trials(over));
}

TEST_CASE("replica sweeps rerun the batch per replica count") {
  BenchConfig cfg = smoke_config();
  cfg.trials = 4;
  cfg.ec = 400;
  std::vector<BenchRecord> recs = replica_sweep(cfg, {1, 2, 4});
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].r == 1);
  CHECK(recs[1].r == 2);
  CHECK(recs[2].r == 4);
  for (const auto& rec : recs) {
    CHECK(rec.ec == 400);  // r divides the budget here, nothing is lost
    CHECK(rec.trials == 4);
  }
  CHECK_THROWS_AS(replica_sweep(cfg, {}), std::invalid_argument);
  BenchConfig sa = cfg;
  sa.engine = Engine::kSa;
  CHECK_THROWS_AS(replica_sweep(sa, {1, 2}), std::invalid_argument);
}

TEST_CASE("the case table pins budgets, steps, and iteration counts") {
  std::vector<CaseSpec> cases = case_suite();
  REQUIRE(cases.size() == 5);
  CHECK(cases[0].label == "case1");
  CHECK(cases[0].ec == 10000);
  CHECK(cases[0].tau == 50);
  CHECK(cases[0].iterations == 2);
  CHECK(cases[1].label == "case2");
  CHECK(cases[1].ec == 10000);
  CHECK(cases[1].tau == 100);
  CHECK(cases[1].iterations == 1);
  CHECK(cases[2].label == "case3");
  CHECK(cases[2].ec == 20000);
  CHECK(cases[2].tau == 50);
  CHECK(cases[2].iterations == 4);
  CHECK(cases[3].label == "case4");
  CHECK(cases[3].ec == 20000);
  CHECK(cases[3].tau == 100);
  CHECK(cases[3].iterations == 2);
  CHECK(cases[4].label == "case5");
  CHECK(cases[4].ec == 40000);
  CHECK(cases[4].tau == 100);
  CHECK(cases[4].iterations == 4);
}

TEST_CASE("case batches run the tabulated budgets") {
  BenchConfig cfg = smoke_config();
  cfg.ssqa.r = 25;
  cfg.problem.n_nodes = 2;
  cfg.trials = 2;
  std::vector<BenchRecord> recs = run_cases(cfg);
  REQUIRE(recs.size() == 5);
  std::vector<CaseSpec> cases = case_suite();
  for (size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].label == cases[i].label);
    CHECK(recs[i].ec == cases[i].ec);
    CHECK(recs[i].tau == cases[i].tau);
    CHECK(recs[i].r == 25);
  }

  BenchConfig wrong_r = cfg;
  wrong_r.ssqa.r = 10;  // iteration counts in the table assume r = 25
  CHECK_THROWS_AS(run_cases(wrong_r), std::invalid_argument);
  BenchConfig ssa = cfg;
  ssa.engine = Engine::kSsa;
  CHECK_THROWS_AS(run_cases(ssa), std::invalid_argument);
}

TEST_CASE("csv writers emit one row per record under a fixed header") {
  BenchConfig cfg = smoke_config();
  cfg.trials = 2;
  BenchRecord rec = run_trials(cfg);

  TempFile results("results.csv");
  write_results_csv({rec, rec}, results.path);
  std::vector<std::string> lines = read_lines(results.path);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "engine,n,r,ec,tau,trials,p_s,t_mean_s,tts_s,seed");
  CHECK(lines[1].rfind("ssqa,9,2,400,", 0) == 0);

  TempFile sweep("sweep.csv");
  write_sweep_csv({rec}, sweep.path);
  lines = read_lines(sweep.path);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "r,p_s,t_mean_s,tts_s");
  CHECK(lines[1].rfind("2,", 0) == 0);

  TempFile cases("cases.csv");
  rec.label = "case1";
  write_cases_csv({rec}, cases.path);
  lines = read_lines(cases.path);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "case,ec,tau,p_s,t_mean_s,tts_s");
  CHECK(lines[1].rfind("case1,400,", 0) == 0);

  CHECK_THROWS_AS(write_results_csv({}, results.path), std::invalid_argument);
  CHECK_THROWS_AS(write_sweep_csv({}, sweep.path), std::invalid_argument);
  CHECK_THROWS_AS(write_cases_csv({}, cases.path), std::invalid_argument);
}

TEST_CASE("bench records survive their json encoding") {
  BenchConfig cfg = smoke_config();
  cfg.trials = 3;
  BenchRecord rec = run_trials(cfg);
  rec.label = "case2";
  BenchRecord back = BenchRecord::from_json(rec.to_json());
  CHECK(back.label == rec.label);
  CHECK(back.engine == rec.engine);
  CHECK(back.n == rec.n);
  CHECK(back.r == rec.r);
  CHECK(back.ec == rec.ec);
  CHECK(back.tau == rec.tau);
  CHECK(back.trials == rec.trials);
  CHECK(back.p_s == rec.p_s);
  CHECK(back.tts.kind == rec.tts.kind);
  CHECK(back.base_seed == rec.base_seed);
  REQUIRE(back.per_trial.size() == rec.per_trial.size());
  for (size_t t = 0; t < rec.per_trial.size(); ++t) {
    CHECK(back.per_trial[t].seed == rec.per_trial[t].seed);
    CHECK(back.per_trial[t].reached_target == rec.per_trial[t].reached_target);
    CHECK(back.per_trial[t].first_hit_cycle == rec.per_trial[t].first_hit_cycle);
    CHECK(back.per_trial[t].best_energy == rec.per_trial[t].best_energy);
    CHECK(back.per_trial[t].wall_seconds == rec.per_trial[t].wall_seconds);
  }
}

TEST_CASE("manifests replay to identical outcomes and catch tampering") {
  BenchConfig cfg = smoke_config();
  cfg.trials = 4;
  BenchRecord rec = run_trials(cfg);
  nlohmann::json manifest = make_manifest("bench", cfg, {}, {rec}, {"out.csv"});
  CHECK(manifest["kind"] == "bench");
  CHECK(manifest["outputs"][0] == "out.csv");

  ReplayResult replay = replay_manifest(manifest, {});
  CHECK(replay.match);
  CHECK(replay.mismatch.empty());
  REQUIRE(replay.records.size() == 1);

  ReplayResult wide = replay_manifest(manifest, 4);
  CHECK(wide.match);

  nlohmann::json tampered = manifest;
  tampered["records"][0]["per_trial"][0]["best_energy"] =
      rec.per_trial[0].best_energy + 1.0;
  ReplayResult bad = replay_manifest(tampered, {});
  CHECK_FALSE(bad.match);
  CHECK_FALSE(bad.mismatch.empty());

  nlohmann::json unknown = manifest;
  unknown["kind"] = "mystery";
  CHECK_THROWS_AS(replay_manifest(unknown, {}), std::runtime_error);

  nlohmann::json incomplete = manifest;
  incomplete.erase("config");
  CHECK_THROWS_AS(replay_manifest(incomplete, {}), std::runtime_error);
}

TEST_CASE("sweep manifests replay every replica count") {
  BenchConfig cfg = smoke_config();
  cfg.trials = 2;
  std::vector<int> r_values{1, 2};
  std::vector<BenchRecord> recs = replica_sweep(cfg, r_values);
  nlohmann::json manifest = make_manifest("sweep", cfg, r_values, recs, {});
  ReplayResult replay = replay_manifest(manifest, {});
  CHECK(replay.match);
  REQUIRE(replay.records.size() == 2);
  CHECK(replay.records[0].r == 1);
  CHECK(replay.records[1].r == 2);
}
