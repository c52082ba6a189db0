#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cs/bench.hpp"
#include "cs/errors.hpp"

using namespace cs;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n = 32;
  cfg.m = 16;
  cfg.k = 3;
  cfg.noise = NoiseSpec::absolute(0.05);
  cfg.trials = 4;
  cfg.base_seed = 77;
  return cfg;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string read_file(const std::string& path) {
  std::ifstream file(path);
  std::stringstream ss;
  ss << file.rdbuf();
  return ss.str();
}

// Timing fields hold measured wall time; every other field must be a pure
// function of (config, seed). Masking columns 11-13 (ts_s, tr_s, tp_s) keeps
// the comparison within the deterministic domain.
std::string mask_timing_columns(const std::string& csv) {
  std::stringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() == 16) {
      fields[11] = fields[12] = fields[13] = "-";
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("trial records are deterministic outside the timing fields") {
  const ExperimentConfig cfg = small_config();
  const TrialRecord a = run_trial(cfg, 2);
  const TrialRecord b = run_trial(cfg, 2);
  CHECK(a.trial_seed == cfg.base_seed + 2);
  CHECK(a.trial_seed == b.trial_seed);
  CHECK(a.sigma == b.sigma);
  CHECK(a.metrics.re == b.metrics.re);
  CHECK(a.metrics.mse == b.metrics.mse);
  CHECK(a.metrics.cc == b.metrics.cc);
  CHECK(a.metrics.support_size == b.metrics.support_size);
  CHECK(a.converged == b.converged);
  CHECK(a.failed == b.failed);
}

TEST_CASE("zero signals become failure rows instead of aborting") {
  ExperimentConfig cfg = small_config();
  cfg.k = 0;
  cfg.noise = NoiseSpec::absolute(0.0);
  const TrialRecord rec = run_trial(cfg, 0);
  CHECK(rec.failed);
  CHECK(!rec.fail_reason.empty());
  CHECK(std::isnan(rec.metrics.re));

  SweepSpec spec;
  spec.cells = {cfg};
  const auto records = run_sweep(spec);
  CHECK(records.size() == 4);
  for (const auto& r : records) CHECK(r.failed);
}

TEST_CASE("solver cells share the same instance") {
  ExperimentConfig bayes_cfg = small_config();
  ExperimentConfig bp_cfg = small_config();
  bp_cfg.solver = SolverKind::bp;

  const TrialInstance a = make_instance(bayes_cfg, 101);
  const TrialInstance b = make_instance(bp_cfg, 101);
  CHECK(a.signal.values == b.signal.values);
  CHECK(a.noisy.values == b.noisy.values);
  CHECK(a.sigma == b.sigma);
  CHECK(to_dense(a.op) == to_dense(b.op));
}

TEST_CASE("snr mode derives sigma from the clean measurement energy") {
  ExperimentConfig cfg = small_config();
  cfg.noise = NoiseSpec::snr_db(20.0);
  const TrialInstance instance = make_instance(cfg, 5);
  const double rms = instance.clean.values.norm() / std::sqrt(double(cfg.m));
  CHECK(instance.sigma == doctest::Approx(rms * 0.1).epsilon(1e-12));
  CHECK(*instance.noisy.noise_sigma == instance.sigma);
}

TEST_CASE("sweep grids expand to the full cartesian product") {
  const std::string config = R"({
    "n": [50, 100, 200],
    "m": {"n_over": 4},
    "k": 2,
    "sigma": 0.05,
    "solver": ["bayes", "bp"],
    "trials": 50,
    "base_seed": 9
  })";
  const SweepSpec spec = sweep_from_json_text(config);
  CHECK(spec.cells.size() == 6);
  const auto records = run_sweep(spec);
  CHECK(records.size() == 300);
  CHECK(records[0].trial_seed == 9);
  CHECK(records[1].trial_seed == 10);
}

TEST_CASE("config validation fails loudly") {
  CHECK_THROWS_AS(sweep_from_json_text(R"({"n": []})"), InvalidConfigError);
  CHECK_THROWS_AS(sweep_from_json_text(R"({"n": 10, "k": 20})"), InvalidConfigError);
  CHECK_THROWS_AS(sweep_from_json_text(R"({"solver": "magic"})"), InvalidConfigError);
  CHECK_THROWS_AS(sweep_from_json_text("not json"), InvalidConfigError);
  CHECK_THROWS_AS(run_sweep(SweepSpec{}), InvalidConfigError);
}

TEST_CASE("aggregate reduces cells to summary statistics") {
  ExperimentConfig cfg = small_config();

  SUBCASE("a single row is its own summary") {
    TrialRecord rec;
    rec.config = cfg;
    rec.metrics.re = 0.25;
    rec.metrics.mse = 0.1;
    rec.metrics.cc = 0.9;
    rec.metrics.support_size = 3;
    const auto summary = aggregate({rec});
    for (const auto& row : summary) {
      if (row.metric == "re") {
        CHECK(row.mean == 0.25);
        CHECK(row.median == 0.25);
        CHECK(row.p05 == 0.25);
        CHECK(row.p95 == 0.25);
        CHECK(row.count == 1);
      }
    }
  }

  SUBCASE("two rows average as expected") {
    TrialRecord a, b;
    a.config = b.config = cfg;
    a.metrics.re = 0.0;
    b.metrics.re = 0.2;
    const auto summary = aggregate({a, b});
    for (const auto& row : summary) {
      if (row.metric == "re") {
        CHECK(row.mean == doctest::Approx(0.1));
        CHECK(row.median == doctest::Approx(0.1));
      }
    }
  }

  SUBCASE("an all-failure cell reports failure_rate one and no stats") {
    TrialRecord a;
    a.config = cfg;
    a.failed = true;
    a.metrics.re = std::numeric_limits<double>::quiet_NaN();
    const auto summary = aggregate({a, a});
    for (const auto& row : summary) {
      CHECK(row.failure_rate == 1.0);
      if (row.metric == "re") CHECK(!row.has_stats);
    }
  }
}

TEST_CASE("csv emission matches the exact schema and round-trips") {
  const std::string path = temp_path("cs_bench_trials.csv");

  SUBCASE("empty table emits the header only") {
    emit_trials_csv({}, path);
    const std::string text = read_file(path);
    CHECK(text ==
          "trial_seed,n,m,k,sigma,matrix,solver,re,mse,cc,support,ts_s,tr_s,tp_s,"
          "converged,failed\n");
  }

  SUBCASE("three rows produce a four-line file") {
    SweepSpec spec;
    ExperimentConfig cfg = small_config();
    cfg.trials = 3;
    spec.cells = {cfg};
    const auto records = run_sweep(spec);
    emit_trials_csv(records, path);
    const std::string text = read_file(path);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  }

  SUBCASE("emit then parse reproduces the table byte-for-byte") {
    SweepSpec spec;
    ExperimentConfig cfg = small_config();
    cfg.trials = 3;
    ExperimentConfig bp_cfg = cfg;
    bp_cfg.solver = SolverKind::bp;
    ExperimentConfig zero_cfg = cfg;  // produces failure rows
    zero_cfg.k = 0;
    zero_cfg.noise = NoiseSpec::absolute(0.0);
    spec.cells = {cfg, bp_cfg, zero_cfg};
    const auto records = run_sweep(spec);
    emit_trials_csv(records, path);
    const std::string first = read_file(path);
    const auto parsed = parse_trials_csv(path);
    const std::string second_path = temp_path("cs_bench_trials2.csv");
    emit_trials_csv(parsed, second_path);
    CHECK(read_file(second_path) == first);
    std::remove(second_path.c_str());
  }

  std::remove(path.c_str());
}

TEST_CASE("parallel execution reproduces the serial table") {
  SweepSpec spec;
  ExperimentConfig cfg = small_config();
  cfg.trials = 12;
  ExperimentConfig bp_cfg = cfg;
  bp_cfg.solver = SolverKind::bp;
  spec.cells = {cfg, bp_cfg};

  RunOptions serial;
  serial.workers = 1;
  RunOptions parallel;
  parallel.workers = 4;

  const std::string serial_path = temp_path("cs_bench_serial.csv");
  const std::string parallel_path = temp_path("cs_bench_parallel.csv");
  emit_trials_csv(run_sweep(spec, serial), serial_path);
  emit_trials_csv(run_sweep(spec, parallel), parallel_path);
  CHECK(mask_timing_columns(read_file(serial_path)) ==
        mask_timing_columns(read_file(parallel_path)));
  std::remove(serial_path.c_str());
  std::remove(parallel_path.c_str());
}

TEST_CASE("plotdata files carry one x column plus one column per series") {
  const std::string path = temp_path("cs_bench_plot.dat");
  write_plotdata(path, "n", {50, 100}, {{"a", {1.0, 2.0}}, {"b", {3.0, 4.0}}});
  const std::string text = read_file(path);
  CHECK(text == "# n a b\n50 1 3\n100 2 4\n");
  std::remove(path.c_str());
}

TEST_CASE("records assert tp bounds in successful trials") {
  const ExperimentConfig cfg = small_config();
  const TrialRecord rec = run_trial(cfg, 1);
  REQUIRE(!rec.failed);
  CHECK(rec.metrics.t_p >= rec.metrics.t_s);
  CHECK(rec.metrics.t_p >= rec.metrics.t_r);
  CHECK(rec.metrics.t_s >= 0.0);
}
