#ifndef CS_BENCH_HPP
#define CS_BENCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cs/metrics.hpp"
#include "cs/recon_bayes.hpp"
#include "cs/recon_bp.hpp"
#include "cs/sensing.hpp"
#include "cs/signals.hpp"

namespace cs {

enum class MatrixKind { circulant, dense_random };
enum class SolverKind { bayes, bp };

/// Noise level, either an absolute sigma or a per-trial measurement SNR in
/// dB (sigma = rms(clean) * 10^(-snr/20), deterministic given the seed).
struct NoiseSpec {
  enum class Mode { absolute, snr_db };
  Mode mode = Mode::absolute;
  double value = 0.0;

  static NoiseSpec absolute(double sigma) { return {Mode::absolute, sigma}; }
  static NoiseSpec snr_db(double db) { return {Mode::snr_db, db}; }
};

/// One experiment cell: every knob of the per-trial pipeline.
struct ExperimentConfig {
  int n = 200;
  int m = 80;
  int k = 15;
  NoiseSpec noise;
  MatrixKind matrix = MatrixKind::circulant;
  SolverKind solver = SolverKind::bayes;
  int trials = 100;
  std::uint64_t base_seed = 1;
  AmplitudeSpec amplitude;
  SeedDist seed_dist = SeedDist::gaussian;
  RowSelect row_select = RowSelect::random;
  BayesConfig bayes;
  BpConfig bp;
};

/// One experiment outcome row. Timing fields hold measured wall time and
/// are the only fields excluded from the determinism guarantee.
struct TrialRecord {
  ExperimentConfig config;       // cell echo
  std::uint64_t trial_seed = 0;  // base_seed + trial index
  double sigma = 0.0;            // realized noise sigma
  MetricReport metrics;
  int support_size_raw = 0;
  bool converged = false;
  bool failed = false;
  std::string fail_reason;
  bool parallel_timing = false;
};

/// The seeded per-trial problem instance, shared by every solver cell with
/// the same (n, m, k, noise, matrix, seed) so comparisons run on identical
/// data.
struct TrialInstance {
  SparseSignal signal;
  SensingOperator op;
  MeasurementVector clean;
  MeasurementVector noisy;
  double sigma = 0.0;
};

/// Deterministically builds the instance for (cfg, trial_seed); does not
/// depend on cfg.solver.
TrialInstance make_instance(const ExperimentConfig& cfg, std::uint64_t trial_seed);

/// Full pipeline: generate -> build operator -> apply (timed t_s) -> add
/// noise -> reconstruct (timed t_r) -> metrics, all timed as t_p. Solver
/// errors are captured as a failure row, never thrown.
TrialRecord run_trial(const ExperimentConfig& cfg, int trial_index);

/// A sweep is an explicit list of cells (built from config-file axis lists
/// or programmatically). Rows come out cell-major, trial-minor.
struct SweepSpec {
  std::vector<ExperimentConfig> cells;
};

struct RunOptions {
  int workers = 1;
  bool parallel_timing = false;  // when false, timed sections serialize
};

/// Executes cells x trials on a bounded worker pool; output order is
/// deterministic regardless of the worker count.
std::vector<TrialRecord> run_sweep(const SweepSpec& spec, const RunOptions& options = {});

/// Per-(cell, metric) summary statistics over the non-failed rows.
struct SummaryRow {
  int n = 0;
  int m = 0;
  int k = 0;
  std::string noise;  // configured noise spec, e.g. "0.05" or "snr20db"
  MatrixKind matrix = MatrixKind::circulant;
  SolverKind solver = SolverKind::bayes;
  std::string metric;  // re, mse, cc, support, ts_s, tr_s, tp_s
  bool has_stats = false;
  double mean = 0.0;
  double median = 0.0;
  double p05 = 0.0;
  double p95 = 0.0;
  int count = 0;
  int failures = 0;
  double failure_rate = 0.0;
};

std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& records);

/// Exact trial CSV schema:
/// trial_seed,n,m,k,sigma,matrix,solver,re,mse,cc,support,ts_s,tr_s,tp_s,converged,failed
void emit_trials_csv(const std::vector<TrialRecord>& records, const std::string& path);
std::vector<TrialRecord> parse_trials_csv(const std::string& path);

void emit_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);

/// Whitespace-separated plot data: x column followed by one column per
/// series; a single '#' header line names the columns.
struct PlotSeries {
  std::string name;
  std::vector<double> y;
};
void write_plotdata(const std::string& path, const std::string& x_name,
                    const std::vector<double>& x, const std::vector<PlotSeries>& series);

std::string to_string(MatrixKind kind);
std::string to_string(SolverKind kind);
std::string to_string(const NoiseSpec& noise);

/// Config-file (JSON) parsing; scalar fields may be lists (sweep axes) and
/// m additionally accepts {"n_over": d}. See README for the schema.
SweepSpec sweep_from_json_text(const std::string& text);
SweepSpec load_sweep(const std::string& path);

/// Canned paper-style reproductions. Each writes deterministic CSV /
/// plotdata artifacts plus a machine-specific *_timing.txt report into
/// out_dir, and checks its trend/ordering assertions.
struct FigResult {
  bool ok = false;
  std::string report;
};
FigResult run_fig6(const std::string& out_dir, std::uint64_t seed, const RunOptions& options = {});
FigResult run_fig7(const std::string& out_dir, std::uint64_t seed, const RunOptions& options = {});
FigResult run_table1(const std::string& out_dir, std::uint64_t seed, const RunOptions& options = {});

}  // namespace cs

#endif  // CS_BENCH_HPP
