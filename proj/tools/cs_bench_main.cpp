#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "cs/bench.hpp"
#include "cs/errors.hpp"

namespace {

// Run manifest: echoes the effective configuration next to the CSV output.
void write_run_manifest(const std::string& dir, const std::string& config_path,
                        std::uint64_t seed, const cs::RunOptions& options,
                        std::size_t cells, std::size_t rows) {
  nlohmann::json j;
  j["config_file"] = config_path;
  j["base_seed"] = seed;
  j["workers"] = options.workers;
  j["parallel_timing"] = options.parallel_timing;
  j["cells"] = cells;
  j["rows"] = rows;
  std::ofstream file(dir + "/run_meta.json");
  if (!file) throw cs::IoError("cannot open for writing", dir + "/run_meta.json");
  file << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cs-bench: compressive-sensing benchmark driver.\n"
      "Timing columns: ts_s = sampling (operator application), tr_s = signal\n"
      "recovery, tp_s = sampling + recovery + metric computation measured\n"
      "independently (so tp >= max(ts, tr) but not necessarily ts + tr)."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 1;
  bool parallel_timing = false;

  auto* run = app.add_subcommand("run", "Run the sweep described by a config file");
  run->add_option("--config", config_path, "JSON sweep config")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override base_seed")->each([&](const std::string&) {
    seed_given = true;
  });
  run->add_option("--workers", workers, "Worker threads (default 1)");
  run->add_flag("--parallel-timing", parallel_timing,
                "Allow timed sections to overlap across trials (flags records)");

  std::string which;
  std::uint64_t fig_seed = 1;
  auto* figs = app.add_subcommand("figs", "Canned comparison sweeps");
  figs->add_option("--which", which, "One of fig6, fig7, table1")->required();
  figs->add_option("--out", out_dir, "Output directory")->required();
  figs->add_option("--seed", fig_seed, "Base seed (default 1)");
  figs->add_option("--workers", workers, "Worker threads (default 1)");
  figs->add_flag("--parallel-timing", parallel_timing,
                 "Allow timed sections to overlap across trials");

  CLI11_PARSE(app, argc, argv);

  try {
    cs::RunOptions options;
    options.workers = workers;
    options.parallel_timing = parallel_timing;

    if (run->parsed()) {
      cs::SweepSpec spec = cs::load_sweep(config_path);
      if (seed_given) {
        for (auto& cell : spec.cells) cell.base_seed = seed;
      }
      std::filesystem::create_directories(out_dir);
      const auto records = cs::run_sweep(spec, options);
      cs::emit_trials_csv(records, out_dir + "/trials.csv");
      cs::emit_summary_csv(cs::aggregate(records), out_dir + "/summary.csv");
      write_run_manifest(out_dir, config_path,
                         seed_given ? seed : spec.cells.front().base_seed, options,
                         spec.cells.size(), records.size());
      std::cout << "wrote " << records.size() << " rows to " << out_dir
                << "/trials.csv\n";
      return 0;
    }

    cs::FigResult result;
    if (which == "fig6") {
      result = cs::run_fig6(out_dir, fig_seed, options);
    } else if (which == "fig7") {
      result = cs::run_fig7(out_dir, fig_seed, options);
    } else if (which == "table1") {
      result = cs::run_table1(out_dir, fig_seed, options);
    } else {
      std::cerr << "unknown figure '" << which << "' (expected fig6, fig7, table1)\n";
      return 2;
    }
    std::cout << result.report;
    return result.ok ? 0 : 1;
  } catch (const cs::Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
}
