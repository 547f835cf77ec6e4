#pragma once

#include "binbo/bo_engine.hpp"
#include "binbo/config.hpp"
#include "binbo/csv.hpp"
#include "binbo/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace binbo::cli
{
  /// Process exit codes of the command-line tool.
  enum ExitCode : int
  {
    exit_ok = 0,
    exit_validation = 1,
    exit_partial_failure = 2,
    exit_io = 3
  };

  inline constexpr std::string_view code_version = "binbo-1";

  /// Key of a run in the manifest: hash of problem, solver, budget, seed
  /// and the code version tag, as 16 hex digits.
  std::string run_key(const ProblemEntry& problem, const engine::SolverSpec& solver,
                      const engine::Budget& budget, std::uint64_t seed);

  std::string run_stem(const std::string& problem, const std::string& solver, std::uint64_t seed);

  // --- per-run files ---
  csv::Table trace_table(const engine::RunTrace& trace);
  csv::Table observation_log_table(const engine::RunTrace& trace, int dim);
  engine::RunTrace read_trace(const std::filesystem::path& path);
  std::vector<engine::EvaluationRecord> read_observation_log(const std::filesystem::path& path);

  struct RunSummary
  {
    int executed = 0;
    int skipped = 0;
    int failed = 0;
  };

  /*
   * Executes every (problem x solver x seed) run not already recorded in
   * output_dir/manifest.json, then writes the manifest and the reports.
   * Returns exit_ok, or exit_partial_failure if any run failed. I/O
   * problems surface as IoError.
   */
  int run_experiment(const ExperimentConfig& cfg, std::ostream* progress = nullptr,
                     RunSummary* summary = nullptr);

  /// Regenerates averaged.csv, final_regret.csv, dolan_more*.csv,
  /// failures.csv and plots/*.svg from the manifest and trace files.
  std::vector<std::filesystem::path> emit_reports(const std::filesystem::path& output_dir);

  /// Cross-checks SVG series against CSV rows, CSV rows against a fresh
  /// metrics computation from the traces, and traces against the raw
  /// observation logs. Returns the list of discrepancies (empty = ok).
  std::vector<std::string> verify(const std::filesystem::path& output_dir);
}
