#pragma once

#include "binbo/acquisition.hpp"
#include "binbo/benchmark.hpp"
#include "binbo/fidelity.hpp"
#include "binbo/surrogate_gaussian.hpp"
#include "binbo/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace binbo::engine
{
  enum class SolverKind
  {
    gaussian_vanilla,
    binomial_vanilla,
    binomial_multifidelity
  };

  std::string_view to_string(SolverKind kind);
  std::optional<SolverKind> solver_kind_from_string(std::string_view name);

  struct SolverSpec
  {
    std::string name;
    SolverKind kind = SolverKind::binomial_vanilla;
    /// Present iff kind is binomial_multifidelity. n_high is taken from the
    /// problem's trials_high at run time; n_low and lambda from here.
    std::optional<fidelity::FidelityConfig> fidelity;
    acquisition::AcquisitionConfig acq;
    gaussian::HyperSearch hyper;

    void validate() const;
    /// Canonical text used for run hashing.
    std::string fingerprint() const;
  };

  SolverSpec make_solver(std::string name, SolverKind kind, double lambda = 0.5,
                         std::int64_t n_low = 35);

  struct Budget
  {
    std::int64_t total_draws = 10000;
    /// 0 selects the default max(5, 2 dim).
    int init_points = 0;

    int resolved_init_points(int dim) const;
  };

  /// Seeded Latin-hypercube design: one point per stratum on every axis.
  std::vector<Vector> initial_design(int dim, int n, const Box& bounds, std::uint64_t seed);

  /// Minimal success fraction over the dataset; ties go to the earliest.
  acquisition::Incumbent update_incumbent(const Dataset& data);

  enum class Stage
  {
    init,   ///< initial design, full fidelity
    full,   ///< single-fidelity proposal at n_high
    low,    ///< multifidelity proposal stopped after n_low
    continued  ///< multifidelity proposal topped up to n_high
  };
  std::string_view to_string(Stage stage);
  std::optional<Stage> stage_from_string(std::string_view name);

  /// One row of the raw observation log.
  struct EvaluationRecord
  {
    int iteration = 0;
    Stage stage = Stage::init;
    Vector x;
    /// Bernoulli draws charged for this evaluation.
    std::int64_t draws = 0;
    /// State of the dataset observation this evaluation landed in (after
    /// merging with a duplicate point, if any).
    std::int64_t successes = 0;
    std::int64_t trials = 0;
    std::size_t point_index = 0;
    std::int64_t cumulative_cost = 0;
  };

  struct TraceEntry
  {
    std::int64_t cumulative_cost = 0;
    double best_fraction = 1.0;
    double true_value_at_incumbent = 1.0;
  };

  struct RunTrace
  {
    std::string problem;
    std::string solver;
    std::uint64_t seed = 0;
    std::vector<TraceEntry> entries;
    std::vector<EvaluationRecord> evaluations;
    bool failed = false;
    std::string failure;
  };

  /*
   * Runs one BO loop on a benchmark problem.
   *
   * The initial design and its draws depend only on (seed, problem), so all
   * solvers sharing a seed start from the same data. Proposal draws use a
   * stream derived from (seed, problem, solver). Surrogate failures do not
   * throw: the returned trace is marked failed with the diagnostic.
   */
  RunTrace run_bo(const benchmark::BenchmarkProblem& problem, const SolverSpec& solver,
                  const Budget& budget, std::uint64_t seed);
}
