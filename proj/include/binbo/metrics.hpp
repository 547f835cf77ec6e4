#pragma once

#include "binbo/benchmark.hpp"
#include "binbo/bo_engine.hpp"
#include "binbo/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace binbo::metrics
{
  /// Cross-seed average of a solver's traces on one problem, sampled on a
  /// cost grid by the last-entry-at-or-below rule.
  struct AveragedTrace
  {
    std::string problem;
    std::string solver;
    std::vector<std::int64_t> costs;
    std::vector<double> mean_regret;
    std::vector<double> mean_best_fraction;
    int n_runs = 0;
    int n_failed = 0;
  };

  /// Failed traces are skipped. Throws InvalidInput if nothing is left,
  /// if traces disagree on problem/solver, or if a grid cost precedes
  /// a trace's first entry.
  AveragedTrace align_and_average(const std::vector<engine::RunTrace>& traces,
                                  const std::vector<std::int64_t>& grid);

  /// Evenly spaced costs from `first` to `last` inclusive, about `points` of them.
  std::vector<std::int64_t> cost_grid(std::int64_t first, std::int64_t last, int points = 101);

  /// t(p, s): rows are problems, columns solvers.
  struct DolanMoreTable
  {
    std::vector<std::string> problems;
    std::vector<std::string> solvers;
    Matrix t;

    void validate() const;
  };

  struct ProfileCurve
  {
    std::string solver;
    std::vector<double> taus;
    std::vector<double> rho;
  };

  /// Added to numerator and denominator of each ratio so zero regrets
  /// are well defined and the per-problem winner keeps ratio exactly 1.
  inline constexpr double ratio_guard = 1e-12;

  /// r(p, s) = (t(p, s) + eps) / (min_s t(p, s) + eps).
  Matrix performance_ratios(const DolanMoreTable& table);

  /// rho_s(tau) = #{p : r(p, s) < tau} / #P (strict inequality).
  double profile_value(const Matrix& ratios, Eigen::Index solver, double tau);

  /*
   * Performance profiles on a tau grid covering [1, max r * 1.1]. The grid
   * is log-spaced and additionally contains every distinct ratio and the
   * next representable value above it, so each jump is resolved exactly.
   */
  std::vector<ProfileCurve> dolan_more(const DolanMoreTable& table, int log_points = 200);

  /// Noiseless rescaled objective at x; the regret, since the minimum is 0.
  double true_regret(const benchmark::BenchmarkProblem& problem, const Vector& x);
}
