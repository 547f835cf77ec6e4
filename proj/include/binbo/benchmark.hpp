#pragma once

#include "binbo/random.hpp"
#include "binbo/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace binbo::benchmark
{
  enum class FunctionId
  {
    michalewicz,
    rastrigin,
    zakharov,
    styblinski_tang
  };

  std::string_view to_string(FunctionId id);
  FunctionId function_from_string(std::string_view name);
  std::optional<FunctionId> try_function_from_string(std::string_view name);
  const std::vector<FunctionId>& all_functions();

  /// True for the functions with a single global minimum and no other
  /// local minima of note (Zakharov, Styblinski-Tang).
  bool single_minimum(FunctionId id);

  /// Standard domain: Michalewicz [0, pi]^d, Rastrigin [-5.12, 5.12]^d,
  /// Zakharov [-5, 10]^d, Styblinski-Tang [-5, 5]^d.
  Box standard_domain(FunctionId id, int dim);

  /// Raw test-function value, no range check.
  double evaluate(FunctionId id, const Vector& x);

  /// Raw value with the domain check; throws InvalidInput outside it.
  double eval_raw(FunctionId id, const Vector& x);

  struct Extrema
  {
    double f_min = 0.0;
    double f_max = 1.0;
    Vector argmin;
    Vector argmax;
  };

  /// Analytic minimum where known (Rastrigin, Zakharov, Styblinski-Tang);
  /// otherwise, and always for the maximum, 1000 seeded multistart
  /// pattern searches.
  Extrema estimate_extrema(FunctionId id, int dim, std::uint64_t seed = 0, int starts = 1000);

  /// (raw - f_min) / (f_max - f_min), clamped to [0, 1].
  double rescale(double raw, double f_min, double f_max);

  struct BenchmarkProblem
  {
    FunctionId function_id = FunctionId::zakharov;
    int dim = 5;
    Box bounds;
    double f_min = 0.0;
    double f_max = 1.0;
    std::int64_t trials_high = 70;
    /// Largest excursion outside [0, 1] seen by the construction-time check.
    double spot_check_excess = 0.0;

    std::string id() const;

    /// Rescaled success probability; throws outside the bounds.
    double probability(const Vector& x) const;
  };

  /// Builds a problem and runs the 10^4-point range spot check.
  BenchmarkProblem make_problem(FunctionId id, int dim, double f_min, double f_max,
                                std::int64_t trials_high = 70);

  /// Exact binomial draw as a sum of Bernoulli trials.
  std::int64_t sample_binomial(double p, std::int64_t trials, Rng& rng);

  /// One row of the problem-definition file.
  struct ProblemDefinition
  {
    FunctionId function_id;
    int dim;
    Box bounds;
    double f_min;
    double f_max;
    std::int64_t trials;
  };

  /// The checked-in problem-definition file (JSON, see data/README.md).
  class ProblemRegistry
  {
  public:
    static ProblemRegistry load(const std::filesystem::path& path);
    static ProblemRegistry load_default();
    static std::filesystem::path default_path();
    void save(const std::filesystem::path& path) const;

    const ProblemDefinition* find(FunctionId id, int dim) const;
    void upsert(ProblemDefinition def);
    const std::vector<ProblemDefinition>& entries() const { return entries_; }

    /// Problem from the stored extrema; computes them if absent.
    BenchmarkProblem problem(FunctionId id, int dim, std::int64_t trials_high) const;

  private:
    std::vector<ProblemDefinition> entries_;
  };

  ProblemDefinition regenerate_definition(FunctionId id, int dim, std::int64_t trials = 70,
                                          std::uint64_t seed = 0);
}
