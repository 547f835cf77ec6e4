#pragma once

#include "binbo/benchmark.hpp"
#include "binbo/bo_engine.hpp"
#include "binbo/errors.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace binbo::cli
{
  struct ProblemEntry
  {
    benchmark::FunctionId function_id = benchmark::FunctionId::zakharov;
    int dim = 5;
    std::int64_t trials_high = 70;
  };

  struct ExperimentConfig
  {
    std::vector<ProblemEntry> problems;
    std::vector<engine::SolverSpec> solvers;
    engine::Budget budget;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path output_dir;
    int parallelism = 1;
    /// Points on the cost grid used for averaging.
    int grid_points = 101;
  };

  struct FieldError
  {
    std::string path;
    std::string message;
  };

  /// Every validation problem found in a config document.
  class ConfigError : public InvalidInput
  {
  public:
    explicit ConfigError(std::vector<FieldError> errors);
    const std::vector<FieldError>& errors() const { return errors_; }

  private:
    std::vector<FieldError> errors_;
  };

  /// Parses and validates a JSON experiment config (grammar in
  /// docs/formats.md). Relative output_dir values are resolved against
  /// `base_dir`. Parallelism 0 means the number of hardware threads, and
  /// the BINBO_PARALLELISM environment variable overrides the file.
  ExperimentConfig parse_config(std::string_view text,
                                const std::filesystem::path& base_dir = {});

  ExperimentConfig load_config(const std::filesystem::path& path);
}
