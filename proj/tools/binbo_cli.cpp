// Command-line front end: run experiments, rebuild reports, regenerate
// problem extrema, verify output directories.

#include "binbo/benchmark.hpp"
#include "binbo/config.hpp"
#include "binbo/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>

namespace
{
  using namespace binbo;

  int guarded(const std::function<int()>& body)
  {
    try
    {
      return body();
    }
    catch (const cli::ConfigError& e)
    {
      std::cerr << e.what() << '\n';
      return cli::exit_validation;
    }
    catch (const IoError& e)
    {
      std::cerr << "I/O error: " << e.what() << '\n';
      return cli::exit_io;
    }
    catch (const std::filesystem::filesystem_error& e)
    {
      std::cerr << "I/O error: " << e.what() << '\n';
      return cli::exit_io;
    }
    catch (const InvalidInput& e)
    {
      std::cerr << "invalid input: " << e.what() << '\n';
      return cli::exit_validation;
    }
  }
}

int main(int argc, char** argv)
{
  CLI::App app{"Bayesian optimization benchmark runner for binomial targets"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Execute every run of an experiment config, then write reports");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  bool quiet = false;
  run->add_flag("-q,--quiet", quiet, "Suppress per-run progress lines");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Rebuild CSV tables and SVG plots from stored traces");
  report->add_option("output_dir", report_dir)->required();

  std::string function_name;
  int dim = 0;
  std::string problems_path = benchmark::ProblemRegistry::default_path().string();
  std::uint64_t extrema_seed = 0;
  std::int64_t trials = 70;
  auto* regen = app.add_subcommand("regen-extrema", "Re-estimate f_min/f_max and update the problem-definition file");
  regen->add_option("function_id", function_name)->required();
  regen->add_option("dim", dim)->required()->check(CLI::Range(1, 32));
  regen->add_option("--problems", problems_path, "Problem-definition file to update");
  regen->add_option("--seed", extrema_seed, "Seed for the multistart search");
  regen->add_option("--trials", trials, "Default trial count stored with the entry");

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "Check plots, CSVs, traces and logs for consistency");
  verify->add_option("output_dir", verify_dir)->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_validation;
  }

  if (*run)
    return guarded([&] {
      const auto cfg = cli::load_config(config_path);
      cli::RunSummary summary;
      const int status = cli::run_experiment(cfg, quiet ? nullptr : &std::cerr, &summary);
      std::cout << fmt::format("runs executed: {}, reused: {}, failed: {}\noutput: {}\n",
                               summary.executed, summary.skipped, summary.failed,
                               cfg.output_dir.string());
      return status;
    });

  if (*report)
    return guarded([&] {
      for (const auto& path : cli::emit_reports(report_dir))
        std::cout << path.string() << '\n';
      return static_cast<int>(cli::exit_ok);
    });

  if (*regen)
    return guarded([&] {
      const auto id = benchmark::function_from_string(function_name);
      auto registry = std::filesystem::exists(problems_path)
        ? benchmark::ProblemRegistry::load(problems_path)
        : benchmark::ProblemRegistry{};
      const auto def = benchmark::regenerate_definition(id, dim, trials, extrema_seed);
      registry.upsert(def);
      registry.save(problems_path);
      std::cout << fmt::format("{}-{}: f_min = {}, f_max = {} -> {}\n", function_name, dim,
                               def.f_min, def.f_max, problems_path);
      return static_cast<int>(cli::exit_ok);
    });

  if (*verify)
    return guarded([&] {
      const auto issues = cli::verify(verify_dir);
      for (const auto& issue : issues)
        std::cout << "MISMATCH " << issue << '\n';
      if (issues.empty())
        std::cout << "ok\n";
      return issues.empty() ? static_cast<int>(cli::exit_ok) : static_cast<int>(cli::exit_validation);
    });
  return cli::exit_validation;
}
