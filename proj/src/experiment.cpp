#include "binbo/experiment.hpp"

#include "binbo/csv.hpp"
#include "binbo/random.hpp"
#include "binbo/svg.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace binbo::cli
{
  using nlohmann::json;
  namespace fs = std::filesystem;

  namespace
  {
    std::string problem_id(const ProblemEntry& p)
    {
      return std::string(benchmark::to_string(p.function_id)) + "-" + std::to_string(p.dim);
    }

    std::string sanitize(std::string s)
    {
      for (auto& c : s)
        if (c == ',' || c == '\n' || c == '\r')
          c = c == ',' ? ';' : ' ';
      return s;
    }

    json read_json(const fs::path& path)
    {
      std::ifstream in(path);
      if (!in)
        throw IoError("cannot open " + path.string());
      try
      {
        return json::parse(in);
      }
      catch (const json::exception& e)
      {
        throw IoError(path.string() + ": " + e.what());
      }
    }

    void write_text(const fs::path& path, const std::string& text)
    {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out)
        throw IoError("cannot write " + path.string());
      out << text;
      if (!out)
        throw IoError("write failed for " + path.string());
    }

    std::string read_text(const fs::path& path)
    {
      std::ifstream in(path, std::ios::binary);
      if (!in)
        throw IoError("cannot open " + path.string());
      std::stringstream buf;
      buf << in.rdbuf();
      return buf.str();
    }

    std::int64_t to_int(const std::string& s) { return std::stoll(s); }
    double to_double(const std::string& s) { return std::stod(s); }
  }

  std::string run_key(const ProblemEntry& problem, const engine::SolverSpec& solver,
                      const engine::Budget& budget, std::uint64_t seed)
  {
    const auto text = fmt::format("{}|trials={}|{}|draws={}|init={}|seed={}|{}", problem_id(problem),
                                  problem.trials_high, solver.fingerprint(), budget.total_draws,
                                  budget.init_points, seed, code_version);
    return fmt::format("{:016x}", stable_hash(text));
  }

  std::string run_stem(const std::string& problem, const std::string& solver, std::uint64_t seed)
  {
    return fmt::format("{}__{}__s{}", problem, solver, seed);
  }

  csv::Table trace_table(const engine::RunTrace& trace)
  {
    csv::Table t;
    t.header = {"problem", "solver", "seed", "cumulative_cost", "best_fraction", "true_value_at_incumbent"};
    for (const auto& e : trace.entries)
      t.rows.push_back({trace.problem, trace.solver, std::to_string(trace.seed),
                        std::to_string(e.cumulative_cost), csv::format_double(e.best_fraction),
                        csv::format_double(e.true_value_at_incumbent)});
    return t;
  }

  csv::Table observation_log_table(const engine::RunTrace& trace, int dim)
  {
    csv::Table t;
    t.header = {"problem", "solver", "seed", "iteration", "stage"};
    for (int j = 0; j < dim; ++j)
      t.header.push_back("x" + std::to_string(j));
    for (const char* c : {"draws", "successes", "trials", "point_index", "cumulative_cost"})
      t.header.emplace_back(c);
    for (const auto& r : trace.evaluations)
    {
      std::vector<std::string> row = {trace.problem, trace.solver, std::to_string(trace.seed),
                                      std::to_string(r.iteration), std::string(engine::to_string(r.stage))};
      for (int j = 0; j < dim; ++j)
        row.push_back(csv::format_double(r.x(j)));
      row.push_back(std::to_string(r.draws));
      row.push_back(std::to_string(r.successes));
      row.push_back(std::to_string(r.trials));
      row.push_back(std::to_string(r.point_index));
      row.push_back(std::to_string(r.cumulative_cost));
      t.rows.push_back(std::move(row));
    }
    return t;
  }

  engine::RunTrace read_trace(const fs::path& path)
  {
    const auto t = csv::read(path);
    engine::RunTrace trace;
    const auto cp = t.column("problem"), cs = t.column("solver"), cseed = t.column("seed");
    const auto cc = t.column("cumulative_cost"), cb = t.column("best_fraction"),
               cv = t.column("true_value_at_incumbent");
    for (const auto& row : t.rows)
    {
      trace.problem = row[cp];
      trace.solver = row[cs];
      trace.seed = std::stoull(row[cseed]);
      trace.entries.push_back({to_int(row[cc]), to_double(row[cb]), to_double(row[cv])});
    }
    return trace;
  }

  std::vector<engine::EvaluationRecord> read_observation_log(const fs::path& path)
  {
    const auto t = csv::read(path);
    int dim = 0;
    while (std::find(t.header.begin(), t.header.end(), "x" + std::to_string(dim)) != t.header.end())
      ++dim;
    std::vector<engine::EvaluationRecord> out;
    for (const auto& row : t.rows)
    {
      engine::EvaluationRecord r;
      r.iteration = static_cast<int>(to_int(row[t.column("iteration")]));
      const auto stage = engine::stage_from_string(row[t.column("stage")]);
      if (!stage)
        throw IoError(path.string() + ": unknown stage '" + row[t.column("stage")] + "'");
      r.stage = *stage;
      r.x.resize(dim);
      for (int j = 0; j < dim; ++j)
        r.x(j) = to_double(row[t.column("x" + std::to_string(j))]);
      r.draws = to_int(row[t.column("draws")]);
      r.successes = to_int(row[t.column("successes")]);
      r.trials = to_int(row[t.column("trials")]);
      r.point_index = static_cast<std::size_t>(to_int(row[t.column("point_index")]));
      r.cumulative_cost = to_int(row[t.column("cumulative_cost")]);
      out.push_back(std::move(r));
    }
    return out;
  }

  namespace
  {
    struct PlannedRun
    {
      std::size_t problem;
      std::size_t solver;
      std::uint64_t seed;
      std::string key;
      std::string stem;
    };

    struct RunStatus
    {
      bool done = false;
      bool failed = false;
      std::string failure;
    };

    json manifest_header(const ExperimentConfig& cfg)
    {
      json m;
      m["code_version"] = code_version;
      m["budget"] = {{"total_draws", cfg.budget.total_draws}, {"init_points", cfg.budget.init_points}};
      m["grid_points"] = cfg.grid_points;
      m["problems"] = json::array();
      for (const auto& p : cfg.problems)
        m["problems"].push_back({{"id", problem_id(p)},
                                 {"function_id", benchmark::to_string(p.function_id)},
                                 {"dim", p.dim},
                                 {"trials_high", p.trials_high}});
      m["solvers"] = json::array();
      for (const auto& s : cfg.solvers)
        m["solvers"].push_back({{"name", s.name}, {"kind", engine::to_string(s.kind)}});
      m["seeds"] = cfg.seeds;
      return m;
    }
  }

  int run_experiment(const ExperimentConfig& cfg, std::ostream* progress, RunSummary* summary)
  {
    std::error_code ec;
    fs::create_directories(cfg.output_dir / "runs", ec);
    if (ec)
      throw IoError("cannot create " + (cfg.output_dir / "runs").string() + ": " + ec.message());

    const auto manifest_path = cfg.output_dir / "manifest.json";
    std::map<std::string, json> previous;
    if (fs::exists(manifest_path))
      for (const auto& r : read_json(manifest_path).value("runs", json::array()))
        previous[r.at("key").get<std::string>()] = r;

    const auto registry = benchmark::ProblemRegistry::load_default();
    std::vector<benchmark::BenchmarkProblem> problems;
    for (const auto& p : cfg.problems)
      problems.push_back(registry.problem(p.function_id, p.dim, p.trials_high));

    std::vector<PlannedRun> plan;
    for (std::size_t p = 0; p < cfg.problems.size(); ++p)
      for (std::size_t s = 0; s < cfg.solvers.size(); ++s)
        for (auto seed : cfg.seeds)
          plan.push_back({p, s, seed, run_key(cfg.problems[p], cfg.solvers[s], cfg.budget, seed),
                          run_stem(problems[p].id(), cfg.solvers[s].name, seed)});

    std::vector<RunStatus> status(plan.size());
    std::vector<std::size_t> todo;
    RunSummary local;
    for (std::size_t i = 0; i < plan.size(); ++i)
    {
      auto it = previous.find(plan[i].key);
      const auto dir = cfg.output_dir / "runs";
      if (it != previous.end() && fs::exists(dir / (plan[i].stem + ".trace.csv"))
          && fs::exists(dir / (plan[i].stem + ".log.csv")))
      {
        status[i] = {true, it->second.value("status", "ok") == "failed",
                     it->second.value("failure", "")};
        ++local.skipped;
      }
      else
        todo.push_back(i);
    }

    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;
    std::exception_ptr io_failure;
    auto worker = [&] {
      for (;;)
      {
        const auto k = next.fetch_add(1);
        if (k >= todo.size())
          return;
        const auto& run = plan[todo[k]];
        const auto& problem = problems[run.problem];
        auto trace = engine::run_bo(problem, cfg.solvers[run.solver], cfg.budget, run.seed);
        try
        {
          const auto dir = cfg.output_dir / "runs";
          csv::write(dir / (run.stem + ".log.csv"), observation_log_table(trace, problem.dim));
          csv::write(dir / (run.stem + ".trace.csv"), trace_table(trace));
        }
        catch (...)
        {
          std::scoped_lock lock(progress_mutex);
          if (!io_failure)
            io_failure = std::current_exception();
          return;
        }
        status[todo[k]] = {true, trace.failed, trace.failure};
        if (progress)
        {
          std::scoped_lock lock(progress_mutex);
          *progress << fmt::format("[{}/{}] {} {}\n", k + 1, todo.size(), run.stem,
                                   trace.failed ? "FAILED: " + trace.failure : "ok");
          progress->flush();
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      const auto threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.parallelism), todo.size());
      for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    }
    if (io_failure)
      std::rethrow_exception(io_failure);

    json manifest = manifest_header(cfg);
    manifest["runs"] = json::array();
    for (std::size_t i = 0; i < plan.size(); ++i)
    {
      const auto& run = plan[i];
      local.failed += status[i].failed ? 1 : 0;
      manifest["runs"].push_back({{"key", run.key},
                                  {"problem", problems[run.problem].id()},
                                  {"solver", cfg.solvers[run.solver].name},
                                  {"seed", run.seed},
                                  {"status", status[i].failed ? "failed" : "ok"},
                                  {"failure", status[i].failure},
                                  {"trace", "runs/" + run.stem + ".trace.csv"},
                                  {"log", "runs/" + run.stem + ".log.csv"}});
    }
    local.executed = static_cast<int>(todo.size());
    write_text(manifest_path, manifest.dump(2) + "\n");
    emit_reports(cfg.output_dir);
    if (summary)
      *summary = local;
    return local.failed > 0 ? exit_partial_failure : exit_ok;
  }

  namespace
  {
    struct Loaded
    {
      json manifest;
      std::vector<std::string> problems;
      std::vector<std::string> solvers;
      std::map<std::string, benchmark::FunctionId> function_of;
      std::map<std::pair<std::string, std::string>, std::vector<engine::RunTrace>> traces;
      std::vector<std::vector<std::string>> failures;
      std::int64_t total_draws = 0;
      int grid_points = 101;
    };

    Loaded load_runs(const fs::path& dir)
    {
      Loaded L;
      const auto manifest_path = dir / "manifest.json";
      if (!fs::exists(manifest_path))
        throw IoError("no manifest.json in " + dir.string() + "; nothing has been run there");
      L.manifest = read_json(manifest_path);
      L.total_draws = L.manifest.at("budget").at("total_draws").get<std::int64_t>();
      L.grid_points = L.manifest.value("grid_points", 101);
      for (const auto& p : L.manifest.at("problems"))
      {
        L.problems.push_back(p.at("id").get<std::string>());
        L.function_of[L.problems.back()] =
          benchmark::function_from_string(p.at("function_id").get<std::string>());
      }
      for (const auto& s : L.manifest.at("solvers"))
        L.solvers.push_back(s.at("name").get<std::string>());

      std::vector<std::string> missing;
      for (const auto& r : L.manifest.at("runs"))
      {
        const auto path = dir / r.at("trace").get<std::string>();
        if (!fs::exists(path))
        {
          missing.push_back(fs::path(r.at("trace").get<std::string>()).stem().stem().string());
          continue;
        }
        auto trace = read_trace(path);
        trace.problem = r.at("problem").get<std::string>();
        trace.solver = r.at("solver").get<std::string>();
        trace.seed = r.at("seed").get<std::uint64_t>();
        trace.failed = r.value("status", "ok") == "failed";
        trace.failure = r.value("failure", "");
        if (trace.failed)
          L.failures.push_back({trace.problem, trace.solver, std::to_string(trace.seed),
                                sanitize(trace.failure)});
        L.traces[{trace.problem, trace.solver}].push_back(std::move(trace));
      }
      if (!missing.empty())
      {
        std::string msg = "missing trace files for runs:";
        for (const auto& m : missing)
          msg += " " + m;
        throw IoError(msg);
      }
      return L;
    }

    std::vector<std::int64_t> grid_for(const Loaded& L, const std::string& problem)
    {
      std::int64_t first = 0;
      for (const auto& solver : L.solvers)
      {
        auto it = L.traces.find({problem, solver});
        if (it == L.traces.end())
          continue;
        for (const auto& t : it->second)
          if (!t.failed && !t.entries.empty())
            first = std::max(first, t.entries.front().cumulative_cost);
      }
      return metrics::cost_grid(first, std::max(first, L.total_draws), L.grid_points);
    }

    struct Reports
    {
      csv::Table averaged;
      csv::Table final_regret;
      csv::Table table;
      csv::Table curves;
      std::map<std::string, svg::Chart> regret_charts;
      std::map<std::string, svg::Chart> profile_charts;
    };

    Reports compute_reports(const Loaded& L)
    {
      Reports R;
      R.averaged.header = {"problem", "solver", "cost", "mean_regret", "n_runs"};
      R.final_regret.header = {"problem", "solver", "seed", "final_cost", "final_regret", "status"};
      R.table.header = {"group", "problem", "solver", "t"};
      R.curves.header = {"group", "solver", "tau", "rho"};

      std::map<std::pair<std::string, std::string>, double> t_value;
      for (const auto& problem : L.problems)
      {
        const auto grid = grid_for(L, problem);
        svg::Chart chart;
        chart.title = "Regret on " + problem;
        chart.x_label = "cumulative Bernoulli draws";
        chart.y_label = "mean true regret at incumbent";
        chart.steps = true;
        for (const auto& solver : L.solvers)
        {
          auto it = L.traces.find({problem, solver});
          if (it == L.traces.end())
            continue;
          for (const auto& t : it->second)
            R.final_regret.rows.push_back(
              {problem, solver, std::to_string(t.seed),
               t.entries.empty() ? "0" : std::to_string(t.entries.back().cumulative_cost),
               t.entries.empty() ? "nan" : csv::format_double(t.entries.back().true_value_at_incumbent),
               t.failed ? "failed" : "ok"});
          bool any_ok = false;
          for (const auto& t : it->second)
            any_ok = any_ok || !t.failed;
          if (!any_ok)
            continue;
          const auto avg = metrics::align_and_average(it->second, grid);
          svg::Series series{solver, {}, {}};
          for (std::size_t g = 0; g < avg.costs.size(); ++g)
          {
            R.averaged.rows.push_back({problem, solver, std::to_string(avg.costs[g]),
                                       csv::format_double(avg.mean_regret[g]),
                                       std::to_string(avg.n_runs)});
            series.x.push_back(static_cast<double>(avg.costs[g]));
            series.y.push_back(avg.mean_regret[g]);
          }
          chart.series.push_back(std::move(series));
          t_value[{problem, solver}] = avg.mean_regret.back();
        }
        R.regret_charts[problem] = std::move(chart);
      }

      for (const auto& [group, single] : {std::pair{"single_minimum", true}, std::pair{"multi_minimum", false}})
      {
        metrics::DolanMoreTable table;
        for (const auto& problem : L.problems)
        {
          if (benchmark::single_minimum(L.function_of.at(problem)) != single)
            continue;
          bool complete = true;
          for (const auto& solver : L.solvers)
            complete = complete && t_value.count({problem, solver});
          if (complete)
            table.problems.push_back(problem);
        }
        if (table.problems.empty())
          continue;
        table.solvers = L.solvers;
        table.t.resize(static_cast<Eigen::Index>(table.problems.size()),
                       static_cast<Eigen::Index>(table.solvers.size()));
        for (std::size_t p = 0; p < table.problems.size(); ++p)
          for (std::size_t s = 0; s < table.solvers.size(); ++s)
          {
            const double v = t_value.at({table.problems[p], table.solvers[s]});
            table.t(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(s)) = v;
            R.table.rows.push_back({group, table.problems[p], table.solvers[s], csv::format_double(v)});
          }
        svg::Chart chart;
        chart.title = std::string("Dolan-More profiles (") + group + ")";
        chart.x_label = "tau";
        chart.y_label = "fraction of problems with ratio < tau";
        chart.steps = true;
        chart.log_x = true;
        for (const auto& curve : metrics::dolan_more(table))
        {
          svg::Series series{curve.solver, curve.taus, curve.rho};
          for (std::size_t i = 0; i < curve.taus.size(); ++i)
            R.curves.rows.push_back({group, curve.solver, csv::format_double(curve.taus[i]),
                                     csv::format_double(curve.rho[i])});
          chart.series.push_back(std::move(series));
        }
        R.profile_charts[group] = std::move(chart);
      }
      return R;
    }
  }

  std::vector<fs::path> emit_reports(const fs::path& output_dir)
  {
    const auto L = load_runs(output_dir);
    const auto R = compute_reports(L);
    std::vector<fs::path> written;
    std::error_code ec;
    fs::create_directories(output_dir / "plots", ec);
    if (ec)
      throw IoError("cannot create " + (output_dir / "plots").string());

    auto put_csv = [&](const fs::path& name, const csv::Table& t) {
      csv::write(output_dir / name, t);
      written.push_back(output_dir / name);
    };
    put_csv("averaged.csv", R.averaged);
    put_csv("final_regret.csv", R.final_regret);
    put_csv("dolan_more_table.csv", R.table);
    put_csv("dolan_more.csv", R.curves);
    csv::Table failures;
    failures.header = {"problem", "solver", "seed", "message"};
    failures.rows = L.failures;
    put_csv("failures.csv", failures);

    for (const auto& [problem, chart] : R.regret_charts)
    {
      const auto path = output_dir / "plots" / ("regret_" + problem + ".svg");
      write_text(path, svg::render(chart));
      written.push_back(path);
    }
    for (const auto& [group, chart] : R.profile_charts)
    {
      const auto path = output_dir / "plots" / ("dolan_more_" + group + ".svg");
      write_text(path, svg::render(chart));
      written.push_back(path);
    }
    return written;
  }

  std::vector<std::string> verify(const fs::path& output_dir)
  {
    std::vector<std::string> issues;
    const auto L = load_runs(output_dir);
    const auto R = compute_reports(L);

    // CSVs on disk must equal a fresh metrics computation, byte for byte.
    for (const auto& [name, table] : {std::pair{"averaged.csv", &R.averaged},
                                      std::pair{"dolan_more_table.csv", &R.table},
                                      std::pair{"dolan_more.csv", &R.curves},
                                      std::pair{"final_regret.csv", &R.final_regret}})
    {
      const auto path = output_dir / name;
      if (!fs::exists(path))
        issues.push_back(std::string(name) + " is missing");
      else if (read_text(path) != csv::to_string(*table))
        issues.push_back(std::string(name) + " differs from the metrics recomputed from traces");
    }

    // Every plotted value must come from a CSV row.
    auto check_chart = [&](const fs::path& path, const std::vector<svg::Series>& expected) {
      if (!fs::exists(path))
      {
        issues.push_back(path.filename().string() + " is missing");
        return;
      }
      const auto plotted = svg::read_series(read_text(path));
      if (plotted.size() != expected.size())
      {
        issues.push_back(path.filename().string() + ": series count differs from CSV");
        return;
      }
      for (std::size_t i = 0; i < plotted.size(); ++i)
        if (plotted[i].label != expected[i].label || plotted[i].x != expected[i].x
            || plotted[i].y != expected[i].y)
          issues.push_back(path.filename().string() + ": series '" + plotted[i].label
                           + "' differs from CSV rows");
    };

    const auto averaged = csv::read(output_dir / "averaged.csv");
    for (const auto& problem : L.problems)
    {
      std::vector<svg::Series> expected;
      for (const auto& row : averaged.rows)
      {
        if (row[0] != problem)
          continue;
        if (expected.empty() || expected.back().label != row[1])
          expected.push_back({row[1], {}, {}});
        expected.back().x.push_back(to_double(row[2]));
        expected.back().y.push_back(to_double(row[3]));
      }
      check_chart(output_dir / "plots" / ("regret_" + problem + ".svg"), expected);
    }
    const auto curves = csv::read(output_dir / "dolan_more.csv");
    std::set<std::string> groups;
    for (const auto& row : curves.rows)
      groups.insert(row[0]);
    for (const auto& group : groups)
    {
      std::vector<svg::Series> expected;
      for (const auto& row : curves.rows)
      {
        if (row[0] != group)
          continue;
        if (expected.empty() || expected.back().label != row[1])
          expected.push_back({row[1], {}, {}});
        expected.back().x.push_back(to_double(row[2]));
        expected.back().y.push_back(to_double(row[3]));
      }
      check_chart(output_dir / "plots" / ("dolan_more_" + group + ".svg"), expected);
    }

    // Traces must replay from the raw observation logs.
    for (const auto& r : L.manifest.at("runs"))
    {
      const auto stem = fs::path(r.at("log").get<std::string>()).stem().stem().string();
      const auto log = read_observation_log(output_dir / r.at("log").get<std::string>());
      const auto trace = read_trace(output_dir / r.at("trace").get<std::string>());
      if (log.size() != trace.entries.size())
      {
        issues.push_back(stem + ": log and trace lengths differ");
        continue;
      }
      std::int64_t cost = 0;
      double best = 1.0;
      for (std::size_t i = 0; i < log.size(); ++i)
      {
        cost += log[i].draws;
        const double f = static_cast<double>(log[i].successes) / static_cast<double>(log[i].trials);
        best = i == 0 ? f : std::min(best, f);
        if (log[i].cumulative_cost != cost || trace.entries[i].cumulative_cost != cost)
          issues.push_back(fmt::format("{}: cumulative cost mismatch at row {}", stem, i));
        if (trace.entries[i].best_fraction != best)
          issues.push_back(fmt::format("{}: best_fraction is not the running minimum at row {}", stem, i));
      }
      if (cost > L.total_draws)
        issues.push_back(stem + ": spent more than the budget");
    }
    return issues;
  }
}
