#include "binbo/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace binbo::cli
{
  using nlohmann::json;

  namespace
  {
    std::string join_errors(const std::vector<FieldError>& errors)
    {
      std::string s = "invalid experiment config:";
      for (const auto& e : errors)
        s += "\n  " + e.path + ": " + e.message;
      return s;
    }

    bool valid_name(const std::string& name)
    {
      return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
      });
    }

    class Reader
    {
    public:
      std::vector<FieldError> errors;

      void error(const std::string& path, const std::string& message)
      {
        errors.push_back({path, message});
      }

      template <typename T>
      T get(const json& obj, const std::string& key, const std::string& path, T fallback)
      {
        if (!obj.is_object() || !obj.contains(key))
          return fallback;
        try
        {
          return obj.at(key).get<T>();
        }
        catch (const json::exception&)
        {
          error(path + "." + key, "has the wrong type");
          return fallback;
        }
      }

      void check_keys(const json& obj, const std::string& path,
                      std::initializer_list<std::string_view> allowed)
      {
        if (!obj.is_object())
        {
          error(path, "must be an object");
          return;
        }
        for (const auto& [key, value] : obj.items())
          if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            error(path + "." + key, "unknown field");
      }
    };

    acquisition::AcquisitionConfig read_acquisition(Reader& r, const json& obj, const std::string& path,
                                                    acquisition::AcquisitionConfig cfg)
    {
      r.check_keys(obj, path, {"mc_samples", "restarts", "local_steps", "seed"});
      cfg.mc_samples = r.get<int>(obj, "mc_samples", path, cfg.mc_samples);
      cfg.restarts = r.get<int>(obj, "restarts", path, cfg.restarts);
      cfg.local_steps = r.get<int>(obj, "local_steps", path, cfg.local_steps);
      cfg.seed = r.get<std::uint64_t>(obj, "seed", path, cfg.seed);
      if (cfg.mc_samples < 64)
        r.error(path + ".mc_samples", "must be >= 64");
      if (cfg.restarts < 1)
        r.error(path + ".restarts", "must be >= 1");
      if (cfg.local_steps < 1)
        r.error(path + ".local_steps", "must be >= 1");
      return cfg;
    }

    gaussian::HyperSearch read_hyper(Reader& r, const json& obj, const std::string& path,
                                     gaussian::HyperSearch h)
    {
      r.check_keys(obj, path, {"starts", "polls", "seed"});
      h.starts = r.get<int>(obj, "starts", path, h.starts);
      h.polls = r.get<int>(obj, "polls", path, h.polls);
      h.seed = r.get<std::uint64_t>(obj, "seed", path, h.seed);
      if (h.starts < 1)
        r.error(path + ".starts", "must be >= 1");
      if (h.polls < 1)
        r.error(path + ".polls", "must be >= 1");
      return h;
    }
  }

  ConfigError::ConfigError(std::vector<FieldError> errors)
    : InvalidInput(join_errors(errors)), errors_(std::move(errors))
  {
  }

  ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir)
  {
    json doc;
    try
    {
      doc = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
      throw ConfigError({{"$", std::string("not valid JSON: ") + e.what()}});
    }

    Reader r;
    ExperimentConfig cfg;
    r.check_keys(doc, "$", {"problems", "solvers", "budget", "seeds", "output_dir", "parallelism",
                            "acquisition", "hyperparameters", "grid_points"});
    if (!doc.is_object())
      throw ConfigError(std::move(r.errors));

    // problems
    if (!doc.contains("problems") || !doc["problems"].is_array() || doc["problems"].empty())
      r.error("$.problems", "must be a non-empty array");
    else
    {
      std::set<std::string> seen;
      for (std::size_t i = 0; i < doc["problems"].size(); ++i)
      {
        const auto& p = doc["problems"][i];
        const std::string path = "$.problems[" + std::to_string(i) + "]";
        r.check_keys(p, path, {"function_id", "dim", "trials_high"});
        ProblemEntry e;
        const auto name = r.get<std::string>(p, "function_id", path, "");
        if (auto id = benchmark::try_function_from_string(name))
          e.function_id = *id;
        else
          r.error(path + ".function_id", name.empty() ? "is required" : "unknown function_id '" + name + "'");
        e.dim = r.get<int>(p, "dim", path, 5);
        e.trials_high = r.get<std::int64_t>(p, "trials_high", path, 70);
        if (e.dim < 1 || e.dim > 32)
          r.error(path + ".dim", "must lie in [1, 32]");
        if (e.trials_high < 2)
          r.error(path + ".trials_high", "must be >= 2");
        const auto key = name + "-" + std::to_string(e.dim);
        if (!seen.insert(key).second)
          r.error(path, "duplicate problem " + key);
        cfg.problems.push_back(e);
      }
    }

    // shared search defaults
    acquisition::AcquisitionConfig acq_defaults;
    if (doc.contains("acquisition"))
      acq_defaults = read_acquisition(r, doc["acquisition"], "$.acquisition", acq_defaults);
    gaussian::HyperSearch hyper_defaults;
    if (doc.contains("hyperparameters"))
      hyper_defaults = read_hyper(r, doc["hyperparameters"], "$.hyperparameters", hyper_defaults);

    // solvers
    if (!doc.contains("solvers") || !doc["solvers"].is_array() || doc["solvers"].empty())
      r.error("$.solvers", "must be a non-empty array");
    else
    {
      std::set<std::string> names;
      for (std::size_t i = 0; i < doc["solvers"].size(); ++i)
      {
        const auto& s = doc["solvers"][i];
        const std::string path = "$.solvers[" + std::to_string(i) + "]";
        r.check_keys(s, path, {"name", "kind", "lambda", "n_low", "acquisition", "hyperparameters"});
        engine::SolverSpec spec;
        spec.name = r.get<std::string>(s, "name", path, "");
        if (!valid_name(spec.name))
          r.error(path + ".name", "must be non-empty and use only [A-Za-z0-9_.-]");
        else if (!names.insert(spec.name).second)
          r.error(path + ".name", "duplicate solver name '" + spec.name + "'");

        const auto kind = r.get<std::string>(s, "kind", path, "");
        if (auto k = engine::solver_kind_from_string(kind))
          spec.kind = *k;
        else
          r.error(path + ".kind", kind.empty() ? "is required" : "unknown solver kind '" + kind + "'");

        const bool mf = spec.kind == engine::SolverKind::binomial_multifidelity;
        if (mf)
        {
          fidelity::FidelityConfig f;
          f.lambda = r.get<double>(s, "lambda", path, 0.5);
          f.n_low = r.get<std::int64_t>(s, "n_low", path, 35);
          if (!(f.lambda > 0.0 && f.lambda < 1.0))
            r.error(path + ".lambda", "must lie in the open interval (0, 1)");
          if (f.n_low < 1)
            r.error(path + ".n_low", "must be >= 1");
          for (std::size_t p = 0; p < cfg.problems.size(); ++p)
            if (f.n_low >= cfg.problems[p].trials_high)
              r.error(path + ".n_low", "n_low (" + std::to_string(f.n_low)
                                         + ") must be < n_high = trials_high ("
                                         + std::to_string(cfg.problems[p].trials_high)
                                         + ") of $.problems[" + std::to_string(p) + "]");
          f.n_high = 2 * f.n_low;
          spec.fidelity = f;
        }
        else
        {
          if (s.is_object() && s.contains("lambda"))
            r.error(path + ".lambda", "only allowed for binomial_multifidelity");
          if (s.is_object() && s.contains("n_low"))
            r.error(path + ".n_low", "only allowed for binomial_multifidelity");
        }
        spec.acq = acq_defaults;
        if (s.is_object() && s.contains("acquisition"))
          spec.acq = read_acquisition(r, s["acquisition"], path + ".acquisition", acq_defaults);
        spec.hyper = hyper_defaults;
        if (s.is_object() && s.contains("hyperparameters"))
          spec.hyper = read_hyper(r, s["hyperparameters"], path + ".hyperparameters", hyper_defaults);
        cfg.solvers.push_back(std::move(spec));
      }
    }

    // budget
    if (doc.contains("budget"))
    {
      const auto& b = doc["budget"];
      r.check_keys(b, "$.budget", {"total_draws", "init_points"});
      cfg.budget.total_draws = r.get<std::int64_t>(b, "total_draws", "$.budget", cfg.budget.total_draws);
      cfg.budget.init_points = r.get<int>(b, "init_points", "$.budget", 0);
      if (cfg.budget.init_points < 0)
        r.error("$.budget.init_points", "must be >= 0 (0 selects max(5, 2 dim))");
    }
    if (cfg.budget.total_draws < 1)
      r.error("$.budget.total_draws", "must be positive");
    for (std::size_t p = 0; p < cfg.problems.size(); ++p)
    {
      const auto& e = cfg.problems[p];
      const auto need = static_cast<std::int64_t>(cfg.budget.resolved_init_points(e.dim)) * e.trials_high;
      if (cfg.budget.total_draws < need)
        r.error("$.budget.total_draws", "must cover the initial design of $.problems["
                                          + std::to_string(p) + "] (" + std::to_string(need) + " draws)");
    }

    // seeds: explicit list or {"first": a, "count": n}
    if (!doc.contains("seeds"))
      r.error("$.seeds", "is required");
    else if (doc["seeds"].is_array())
    {
      for (std::size_t i = 0; i < doc["seeds"].size(); ++i)
      {
        if (doc["seeds"][i].is_number_unsigned())
          cfg.seeds.push_back(doc["seeds"][i].get<std::uint64_t>());
        else
          r.error("$.seeds[" + std::to_string(i) + "]", "must be a non-negative integer");
      }
      if (doc["seeds"].empty())
        r.error("$.seeds", "must not be empty");
      std::set<std::uint64_t> uniq(cfg.seeds.begin(), cfg.seeds.end());
      if (uniq.size() != cfg.seeds.size())
        r.error("$.seeds", "contains duplicates");
    }
    else if (doc["seeds"].is_object())
    {
      const auto& s = doc["seeds"];
      r.check_keys(s, "$.seeds", {"first", "count"});
      const auto first = r.get<std::uint64_t>(s, "first", "$.seeds", 1);
      const auto count = r.get<int>(s, "count", "$.seeds", 0);
      if (count < 1)
        r.error("$.seeds.count", "must be >= 1");
      for (int i = 0; i < count; ++i)
        cfg.seeds.push_back(first + static_cast<std::uint64_t>(i));
    }
    else
      r.error("$.seeds", "must be an array or {first, count}");

    // output
    const auto out = r.get<std::string>(doc, "output_dir", "$", "");
    if (out.empty())
      r.error("$.output_dir", "is required");
    else
    {
      cfg.output_dir = out;
      if (cfg.output_dir.is_relative() && !base_dir.empty())
        cfg.output_dir = base_dir / cfg.output_dir;
    }

    cfg.grid_points = r.get<int>(doc, "grid_points", "$", cfg.grid_points);
    if (cfg.grid_points < 2)
      r.error("$.grid_points", "must be >= 2");

    int parallelism = r.get<int>(doc, "parallelism", "$", 0);
    if (parallelism < 0)
      r.error("$.parallelism", "must be >= 0 (0 means all hardware threads)");
    if (const char* env = std::getenv("BINBO_PARALLELISM"))
    {
      try
      {
        parallelism = std::stoi(env);
      }
      catch (const std::exception&)
      {
        r.error("BINBO_PARALLELISM", "must be an integer");
      }
    }
    if (parallelism <= 0)
      parallelism = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    cfg.parallelism = parallelism;

    if (!r.errors.empty())
      throw ConfigError(std::move(r.errors));
    return cfg;
  }

  ExperimentConfig load_config(const std::filesystem::path& path)
  {
    std::ifstream in(path);
    if (!in)
      throw IoError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
  }
}
