#include "binbo/benchmark.hpp"

#include "binbo/search.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace binbo::benchmark
{
  namespace
  {
    constexpr double michalewicz_steepness = 10.0;
    constexpr double spot_check_tolerance = 1e-6;

    struct Named
    {
      FunctionId id;
      std::string_view name;
    };
    constexpr Named names[] = {
      {FunctionId::michalewicz, "michalewicz"},
      {FunctionId::rastrigin, "rastrigin"},
      {FunctionId::zakharov, "zakharov"},
      {FunctionId::styblinski_tang, "styblinski_tang"},
    };

    // Root of d/dx (x^4 - 16x^2 + 5x) = 4x^3 - 32x + 5 near -2.9035.
    double styblinski_tang_argmin()
    {
      double x = -2.9;
      for (int i = 0; i < 50; ++i)
        x -= (4.0 * x * x * x - 32.0 * x + 5.0) / (12.0 * x * x - 32.0);
      return x;
    }
  }

  std::string_view to_string(FunctionId id)
  {
    for (const auto& n : names)
      if (n.id == id)
        return n.name;
    throw InvalidInput("unknown function id");
  }

  std::optional<FunctionId> try_function_from_string(std::string_view name)
  {
    for (const auto& n : names)
      if (n.name == name)
        return n.id;
    return std::nullopt;
  }

  FunctionId function_from_string(std::string_view name)
  {
    if (auto id = try_function_from_string(name))
      return *id;
    throw InvalidInput("unknown function_id '" + std::string(name) + "'");
  }

  const std::vector<FunctionId>& all_functions()
  {
    static const std::vector<FunctionId> ids = {FunctionId::michalewicz, FunctionId::rastrigin,
                                                FunctionId::zakharov, FunctionId::styblinski_tang};
    return ids;
  }

  bool single_minimum(FunctionId id)
  {
    return id == FunctionId::zakharov || id == FunctionId::styblinski_tang;
  }

  Box standard_domain(FunctionId id, int dim)
  {
    if (dim < 1)
      throw InvalidInput("standard_domain: dim must be >= 1");
    switch (id)
    {
    case FunctionId::michalewicz: return Box::cube(dim, 0.0, std::numbers::pi);
    case FunctionId::rastrigin: return Box::cube(dim, -5.12, 5.12);
    case FunctionId::zakharov: return Box::cube(dim, -5.0, 10.0);
    case FunctionId::styblinski_tang: return Box::cube(dim, -5.0, 5.0);
    }
    throw InvalidInput("standard_domain: unknown function id");
  }

  double evaluate(FunctionId id, const Vector& x)
  {
    const auto d = x.size();
    double acc = 0.0;
    switch (id)
    {
    case FunctionId::michalewicz:
      for (Eigen::Index i = 0; i < d; ++i)
      {
        const double s = std::sin(static_cast<double>(i + 1) * x(i) * x(i) / std::numbers::pi);
        acc -= std::sin(x(i)) * std::pow(s, 2.0 * michalewicz_steepness);
      }
      return acc;
    case FunctionId::rastrigin:
      acc = 10.0 * static_cast<double>(d);
      for (Eigen::Index i = 0; i < d; ++i)
        acc += x(i) * x(i) - 10.0 * std::cos(2.0 * std::numbers::pi * x(i));
      return acc;
    case FunctionId::zakharov:
    {
      double weighted = 0.0;
      for (Eigen::Index i = 0; i < d; ++i)
      {
        acc += x(i) * x(i);
        weighted += 0.5 * static_cast<double>(i + 1) * x(i);
      }
      const double w2 = weighted * weighted;
      return acc + w2 + w2 * w2;
    }
    case FunctionId::styblinski_tang:
      for (Eigen::Index i = 0; i < d; ++i)
      {
        const double x2 = x(i) * x(i);
        acc += x2 * x2 - 16.0 * x2 + 5.0 * x(i);
      }
      return 0.5 * acc;
    }
    throw InvalidInput("evaluate: unknown function id");
  }

  double eval_raw(FunctionId id, const Vector& x)
  {
    if (!standard_domain(id, static_cast<int>(x.size())).contains(x))
      throw InvalidInput("eval_raw: point outside the domain of " + std::string(to_string(id)));
    return evaluate(id, x);
  }

  Extrema estimate_extrema(FunctionId id, int dim, std::uint64_t seed, int starts)
  {
    const Box box = standard_domain(id, dim);
    Extrema e;

    auto best_of = [&](double sign, std::string_view tag) {
      search::Halton halton(dim, derive_seed(seed, to_string(id), tag));
      std::vector<Vector> points;
      points.reserve(static_cast<std::size_t>(starts));
      for (int s = 0; s < starts; ++s)
        points.push_back(halton.next(box));
      auto objective = [&](const Vector& x) { return sign * evaluate(id, x); };
      auto best = search::multistart(objective, box, points, 200, 0.25);
      if (!best)
        throw NumericalError("estimate_extrema: search failed");
      return *best;
    };

    switch (id)
    {
    case FunctionId::rastrigin:
    case FunctionId::zakharov:
      e.argmin = Vector::Zero(dim);
      e.f_min = 0.0;
      break;
    case FunctionId::styblinski_tang:
      e.argmin = Vector::Constant(dim, styblinski_tang_argmin());
      e.f_min = evaluate(id, e.argmin);
      break;
    case FunctionId::michalewicz:
    {
      auto r = best_of(-1.0, "min");
      e.argmin = r.x;
      e.f_min = -r.value;
      break;
    }
    }
    auto r = best_of(1.0, "max");
    e.argmax = r.x;
    e.f_max = r.value;
    return e;
  }

  double rescale(double raw, double f_min, double f_max)
  {
    if (!(f_min < f_max))
      throw InvalidInput("rescale: need f_min < f_max");
    return std::clamp((raw - f_min) / (f_max - f_min), 0.0, 1.0);
  }

  std::string BenchmarkProblem::id() const
  {
    return std::string(to_string(function_id)) + "-" + std::to_string(dim);
  }

  double BenchmarkProblem::probability(const Vector& x) const
  {
    if (!bounds.contains(x))
      throw InvalidInput("problem " + id() + ": point outside bounds");
    return rescale(evaluate(function_id, x), f_min, f_max);
  }

  BenchmarkProblem make_problem(FunctionId id, int dim, double f_min, double f_max,
                                std::int64_t trials_high)
  {
    if (!(f_min < f_max))
      throw InvalidInput("make_problem: need f_min < f_max");
    if (trials_high < 1)
      throw InvalidInput("make_problem: trials_high must be >= 1");
    BenchmarkProblem p;
    p.function_id = id;
    p.dim = dim;
    p.bounds = standard_domain(id, dim);
    p.f_min = f_min;
    p.f_max = f_max;
    p.trials_high = trials_high;

    Rng rng(derive_seed(0, "spot-check", p.id()));
    double excess = 0.0;
    for (int s = 0; s < 10000; ++s)
    {
      Vector x(dim);
      for (int j = 0; j < dim; ++j)
        x(j) = rng.uniform(p.bounds.lower(j), p.bounds.upper(j));
      const double u = (evaluate(id, x) - f_min) / (f_max - f_min);
      excess = std::max({excess, -u, u - 1.0});
    }
    p.spot_check_excess = excess;
    return p;
  }

  std::int64_t sample_binomial(double p, std::int64_t trials, Rng& rng)
  {
    if (!(p >= 0.0 && p <= 1.0))
      throw InvalidInput("sample_binomial: p must lie in [0, 1]");
    if (trials < 1)
      throw InvalidInput("sample_binomial: trials must be >= 1");
    std::int64_t successes = 0;
    for (std::int64_t k = 0; k < trials; ++k)
      successes += rng.uniform() < p ? 1 : 0;
    return successes;
  }

  // --- problem-definition file ---

  namespace
  {
    using nlohmann::json;

    std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

    Vector from_std(const std::vector<double>& v)
    {
      return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
  }

  ProblemRegistry ProblemRegistry::load(const std::filesystem::path& path)
  {
    std::ifstream in(path);
    if (!in)
      throw IoError("cannot open problem-definition file " + path.string());
    json doc;
    try
    {
      doc = json::parse(in);
    }
    catch (const json::exception& e)
    {
      throw InvalidInput("problem-definition file " + path.string() + ": " + e.what());
    }
    ProblemRegistry reg;
    for (const auto& row : doc.at("problems"))
    {
      ProblemDefinition def{
        function_from_string(row.at("function_id").get<std::string>()),
        row.at("dim").get<int>(),
        Box(from_std(row.at("lower").get<std::vector<double>>()),
            from_std(row.at("upper").get<std::vector<double>>())),
        row.at("f_min").get<double>(),
        row.at("f_max").get<double>(),
        row.at("trials").get<std::int64_t>()};
      if (def.bounds.dim() != def.dim)
        throw InvalidInput("problem-definition file: bounds length differs from dim for "
                           + std::string(to_string(def.function_id)));
      reg.upsert(std::move(def));
    }
    return reg;
  }

  std::filesystem::path ProblemRegistry::default_path()
  {
    if (const char* env = std::getenv("BINBO_PROBLEMS"))
      return env;
    return std::filesystem::path(BINBO_DATA_DIR) / "problems.json";
  }

  ProblemRegistry ProblemRegistry::load_default()
  {
    const auto path = default_path();
    if (!std::filesystem::exists(path))
      return {};
    return load(path);
  }

  void ProblemRegistry::save(const std::filesystem::path& path) const
  {
    json doc;
    doc["format"] = "binbo-problems/1";
    doc["problems"] = json::array();
    for (const auto& d : entries_)
    {
      doc["problems"].push_back({{"function_id", to_string(d.function_id)},
                                 {"dim", d.dim},
                                 {"lower", to_std(d.bounds.lower)},
                                 {"upper", to_std(d.bounds.upper)},
                                 {"f_min", d.f_min},
                                 {"f_max", d.f_max},
                                 {"trials", d.trials}});
    }
    std::ofstream out(path);
    if (!out)
      throw IoError("cannot write problem-definition file " + path.string());
    out << doc.dump(2) << '\n';
  }

  const ProblemDefinition* ProblemRegistry::find(FunctionId id, int dim) const
  {
    for (const auto& d : entries_)
      if (d.function_id == id && d.dim == dim)
        return &d;
    return nullptr;
  }

  void ProblemRegistry::upsert(ProblemDefinition def)
  {
    for (auto& d : entries_)
      if (d.function_id == def.function_id && d.dim == def.dim)
      {
        d = std::move(def);
        return;
      }
    entries_.push_back(std::move(def));
    std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
      return std::pair(to_string(a.function_id), a.dim) < std::pair(to_string(b.function_id), b.dim);
    });
  }

  BenchmarkProblem ProblemRegistry::problem(FunctionId id, int dim, std::int64_t trials_high) const
  {
    if (const auto* d = find(id, dim))
      return make_problem(id, dim, d->f_min, d->f_max, trials_high);
    const auto e = estimate_extrema(id, dim);
    return make_problem(id, dim, e.f_min, e.f_max, trials_high);
  }

  ProblemDefinition regenerate_definition(FunctionId id, int dim, std::int64_t trials,
                                          std::uint64_t seed)
  {
    const auto e = estimate_extrema(id, dim, seed);
    return {id, dim, standard_domain(id, dim), e.f_min, e.f_max, trials};
  }
}
