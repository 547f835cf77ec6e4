#include "binbo/bo_engine.hpp"

#include "binbo/random.hpp"
#include "binbo/surrogate_binomial.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace binbo::engine
{
  namespace
  {
    constexpr double duplicate_radius = 1e-9;
  }

  std::string_view to_string(SolverKind kind)
  {
    switch (kind)
    {
    case SolverKind::gaussian_vanilla: return "gaussian_vanilla";
    case SolverKind::binomial_vanilla: return "binomial_vanilla";
    case SolverKind::binomial_multifidelity: return "binomial_multifidelity";
    }
    return "unknown";
  }

  std::optional<SolverKind> solver_kind_from_string(std::string_view name)
  {
    for (auto k : {SolverKind::gaussian_vanilla, SolverKind::binomial_vanilla,
                   SolverKind::binomial_multifidelity})
      if (to_string(k) == name)
        return k;
    return std::nullopt;
  }

  void SolverSpec::validate() const
  {
    if (name.empty())
      throw InvalidInput("SolverSpec: empty name");
    const bool mf = kind == SolverKind::binomial_multifidelity;
    if (mf != fidelity.has_value())
      throw InvalidInput("SolverSpec '" + name
                         + "': fidelity settings are required for, and only for, "
                           "binomial_multifidelity");
    if (fidelity)
    {
      if (fidelity->n_low < 1)
        throw InvalidInput("SolverSpec '" + name + "': n_low must be >= 1");
      if (!(fidelity->lambda > 0.0 && fidelity->lambda < 1.0))
        throw InvalidInput("SolverSpec '" + name + "': lambda must lie in (0, 1)");
    }
    acq.validate();
  }

  std::string SolverSpec::fingerprint() const
  {
    std::string s = fmt::format("{}|{}|mc={}|restarts={}|steps={}|acqseed={}|starts={}|polls={}",
                                name, to_string(kind), acq.mc_samples, acq.restarts,
                                acq.local_steps, acq.seed, hyper.starts, hyper.polls);
    if (fidelity)
      s += fmt::format("|n_low={}|lambda={:.17g}", fidelity->n_low, fidelity->lambda);
    return s;
  }

  SolverSpec make_solver(std::string name, SolverKind kind, double lambda, std::int64_t n_low)
  {
    SolverSpec s;
    s.name = std::move(name);
    s.kind = kind;
    if (kind == SolverKind::binomial_multifidelity)
      s.fidelity = fidelity::FidelityConfig{n_low, 2 * n_low, lambda};
    return s;
  }

  int Budget::resolved_init_points(int dim) const
  {
    return init_points > 0 ? init_points : std::max(5, 2 * dim);
  }

  std::vector<Vector> initial_design(int dim, int n, const Box& bounds, std::uint64_t seed)
  {
    if (n < 1)
      throw InvalidInput("initial_design: n must be >= 1");
    if (bounds.dim() != dim)
      throw InvalidInput("initial_design: bounds dimension mismatch");
    Rng rng(seed);
    std::vector<Vector> points(static_cast<std::size_t>(n), Vector(dim));
    std::vector<int> strata(static_cast<std::size_t>(n));
    for (int j = 0; j < dim; ++j)
    {
      std::iota(strata.begin(), strata.end(), 0);
      for (int i = n - 1; i > 0; --i)
        std::swap(strata[static_cast<std::size_t>(i)],
                  strata[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1))]);
      const double width = bounds.upper(j) - bounds.lower(j);
      for (int i = 0; i < n; ++i)
      {
        const double u = (strata[static_cast<std::size_t>(i)] + rng.uniform()) / n;
        points[static_cast<std::size_t>(i)](j) = std::min(bounds.lower(j) + u * width, bounds.upper(j));
      }
    }
    return points;
  }

  acquisition::Incumbent update_incumbent(const Dataset& data)
  {
    if (data.empty())
      throw StateError("update_incumbent: dataset is empty");
    acquisition::Incumbent inc;
    inc.y_min = data.points.front().fraction();
    inc.x_min = data.points.front().x;
    inc.index = 0;
    for (std::size_t i = 1; i < data.size(); ++i)
    {
      // Compare y_i/N_i < y_min exactly via cross-multiplication.
      const auto& p = data.points[i];
      const auto& best = data.points[inc.index];
      if (p.successes * best.trials < best.successes * p.trials)
      {
        inc.index = i;
        inc.y_min = p.fraction();
        inc.x_min = p.x;
      }
    }
    return inc;
  }

  std::string_view to_string(Stage stage)
  {
    switch (stage)
    {
    case Stage::init: return "init";
    case Stage::full: return "full";
    case Stage::low: return "low";
    case Stage::continued: return "continued";
    }
    return "unknown";
  }

  std::optional<Stage> stage_from_string(std::string_view name)
  {
    for (auto s : {Stage::init, Stage::full, Stage::low, Stage::continued})
      if (to_string(s) == name)
        return s;
    return std::nullopt;
  }

  namespace
  {
    class Runner
    {
    public:
      Runner(const benchmark::BenchmarkProblem& problem, const SolverSpec& solver,
             const Budget& budget, std::uint64_t seed)
        : problem_(problem), solver_(solver), budget_(budget), seed_(seed),
          data_(problem.dim),
          draws_(derive_seed(seed, problem.id(), solver.name, "draws")),
          hyper_bounds_(gaussian::HyperBounds::for_box(problem.bounds))
      {
        trace_.problem = problem.id();
        trace_.solver = solver.name;
        trace_.seed = seed;
      }

      RunTrace run()
      {
        solver_.validate();
        const std::int64_t n_high = problem_.trials_high;
        std::optional<fidelity::FidelityConfig> mf;
        if (solver_.fidelity)
        {
          mf = solver_.fidelity;
          mf->n_high = n_high;
          mf->validate();
        }
        const int n_init = budget_.resolved_init_points(problem_.dim);
        if (budget_.total_draws < static_cast<std::int64_t>(n_init) * n_high)
          throw InvalidInput(fmt::format("budget of {} draws cannot cover {} initial points at {} trials",
                                         budget_.total_draws, n_init, n_high));

        Rng init_draws(derive_seed(seed_, problem_.id(), "init-draws"));
        for (const auto& x : initial_design(problem_.dim, n_init, problem_.bounds,
                                            derive_seed(seed_, problem_.id(), "design")))
        {
          const auto y = benchmark::sample_binomial(problem_.probability(x), n_high, init_draws);
          record(0, Stage::init, x, y, n_high, n_high);
        }

        try
        {
          const std::int64_t cheapest = mf ? mf->n_low : n_high;
          for (int iteration = 1; cost_ + cheapest <= budget_.total_draws; ++iteration)
          {
            const Vector x = propose(iteration);
            const double p = problem_.probability(x);
            if (!mf)
            {
              const auto y = benchmark::sample_binomial(p, n_high, draws_);
              record(iteration, Stage::full, x, y, n_high, n_high);
              continue;
            }
            const auto y_low = benchmark::sample_binomial(p, mf->n_low, draws_);
            const bool affordable = cost_ + n_high <= budget_.total_draws;
            if (affordable && fidelity::decide_continue(y_low, *mf, incumbent_.y_min))
            {
              const auto y_top = benchmark::sample_binomial(p, n_high - mf->n_low, draws_);
              record(iteration, Stage::continued, x, y_low + y_top, n_high, n_high);
            }
            else
            {
              record(iteration, Stage::low, x, y_low, mf->n_low, mf->n_low);
            }
          }
        }
        catch (const NumericalError& e)
        {
          fail(e.what());
        }
        catch (const StateError& e)
        {
          fail(e.what());
        }
        return std::move(trace_);
      }

    private:
      void fail(const std::string& why)
      {
        trace_.failed = true;
        trace_.failure = why;
      }

      Vector propose(int iteration)
      {
        auto acq_cfg = solver_.acq;
        acq_cfg.seed = derive_seed(solver_.acq.seed ^ seed_, problem_.id(), solver_.name,
                                   fmt::format("acq-{}", iteration));
        auto hyper = solver_.hyper;
        hyper.seed = derive_seed(solver_.hyper.seed ^ seed_, problem_.id(), solver_.name,
                                 fmt::format("hyper-{}", iteration));
        const double y_min = incumbent_.y_min;

        if (solver_.kind == SolverKind::gaussian_vanilla)
        {
          const Vector targets = data_.fractions();
          const auto params = gaussian::fit_hyperparameters(data_, targets, hyper_bounds_, hyper, warm_);
          warm_ = params;
          const auto model = gaussian::GPModel::fit(data_, params, targets);
          return acquisition::optimize_acquisition(
            [&](const Vector& x) { return acquisition::ei_closed(model.predict(x), y_min); },
            problem_.bounds, acq_cfg);
        }

        const auto params = binomial::fit_hyperparameters(data_, hyper_bounds_, hyper, warm_);
        warm_ = params;
        const auto model = binomial::LaplaceModel::fit(data_, params);
        if (!model.converged())
          throw NumericalError(fmt::format(
            "iteration {}: Laplace mode search did not converge (gradient norm {:.3g})",
            iteration, model.gradient_norm()));
        const acquisition::MonteCarloEI ei(acq_cfg.mc_samples, acq_cfg.seed);
        return acquisition::optimize_acquisition(
          [&](const Vector& x) { return ei(model.predict_latent(x), y_min); },
          problem_.bounds, acq_cfg);
      }

      void record(int iteration, Stage stage, const Vector& x, std::int64_t successes,
                  std::int64_t trials, std::int64_t draws)
      {
        std::size_t index = data_.size();
        for (std::size_t i = 0; i < data_.size(); ++i)
          if ((data_.points[i].x - x).norm() <= duplicate_radius)
          {
            index = i;
            break;
          }
        if (index == data_.size())
          data_.add({x, successes, trials});
        else
        {
          auto& obs = data_.points[index];
          obs.successes += successes;
          obs.trials += trials;
        }
        const auto& obs = data_.points[index];
        cost_ += draws;

        EvaluationRecord rec;
        rec.iteration = iteration;
        rec.stage = stage;
        rec.x = x;
        rec.draws = draws;
        rec.successes = obs.successes;
        rec.trials = obs.trials;
        rec.point_index = index;
        rec.cumulative_cost = cost_;
        trace_.evaluations.push_back(rec);

        // Running best over evaluation results; ties keep the earlier one.
        const double fraction = obs.fraction();
        if (trace_.entries.empty() || fraction < incumbent_.y_min)
        {
          incumbent_.y_min = fraction;
          incumbent_.x_min = obs.x;
          incumbent_.index = index;
          incumbent_value_ = problem_.probability(obs.x);
        }
        trace_.entries.push_back({cost_, incumbent_.y_min, incumbent_value_});
      }

      const benchmark::BenchmarkProblem& problem_;
      const SolverSpec& solver_;
      Budget budget_;
      std::uint64_t seed_;
      Dataset data_;
      Rng draws_;
      gaussian::HyperBounds hyper_bounds_;
      std::optional<gaussian::KernelParams> warm_;
      acquisition::Incumbent incumbent_;
      double incumbent_value_ = 1.0;
      std::int64_t cost_ = 0;
      RunTrace trace_;
    };
  }

  RunTrace run_bo(const benchmark::BenchmarkProblem& problem, const SolverSpec& solver,
                  const Budget& budget, std::uint64_t seed)
  {
    return Runner(problem, solver, budget, seed).run();
  }
}
