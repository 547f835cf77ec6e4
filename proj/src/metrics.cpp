#include "binbo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace binbo::metrics
{
  AveragedTrace align_and_average(const std::vector<engine::RunTrace>& traces,
                                  const std::vector<std::int64_t>& grid)
  {
    AveragedTrace out;
    std::vector<const engine::RunTrace*> usable;
    for (const auto& t : traces)
    {
      if (t.failed)
      {
        ++out.n_failed;
        continue;
      }
      if (t.entries.empty())
        throw InvalidInput("align_and_average: trace without entries");
      usable.push_back(&t);
    }
    if (usable.empty())
      throw InvalidInput("align_and_average: no usable traces");
    out.problem = usable.front()->problem;
    out.solver = usable.front()->solver;
    for (const auto* t : usable)
      if (t->problem != out.problem || t->solver != out.solver)
        throw InvalidInput("align_and_average: traces mix problems or solvers");

    out.n_runs = static_cast<int>(usable.size());
    out.costs = grid;
    out.mean_regret.assign(grid.size(), 0.0);
    out.mean_best_fraction.assign(grid.size(), 0.0);
    for (const auto* t : usable)
    {
      const auto& e = t->entries;
      std::size_t k = 0;
      for (std::size_t g = 0; g < grid.size(); ++g)
      {
        if (g > 0 && grid[g] < grid[g - 1])
          throw InvalidInput("align_and_average: grid must be non-decreasing");
        if (grid[g] < e.front().cumulative_cost)
          throw InvalidInput("align_and_average: grid cost " + std::to_string(grid[g])
                             + " precedes the first trace entry");
        while (k + 1 < e.size() && e[k + 1].cumulative_cost <= grid[g])
          ++k;
        out.mean_regret[g] += e[k].true_value_at_incumbent;
        out.mean_best_fraction[g] += e[k].best_fraction;
      }
    }
    for (std::size_t g = 0; g < grid.size(); ++g)
    {
      out.mean_regret[g] /= out.n_runs;
      out.mean_best_fraction[g] /= out.n_runs;
    }
    return out;
  }

  std::vector<std::int64_t> cost_grid(std::int64_t first, std::int64_t last, int points)
  {
    if (last < first || points < 2)
      throw InvalidInput("cost_grid: need first <= last and at least two points");
    std::vector<std::int64_t> grid;
    for (int i = 0; i < points; ++i)
    {
      const auto c = first + (last - first) * i / (points - 1);
      if (grid.empty() || c != grid.back())
        grid.push_back(c);
    }
    return grid;
  }

  void DolanMoreTable::validate() const
  {
    if (t.rows() != static_cast<Eigen::Index>(problems.size())
        || t.cols() != static_cast<Eigen::Index>(solvers.size()))
      throw InvalidInput("DolanMoreTable: shape does not match labels");
    if (solvers.empty() || problems.empty())
      throw InvalidInput("DolanMoreTable: need at least one problem and one solver");
    if (!t.allFinite() || (t.array() < 0.0).any())
      throw InvalidInput("DolanMoreTable: entries must be finite and non-negative");
  }

  Matrix performance_ratios(const DolanMoreTable& table)
  {
    table.validate();
    Matrix r(table.t.rows(), table.t.cols());
    for (Eigen::Index p = 0; p < table.t.rows(); ++p)
    {
      const double best = table.t.row(p).minCoeff();
      r.row(p) = (table.t.row(p).array() + ratio_guard) / (best + ratio_guard);
    }
    return r;
  }

  double profile_value(const Matrix& ratios, Eigen::Index solver, double tau)
  {
    const auto n = ratios.rows();
    Eigen::Index count = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      count += ratios(p, solver) < tau ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(n);
  }

  std::vector<ProfileCurve> dolan_more(const DolanMoreTable& table, int log_points)
  {
    const Matrix r = performance_ratios(table);
    const double tau_max = std::max(r.maxCoeff(), 1.0) * 1.1;

    std::set<double> taus;
    const double log_max = std::log(tau_max);
    for (int i = 0; i < log_points; ++i)
      taus.insert(std::exp(log_max * i / (log_points - 1)));
    taus.insert(1.0);
    taus.insert(tau_max);
    for (Eigen::Index i = 0; i < r.size(); ++i)
    {
      const double v = r.data()[i];
      taus.insert(v);
      taus.insert(std::nextafter(v, std::numeric_limits<double>::infinity()));
    }

    std::vector<ProfileCurve> curves;
    for (Eigen::Index s = 0; s < r.cols(); ++s)
    {
      ProfileCurve c;
      c.solver = table.solvers[static_cast<std::size_t>(s)];
      c.taus.assign(taus.begin(), taus.end());
      c.rho.reserve(c.taus.size());
      for (double tau : c.taus)
        c.rho.push_back(profile_value(r, s, tau));
      curves.push_back(std::move(c));
    }
    return curves;
  }

  double true_regret(const benchmark::BenchmarkProblem& problem, const Vector& x)
  {
    return problem.probability(x);
  }
}
