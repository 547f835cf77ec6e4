#include "binbo/metrics.hpp"
#include "binbo/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace binbo;
using namespace binbo::metrics;

namespace
{
  engine::RunTrace make_trace(std::vector<std::pair<std::int64_t, double>> pts, bool failed = false)
  {
    engine::RunTrace t;
    t.problem = "p";
    t.solver = "s";
    t.failed = failed;
    for (auto [c, v] : pts)
      t.entries.push_back({c, v, v});
    return t;
  }

  // rho computed straight from the definition
  double counting_oracle(const Matrix& t, int s, double tau)
  {
    int hits = 0;
    for (int p = 0; p < t.rows(); ++p)
    {
      double best = t(p, 0);
      for (int k = 1; k < t.cols(); ++k)
        best = std::min(best, t(p, k));
      if ((t(p, s) + 1e-12) / (best + 1e-12) < tau)
        ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(t.rows());
  }

  double curve_at(const ProfileCurve& c, double tau)
  {
    for (std::size_t i = 0; i < c.taus.size(); ++i)
      if (c.taus[i] == tau)
        return c.rho[i];
    FAIL("tau missing from the grid");
    return -1;
  }
}

TEST_CASE("align_and_average examples")
{
  const auto one = make_trace({{10, 0.9}, {30, 0.5}});
  const auto avg = align_and_average({one}, {10, 20, 30, 40});
  CHECK(avg.mean_regret == std::vector<double>{0.9, 0.9, 0.5, 0.5});
  CHECK(avg.n_runs == 1);

  const auto a = make_trace({{5, 0.2}});
  const auto b = make_trace({{5, 0.4}});
  const auto ab = align_and_average({a, b}, {5, 50});
  CHECK(ab.mean_regret[0] == doctest::Approx(0.3));
  CHECK(ab.mean_regret[1] == doctest::Approx(0.3));

  CHECK(align_and_average({one}, {20}).mean_regret[0] == 0.9);
}

TEST_CASE("align_and_average error paths and failed runs")
{
  CHECK_THROWS_AS(align_and_average({}, {1}), InvalidInput);
  CHECK_THROWS_AS(align_and_average({make_trace({{1, 0.1}}, true)}, {1}), InvalidInput);
  CHECK_THROWS_AS(align_and_average({make_trace({{10, 0.1}})}, {5}), InvalidInput);
  auto other = make_trace({{1, 0.1}});
  other.solver = "t";
  CHECK_THROWS_AS(align_and_average({make_trace({{1, 0.1}}), other}, {1}), InvalidInput);

  const auto avg = align_and_average({make_trace({{1, 0.2}}), make_trace({{1, 0.9}}, true)}, {1});
  CHECK(avg.n_runs == 1);
  CHECK(avg.n_failed == 1);
  CHECK(avg.mean_regret[0] == 0.2);
}

TEST_CASE("averaged best fraction is non-increasing")
{
  Rng rng(4);
  std::vector<engine::RunTrace> traces;
  for (int r = 0; r < 5; ++r)
  {
    engine::RunTrace t = make_trace({});
    std::int64_t c = 0;
    double best = 1.0;
    for (int i = 0; i < 30; ++i)
    {
      c += 35 + 35 * static_cast<std::int64_t>(rng.below(2));
      best = std::min(best, rng.uniform());
      t.entries.push_back({c, best, rng.uniform()});
    }
    traces.push_back(t);
  }
  const auto avg = align_and_average(traces, cost_grid(70, 1000, 50));
  for (std::size_t i = 1; i < avg.costs.size(); ++i)
  {
    CHECK(avg.costs[i] > avg.costs[i - 1]);
    CHECK(avg.mean_best_fraction[i] <= avg.mean_best_fraction[i - 1]);
  }
}

TEST_CASE("cost grid")
{
  const auto g = cost_grid(350, 10000, 101);
  CHECK(g.front() == 350);
  CHECK(g.back() == 10000);
  for (std::size_t i = 1; i < g.size(); ++i)
    CHECK(g[i] > g[i - 1]);
  CHECK(cost_grid(5, 5).size() == 1);
}

TEST_CASE("single-solver profile")
{
  DolanMoreTable t{{"a", "b", "c"}, {"only"}, Eigen::Vector3d(0.3, 0.0, 1.0)};
  const auto curves = dolan_more(t);
  REQUIRE(curves.size() == 1);
  CHECK(curve_at(curves[0], 1.0) == 0.0);
  for (std::size_t i = 0; i < curves[0].taus.size(); ++i)
    if (curves[0].taus[i] > 1.0)
      CHECK(curves[0].rho[i] == 1.0);
}

TEST_CASE("symmetric two-by-two profile")
{
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  DolanMoreTable t{{"p1", "p2"}, {"s1", "s2"}, m};
  const auto r = performance_ratios(t);
  CHECK(r(0, 0) == 1.0);
  CHECK(r(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  const auto curves = dolan_more(t);
  for (const auto& c : curves)
  {
    CHECK(curve_at(c, 1.0) == 0.0);
    CHECK(curve_at(c, std::nextafter(1.0, 2.0)) == 0.5);
    CHECK(curve_at(c, r(0, 1)) == 0.5);
    CHECK(curve_at(c, std::nextafter(r(0, 1), 3.0)) == 1.0);
  }
}

TEST_CASE("random profiles match the counting oracle")
{
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial)
  {
    const int np = 1 + static_cast<int>(rng.below(6)), ns = 1 + static_cast<int>(rng.below(4));
    Matrix m(np, ns);
    for (int p = 0; p < np; ++p)
      for (int s = 0; s < ns; ++s)
        m(p, s) = rng.below(5) == 0 ? 0.0 : rng.uniform(0.0, 1.0);
    DolanMoreTable t;
    t.t = m;
    for (int p = 0; p < np; ++p)
      t.problems.push_back("p" + std::to_string(p));
    for (int s = 0; s < ns; ++s)
      t.solvers.push_back("s" + std::to_string(s));
    const auto curves = dolan_more(t);
    const auto ratios = performance_ratios(t);
    for (int p = 0; p < np; ++p)
      CHECK(ratios.row(p).minCoeff() == 1.0);
    for (int s = 0; s < ns; ++s)
    {
      const auto& c = curves[s];
      CHECK(c.taus.front() == 1.0);
      for (std::size_t i = 0; i < c.taus.size(); ++i)
      {
        CHECK(c.rho[i] == counting_oracle(m, s, c.taus[i]));
        if (i > 0)
        {
          CHECK(c.taus[i] > c.taus[i - 1]);
          CHECK(c.rho[i] >= c.rho[i - 1]);
        }
      }
      CHECK(c.rho.back() == 1.0);
    }
  }
}

TEST_CASE("row scaling leaves ratios unchanged")
{
  Rng rng(8);
  Matrix m(4, 3);
  for (int p = 0; p < 4; ++p)
    for (int s = 0; s < 3; ++s)
      m(p, s) = rng.uniform(0.01, 1.0);
  DolanMoreTable t{{"a", "b", "c", "d"}, {"x", "y", "z"}, m};
  auto scaled = t;
  for (int p = 0; p < 4; ++p)
    scaled.t.row(p) *= 1.0 + p * 3.7;
  const auto r1 = performance_ratios(t), r2 = performance_ratios(scaled);
  CHECK((r1 - r2).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("table validation")
{
  DolanMoreTable t{{"a"}, {"x", "y"}, Matrix::Constant(1, 2, 0.5)};
  CHECK_NOTHROW(t.validate());
  t.t(0, 1) = -1.0;
  CHECK_THROWS_AS(t.validate(), InvalidInput);
  t.t(0, 1) = NAN;
  CHECK_THROWS_AS(t.validate(), InvalidInput);
  DolanMoreTable bad{{"a", "b"}, {"x"}, Matrix::Constant(1, 1, 0.5)};
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("true regret")
{
  const auto reg = benchmark::ProblemRegistry::load_default();
  const auto rast = reg.problem(benchmark::FunctionId::rastrigin, 5, 70);
  CHECK(std::fabs(true_regret(rast, Vector::Zero(5))) <= 1e-6);
  const auto ext = benchmark::estimate_extrema(benchmark::FunctionId::styblinski_tang, 2, 0, 100);
  const auto st = benchmark::make_problem(benchmark::FunctionId::styblinski_tang, 2, ext.f_min, ext.f_max);
  CHECK(std::fabs(true_regret(st, ext.argmax) - 1.0) <= 1e-6);
  CHECK(std::fabs(true_regret(st, ext.argmin)) <= 1e-6);

  Rng rng(2);
  for (int i = 0; i < 50; ++i)
  {
    const Eigen::Vector2d x(rng.uniform(-5, 5), rng.uniform(-5, 5));
    const double raw = benchmark::eval_raw(benchmark::FunctionId::styblinski_tang, x);
    CHECK(true_regret(st, x) == (raw - st.f_min) / (st.f_max - st.f_min));
  }
  CHECK_THROWS_AS(true_regret(st, Eigen::Vector2d(6, 0)), InvalidInput);
}
