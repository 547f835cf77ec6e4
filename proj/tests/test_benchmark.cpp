#include "binbo/benchmark.hpp"
#include "binbo/random.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace binbo;
using namespace binbo::benchmark;

TEST_CASE("function names round-trip")
{
  for (auto id : all_functions())
    CHECK(function_from_string(to_string(id)) == id);
  CHECK_FALSE(try_function_from_string("ackley").has_value());
  CHECK_THROWS_AS(function_from_string("ackley"), InvalidInput);
  CHECK(single_minimum(FunctionId::zakharov));
  CHECK(single_minimum(FunctionId::styblinski_tang));
  CHECK_FALSE(single_minimum(FunctionId::rastrigin));
  CHECK_FALSE(single_minimum(FunctionId::michalewicz));
}

TEST_CASE("known minima")
{
  CHECK(eval_raw(FunctionId::rastrigin, Vector::Zero(5)) == 0.0);
  CHECK(eval_raw(FunctionId::zakharov, Vector::Zero(5)) == 0.0);
  CHECK(eval_raw(FunctionId::styblinski_tang, Vector::Constant(5, -2.903534))
        == doctest::Approx(-195.8308).epsilon(1e-3 / 195.8308));
  CHECK(eval_raw(FunctionId::styblinski_tang, Vector::Constant(3, -2.903534))
        == doctest::Approx(-39.16617 * 3).epsilon(1e-6));
}

TEST_CASE("direct formula evaluations")
{
  // independent re-statements of the textbook formulas
  const Eigen::Vector2d x(1.0, 2.0);
  CHECK(eval_raw(FunctionId::rastrigin, x) == doctest::Approx(20.0 + 1.0 + 4.0 - 10.0 * 2.0));
  const double s2 = 0.5 * 1.0 + 0.5 * 2 * 2.0;
  CHECK(eval_raw(FunctionId::zakharov, x) == doctest::Approx(5.0 + s2 * s2 + std::pow(s2, 4)));
  CHECK(eval_raw(FunctionId::styblinski_tang, x)
        == doctest::Approx(0.5 * ((1 - 16 + 5) + (16 - 64 + 10))));
  const double m = -std::sin(1.0) * std::pow(std::sin(1.0 / std::numbers::pi), 20)
                   - std::sin(2.0) * std::pow(std::sin(2.0 * 4.0 / std::numbers::pi), 20);
  CHECK(eval_raw(FunctionId::michalewicz, x) == doctest::Approx(m).epsilon(1e-14));
}

TEST_CASE("out-of-bounds evaluation is rejected")
{
  CHECK_THROWS_AS(eval_raw(FunctionId::rastrigin, Vector::Constant(3, 6.0)), InvalidInput);
  CHECK_THROWS_AS(eval_raw(FunctionId::michalewicz, Vector::Constant(3, -0.1)), InvalidInput);
  CHECK_THROWS_AS(eval_raw(FunctionId::zakharov, Vector::Constant(3, 10.5)), InvalidInput);
  CHECK_NOTHROW(eval_raw(FunctionId::zakharov, Vector::Constant(3, 10.0)));
}

TEST_CASE("Zakharov minimum is exact")
{
  for (int dim : {1, 4, 6})
    CHECK(estimate_extrema(FunctionId::zakharov, dim, 0, 20).f_min == 0.0);
}

TEST_CASE("Rastrigin maximum is at least the corner maximum and matches the separable grid value")
{
  const int dim = 5;
  const auto ext = estimate_extrema(FunctionId::rastrigin, dim);
  CHECK(ext.f_min == 0.0);
  double corner = -1.0;
  for (int mask = 0; mask < (1 << dim); ++mask)
  {
    Vector x(dim);
    for (int i = 0; i < dim; ++i)
      x(i) = (mask >> i) & 1 ? 5.12 : -5.12;
    corner = std::max(corner, eval_raw(FunctionId::rastrigin, x));
  }
  CHECK(ext.f_max >= corner);

  // the function is a sum of identical 1D terms
  double best1 = -1.0;
  const int n = 2000000;
  for (int i = 0; i <= n; ++i)
  {
    const double t = -5.12 + 10.24 * i / n;
    best1 = std::max(best1, t * t - 10.0 * std::cos(2.0 * std::numbers::pi * t) + 10.0);
  }
  CHECK(ext.f_max == doctest::Approx(best1 * dim).epsilon(1e-8));
}

TEST_CASE("Michalewicz minimum in five dimensions")
{
  const auto reg = ProblemRegistry::load_default();
  const auto* def = reg.find(FunctionId::michalewicz, 5);
  REQUIRE(def != nullptr);
  CHECK(std::fabs(def->f_min - (-4.6877)) <= 0.01);
  const auto ext = estimate_extrema(FunctionId::michalewicz, 5, 3, 200);
  CHECK(std::fabs(ext.f_min - (-4.6877)) <= 0.01);
}

TEST_CASE("rescale")
{
  CHECK(rescale(-3.0, -3.0, 5.0) == 0.0);
  CHECK(rescale(5.0, -3.0, 5.0) == 1.0);
  CHECK(rescale(1.0, -3.0, 5.0) == 0.5);
  CHECK(rescale(-4.0, -3.0, 5.0) == 0.0);
  CHECK(rescale(6.0, -3.0, 5.0) == 1.0);
  CHECK_THROWS_AS(rescale(0.0, 1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(rescale(0.0, 2.0, 1.0), InvalidInput);
}

TEST_CASE("binomial sampler edge cases and moments")
{
  Rng rng(1);
  for (int i = 0; i < 100; ++i)
  {
    CHECK(sample_binomial(0.0, 70, rng) == 0);
    CHECK(sample_binomial(1.0, 70, rng) == 70);
  }
  const int draws = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < draws; ++i)
  {
    const auto k = static_cast<double>(sample_binomial(0.3, 70, rng));
    CHECK(k >= 0);
    CHECK(k <= 70);
    s += k;
    s2 += k * k;
  }
  const double mean = s / draws;
  const double var = s2 / draws - mean * mean;
  CHECK(std::fabs(mean - 21.0) <= 3.0 * std::sqrt(14.7 / draws));
  CHECK(std::fabs(var - 14.7) <= 0.05 * 14.7);

  Rng a(5), b(5);
  for (int i = 0; i < 50; ++i)
    CHECK(sample_binomial(0.4, 35, a) == sample_binomial(0.4, 35, b));
}

TEST_CASE("binomial sampler is symmetric under p -> 1 - p")
{
  const int draws = 100000, N = 70;
  std::vector<double> c1(N + 1, 0.0), c2(N + 1, 0.0);
  Rng r1(11), r2(12);
  for (int i = 0; i < draws; ++i)
  {
    c1[sample_binomial(0.3, N, r1)] += 1;
    c2[N - sample_binomial(0.7, N, r2)] += 1;
  }
  // two-sample chi-square on bins pooled until each has at least 10 expected
  double stat = 0.0;
  int bins = 0;
  double a = 0.0, b = 0.0;
  for (int k = 0; k <= N; ++k)
  {
    a += c1[k];
    b += c2[k];
    if ((a + b) / 2 >= 10 || k == N)
    {
      if (a + b > 0)
      {
        stat += (a - b) * (a - b) / (a + b);
        ++bins;
      }
      a = b = 0.0;
    }
  }
  REQUIRE(bins > 2);
  const boost::math::chi_squared_distribution<double> chi(bins - 1);
  CHECK(boost::math::cdf(boost::math::complement(chi, stat)) > 0.001);
}

TEST_CASE("registered problems rescale into the unit interval")
{
  const auto reg = ProblemRegistry::load_default();
  CHECK(reg.entries().size() >= 12);
  for (const auto& def : reg.entries())
  {
    const auto p = reg.problem(def.function_id, def.dim, 70);
    CHECK(p.spot_check_excess <= 1e-6);
    CHECK(p.f_min < p.f_max);
    CHECK(p.id() == std::string(to_string(def.function_id)) + "-" + std::to_string(def.dim));
    Rng rng(derive_seed(0, p.id()));
    for (int i = 0; i < 200; ++i)
    {
      Vector x(p.dim);
      for (int j = 0; j < p.dim; ++j)
        x(j) = rng.uniform(p.bounds.lower(j), p.bounds.upper(j));
      const double v = p.probability(x);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("registry save and load round trip")
{
  const auto reg = ProblemRegistry::load_default();
  const auto path = std::filesystem::temp_directory_path() / "binbo_registry_roundtrip.json";
  reg.save(path);
  const auto again = ProblemRegistry::load(path);
  REQUIRE(again.entries().size() == reg.entries().size());
  for (std::size_t i = 0; i < reg.entries().size(); ++i)
  {
    CHECK(again.entries()[i].f_min == reg.entries()[i].f_min);
    CHECK(again.entries()[i].f_max == reg.entries()[i].f_max);
    CHECK(again.entries()[i].trials == reg.entries()[i].trials);
    CHECK(again.entries()[i].bounds.lower == reg.entries()[i].bounds.lower);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ProblemRegistry::load(path), IoError);
}

TEST_CASE("make_problem validates its inputs")
{
  CHECK_THROWS_AS(make_problem(FunctionId::zakharov, 5, 1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(make_problem(FunctionId::zakharov, 0, 0.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(make_problem(FunctionId::zakharov, 5, 0.0, 1.0, 0), InvalidInput);
}
