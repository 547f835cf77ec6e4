#include "binbo/fidelity.hpp"

#include "oracles.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <doctest.h>

#include <cmath>

using namespace binbo;
using namespace binbo::fidelity;

TEST_CASE("beta_posterior adds counts to the uniform prior")
{
  auto p = beta_posterior(0, 0);
  CHECK(p.alpha == 1.0);
  CHECK(p.beta == 1.0);
  p = beta_posterior(5, 10);
  CHECK(p.alpha == 6.0);
  CHECK(p.beta == 6.0);
  p = beta_posterior(10, 10);
  CHECK(p.alpha == 11.0);
  CHECK(p.beta == 1.0);
  CHECK_THROWS_AS(beta_posterior(11, 10), InvalidInput);
  CHECK_THROWS_AS(beta_posterior(-1, 10), InvalidInput);
}

TEST_CASE("beta_cdf closed-form cases")
{
  for (double t = 0.0; t <= 1.0; t += 0.05)
    CHECK(std::fabs(beta_cdf({1, 1}, t) - t) <= 1e-14);
  for (double a : {1.0, 2.0, 7.5, 40.0, 300.0})
    CHECK(beta_cdf({a, a}, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(beta_cdf({3, 4}, 0.0) == 0.0);
  CHECK(beta_cdf({3, 4}, 1.0) == 1.0);
  CHECK_THROWS_AS(beta_cdf({3, 4}, -0.1), InvalidInput);
  CHECK_THROWS_AS(beta_cdf({3, 4}, 1.1), InvalidInput);
}

TEST_CASE("beta_cdf(6, 6, 0.3) matches adaptive quadrature")
{
  const double q = oracle::beta_cdf_quadrature(6, 6, 0.3);
  CHECK(std::fabs(beta_cdf({6, 6}, 0.3) - q) <= 1e-8);
}

TEST_CASE("beta_cdf matches the binomial-tail identity for integer shapes")
{
  // I_t(a, b) = sum_{j=a}^{a+b-1} C(a+b-1, j) t^j (1-t)^(a+b-1-j)
  for (int a = 1; a <= 30; a += 3)
    for (int b = 1; b <= 30; b += 4)
      for (double t : {0.02, 0.2, 0.45, 0.8, 0.97})
      {
        const int n = a + b - 1;
        double sum = 0.0;
        for (int j = a; j <= n; ++j)
          sum += boost::math::binomial_coefficient<double>(n, j) * std::pow(t, j) * std::pow(1 - t, n - j);
        CHECK(std::fabs(beta_cdf({double(a), double(b)}, t) - sum) <= 1e-10);
      }
}

TEST_CASE("beta_cdf holds 1e-10 accuracy for large shapes")
{
  for (double a : {100.0, 1000.0, 10000.0})
    for (double b : {150.0, 2500.0, 9000.0})
    {
      const double mean = a / (a + b);
      const double sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1)));
      for (double k : {-3.0, -1.0, 0.0, 0.5, 2.0})
      {
        const double t = std::clamp(mean + k * sd, 1e-6, 1 - 1e-6);
        CHECK(std::fabs(beta_cdf({a, b}, t) - boost::math::ibeta(a, b, t)) <= 1e-10);
      }
    }
}

TEST_CASE("decide_continue edge cases")
{
  FidelityConfig cfg{1, 2, 0.99};
  CHECK(decide_continue(0, cfg, 1.0));
  for (double lambda : {0.01, 0.3, 0.5, 0.99})
  {
    FidelityConfig c{35, 70, lambda};
    for (int y = 0; y <= 35; y += 5)
      CHECK_FALSE(decide_continue(y, c, 0.0));
  }
  CHECK_THROWS_AS(decide_continue(36, FidelityConfig{35, 70, 0.5}, 0.2), InvalidInput);
}

TEST_CASE("decide_continue(2, 35, 0.2, 0.5) agrees with the quadrature oracle")
{
  const FidelityConfig cfg{35, 70, 0.5};
  const double p = oracle::beta_cdf_quadrature(3, 34, 0.2);
  CHECK(decide_continue(2, cfg, 0.2) == (p >= 0.5));
  CHECK(p > 0.5);  // P(f < 0.2 | 2 of 35) is large
}

TEST_CASE("gate monotonicity in evidence and in lambda")
{
  for (double y_min : {0.05, 0.2, 0.5, 0.8})
  {
    double previous = 2.0;
    for (int y = 0; y <= 35; ++y)
    {
      const double p = improvement_probability(y, 35, y_min);
      CHECK(p <= previous + 1e-15);
      previous = p;
    }
    int passed_prev = 36;
    for (double lambda = 0.05; lambda < 1.0; lambda += 0.05)
    {
      int passed = 0;
      for (int y = 0; y <= 35; ++y)
        passed += decide_continue(y, {35, 70, lambda}, y_min) ? 1 : 0;
      CHECK(passed <= passed_prev);
      passed_prev = passed;
    }
  }
}

TEST_CASE("FidelityConfig validation")
{
  CHECK_NOTHROW(FidelityConfig{35, 70, 0.3}.validate());
  CHECK_THROWS_AS((FidelityConfig{70, 70, 0.3}.validate()), InvalidInput);
  CHECK_THROWS_AS((FidelityConfig{35, 70, 1.5}.validate()), InvalidInput);
  CHECK_THROWS_AS((FidelityConfig{35, 70, 0.0}.validate()), InvalidInput);
}
