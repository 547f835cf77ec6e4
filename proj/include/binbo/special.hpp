#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace binbo::special
{
  double normal_pdf(double z);
  double normal_cdf(double z);

  /// Numerically stable log(1 + e^x).
  double softplus(double x);

  /// Logistic sigmoid, stable for any finite x.
  double sigmoid(double x);

  double log_binomial_coefficient(long long n, long long k);

  /// Nodes and weights for the physicists' Gauss-Hermite rule,
  /// integrating against exp(-x^2).
  struct HermiteRule
  {
    std::vector<double> nodes;
    std::vector<double> weights;
  };

  /// Golub-Welsch; the 32-node rule is cached.
  const HermiteRule& gauss_hermite(int n);

  /// E[g(F)] for F ~ Normal(mean, variance) via an n-node Gauss-Hermite rule.
  template <typename Fn>
  double gaussian_expectation(Fn&& g, double mean, double variance, int n = 32)
  {
    const auto& rule = gauss_hermite(n);
    const double scale = std::sqrt(2.0 * variance);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * g(mean + scale * rule.nodes[i]);
    return acc / std::sqrt(std::numbers::pi);
  }

  /// Regularized incomplete beta I_x(a, b) by Lentz continued fraction.
  double incomplete_beta(double a, double b, double x);
}
