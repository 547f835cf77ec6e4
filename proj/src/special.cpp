#include "binbo/special.hpp"

#include "binbo/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace binbo::special
{
  double normal_pdf(double z)
  {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  }

  double normal_cdf(double z)
  {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
  }

  double softplus(double x)
  {
    if (x > 0.0)
      return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
  }

  double sigmoid(double x)
  {
    if (x >= 0.0)
      return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  }

  double log_binomial_coefficient(long long n, long long k)
  {
    return std::lgamma(static_cast<double>(n) + 1.0)
      - std::lgamma(static_cast<double>(k) + 1.0)
      - std::lgamma(static_cast<double>(n - k) + 1.0);
  }

  namespace
  {
    HermiteRule golub_welsch(int n)
    {
      Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
      for (int i = 1; i < n; ++i)
      {
        const double off = std::sqrt(0.5 * i);
        jacobi(i, i - 1) = off;
        jacobi(i - 1, i) = off;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
      HermiteRule rule;
      rule.nodes.resize(n);
      rule.weights.resize(n);
      for (int i = 0; i < n; ++i)
      {
        // Newton polish on the orthonormal recurrence, then w = 1 / sum p_k^2;
        // eigenvector components lose relative accuracy in the far tails.
        double x = solver.eigenvalues()(i);
        double sum_sq = 0.0;
        for (int iter = 0; iter < 3; ++iter)
        {
          double prev = 0.0;
          double cur = std::pow(std::numbers::pi, -0.25);
          sum_sq = 0.0;
          for (int k = 0; k < n; ++k)
          {
            sum_sq += cur * cur;
            const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
            prev = cur;
            cur = next;
          }
          // cur = p_n(x), prev = p_{n-1}(x), p_n' = sqrt(2n) p_{n-1}
          if (iter < 2)
            x -= cur / (std::sqrt(2.0 * n) * prev);
        }
        rule.nodes[i] = x;
        rule.weights[i] = 1.0 / sum_sq;
      }
      // Symmetrize: the rule is exactly symmetric in exact arithmetic.
      for (int i = 0; i < n / 2; ++i)
      {
        const int j = n - 1 - i;
        const double node = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double weight = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -node;
        rule.nodes[j] = node;
        rule.weights[i] = weight;
        rule.weights[j] = weight;
      }
      if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
      return rule;
    }
  }

  const HermiteRule& gauss_hermite(int n)
  {
    if (n < 1)
      throw InvalidInput("gauss_hermite: need at least one node");
    static std::mutex mutex;
    static std::map<int, HermiteRule> cache;
    std::scoped_lock lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
      it = cache.emplace(n, golub_welsch(n)).first;
    return it->second;
  }

  namespace
  {
    // Modified Lentz evaluation of the continued fraction for I_x(a, b).
    double beta_continued_fraction(double a, double b, double x)
    {
      constexpr int max_iter = 100000;
      constexpr double eps = 1e-15;
      constexpr double tiny = 1e-300;

      const double qab = a + b;
      const double qap = a + 1.0;
      const double qam = a - 1.0;
      double c = 1.0;
      double d = 1.0 - qab * x / qap;
      if (std::fabs(d) < tiny)
        d = tiny;
      d = 1.0 / d;
      double h = d;
      for (int m = 1; m <= max_iter; ++m)
      {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
          d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
          c = tiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
          d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
          c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps)
          return h;
      }
      throw NumericalError("incomplete_beta: continued fraction did not converge");
    }
  }

  double incomplete_beta(double a, double b, double x)
  {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
      throw InvalidInput("incomplete_beta: shape parameters must be positive and finite");
    if (!(x >= 0.0 && x <= 1.0))
      throw InvalidInput("incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0)
      return 0.0;
    if (x == 1.0)
      return 1.0;

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)
      + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);

    // The fraction converges fast on the side below the mean; use
    // I_x(a, b) = 1 - I_{1-x}(b, a) on the other side.
    if (x < (a + 1.0) / (a + b + 2.0))
      return std::clamp(front * beta_continued_fraction(a, b, x) / a, 0.0, 1.0);
    return std::clamp(1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b, 0.0, 1.0);
  }
}
