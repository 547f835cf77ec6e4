#include "binbo/fidelity.hpp"

#include "binbo/errors.hpp"
#include "binbo/special.hpp"

#include <cmath>
#include <string>

namespace binbo::fidelity
{
  void FidelityConfig::validate() const
  {
    if (n_low < 1)
      throw InvalidInput("FidelityConfig: n_low must be >= 1");
    if (n_low >= n_high)
      throw InvalidInput("FidelityConfig: n_low (" + std::to_string(n_low)
                         + ") must be < n_high (" + std::to_string(n_high) + ")");
    if (!(lambda > 0.0 && lambda < 1.0))
      throw InvalidInput("FidelityConfig: lambda must lie in (0, 1)");
  }

  BetaParams beta_posterior(std::int64_t y_low, std::int64_t n_low)
  {
    if (n_low < 0 || y_low < 0 || y_low > n_low)
      throw InvalidInput("beta_posterior: need 0 <= y_low <= n_low, got y_low="
                         + std::to_string(y_low) + ", n_low=" + std::to_string(n_low));
    return {1.0 + static_cast<double>(y_low), 1.0 + static_cast<double>(n_low - y_low)};
  }

  double beta_cdf(const BetaParams& p, double t)
  {
    if (!(t >= 0.0 && t <= 1.0))
      throw InvalidInput("beta_cdf: t must lie in [0, 1]");
    return special::incomplete_beta(p.alpha, p.beta, t);
  }

  double improvement_probability(std::int64_t y_low, std::int64_t n_low, double y_min)
  {
    return beta_cdf(beta_posterior(y_low, n_low), y_min);
  }

  bool decide_continue(std::int64_t y_low, const FidelityConfig& cfg, double y_min)
  {
    if (y_low < 0 || y_low > cfg.n_low)
      throw InvalidInput("decide_continue: y_low outside [0, n_low]");
    if (!(y_min >= 0.0 && y_min <= 1.0))
      throw InvalidInput("decide_continue: y_min outside [0, 1]");
    return improvement_probability(y_low, cfg.n_low, y_min) >= cfg.lambda;
  }
}
