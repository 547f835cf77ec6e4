#pragma once

#include "binbo/errors.hpp"

#include <cstdint>

namespace binbo::fidelity
{
  /// Two-level fidelity: n_low trials first, topped up to n_high when
  /// the cheap draw looks promising.
  struct FidelityConfig
  {
    std::int64_t n_low = 35;
    std::int64_t n_high = 70;
    double lambda = 0.5;

    void validate() const;
  };

  struct BetaParams
  {
    double alpha = 1.0;
    double beta = 1.0;
  };

  /// Conjugate update of a uniform Beta(1, 1) prior with y successes in n.
  BetaParams beta_posterior(std::int64_t y_low, std::int64_t n_low);

  /// Regularized incomplete beta I_t(alpha, beta).
  double beta_cdf(const BetaParams& p, double t);

  /// P(f(x) < y_min | y_low) under the Beta posterior.
  double improvement_probability(std::int64_t y_low, std::int64_t n_low, double y_min);

  /// Continue to high fidelity iff the improvement probability is >= lambda.
  bool decide_continue(std::int64_t y_low, const FidelityConfig& cfg, double y_min);
}
