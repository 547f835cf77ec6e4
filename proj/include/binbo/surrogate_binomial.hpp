#pragma once

#include "binbo/surrogate_gaussian.hpp"
#include "binbo/types.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <optional>
#include <vector>

namespace binbo::binomial
{
  using gaussian::KernelParams;

  /// Logistic link from latent value to success probability.
  double inverse_link(double f);

  struct LogLikTerms
  {
    double value = 0.0;
    double grad = 0.0;
    double neg_hess = 0.0;
  };

  /// log Bin(y | N, sigmoid(f)) including log C(N, y), with first and
  /// negated second derivative in f.
  LogLikTerms binom_loglik(double f, std::int64_t y, std::int64_t N);

  struct LatentPosterior
  {
    double mean = 0.0;
    double variance = 0.0;
  };

  struct NewtonSettings
  {
    int max_iter = 100;
    int max_halvings = 20;
    double tolerance = 1e-6;  ///< scaled by sqrt(n) on the gradient norm
  };

  /*
   * Laplace approximation to the latent GP posterior under a binomial
   * likelihood. The mode is found by damped Newton in the a = K^-1 f
   * parameterization; all solves go through the Cholesky factor of
   * B = I + W^1/2 K W^1/2, so W^-1 is never formed.
   *
   * The latent prior uses the kernel without observation noise; the
   * noise_variance field of the params is ignored.
   */
  class LaplaceModel
  {
  public:
    /// `warm_latent`, when sized like the data, seeds the Newton iteration.
    static LaplaceModel fit(const Dataset& data,
                            const KernelParams& params,
                            const Vector& warm_latent = Vector(),
                            const NewtonSettings& settings = {});

    LatentPosterior predict_latent(const Vector& x_star) const;
    double predict_success_prob(const Vector& x_star) const;
    double log_marginal() const;

    const KernelParams& params() const { return params_; }
    const Dataset& data() const { return data_; }
    const Vector& latent_mode() const { return latent_; }
    const Vector& neg_hessian_diag() const { return W_; }
    Matrix stab_chol() const { return llt_.matrixL(); }
    bool converged() const { return converged_; }
    int newton_iters() const { return iters_; }
    double jitter() const { return jitter_; }
    double gradient_norm() const { return grad_norm_; }

    /// Newton objective after every accepted step, starting point first.
    const std::vector<double>& objective_history() const { return history_; }

  private:
    LaplaceModel() = default;
    void require_converged(const char* op) const;

    KernelParams params_;
    Dataset data_;
    Matrix X_;
    Vector latent_;
    Vector alpha_;
    Vector W_;
    Vector sqrt_W_;
    Eigen::LLT<Matrix> llt_;
    double jitter_ = 0.0;
    double loglik_ = 0.0;
    double grad_norm_ = 0.0;
    bool converged_ = false;
    int iters_ = 0;
    std::vector<double> history_;
  };

  inline LaplaceModel laplace_fit(const Dataset& data, const KernelParams& params)
  {
    return LaplaceModel::fit(data, params);
  }
  inline LatentPosterior laplace_predict_latent(const LaplaceModel& m, const Vector& x)
  {
    return m.predict_latent(x);
  }
  inline double predict_success_prob(const LaplaceModel& m, const Vector& x)
  {
    return m.predict_success_prob(x);
  }
  inline double laplace_log_marginal(const LaplaceModel& m) { return m.log_marginal(); }

  /// E[sigmoid(F)] for F ~ Normal(mean, variance), 32-node Gauss-Hermite.
  double expected_success_prob(const LatentPosterior& latent);

  /// Multi-start maximization of the Laplace evidence over
  /// (signal_variance, length_scale). Noise is fixed at zero.
  KernelParams fit_hyperparameters(const Dataset& data,
                                   const gaussian::HyperBounds& bounds,
                                   const gaussian::HyperSearch& search,
                                   const std::optional<KernelParams>& warm = std::nullopt);
}
