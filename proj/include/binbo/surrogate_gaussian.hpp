#pragma once

#include "binbo/types.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <optional>

namespace binbo::gaussian
{
  /// Squared-exponential kernel hyperparameters.
  struct KernelParams
  {
    double signal_variance = 1.0;
    double length_scale = 1.0;
    double noise_variance = 0.0;

    /// Throws InvalidInput unless all fields are finite, sigma_f^2 > 0,
    /// theta > 0 and sigma_n^2 >= 0.
    void validate() const;
  };

  /// sigma_f^2 exp(-|a - b|^2 / (2 theta^2)). Observation noise is not
  /// part of this; it only enters on the Gram diagonal.
  double kernel_eval(const KernelParams& params, const Vector& a, const Vector& b);

  /// Noise-free Gram matrix K(A, B); rows of A and B are points.
  Matrix kernel_matrix(const KernelParams& params, const Matrix& A, const Matrix& B);

  /// K(X, x) for a single point.
  Vector kernel_vector(const KernelParams& params, const Matrix& X, const Vector& x);

  /// Cholesky of K + (diag_add + jitter) I, escalating jitter from
  /// 1e-10 sigma_f^2 by factors of ten up to 1e-4 sigma_f^2.
  struct JitteredCholesky
  {
    Eigen::LLT<Matrix> llt;
    double jitter = 0.0;
  };
  JitteredCholesky jittered_cholesky(const Matrix& K, double diag_add, double signal_variance);

  struct GaussianPosterior
  {
    double mean = 0.0;
    double variance = 0.0;
  };

  /// Exact GP regression with zero prior mean. Immutable after fit.
  class GPModel
  {
  public:
    static GPModel fit(const Dataset& data, const KernelParams& params, const Vector& targets);

    GaussianPosterior predict(const Vector& x_star) const;

    /// log N(targets; 0, K_y) with K_y including noise and jitter.
    double log_marginal(const Vector& targets) const;
    double log_marginal() const { return log_marginal(targets_); }

    const KernelParams& params() const { return params_; }
    const Dataset& data() const { return data_; }
    const Matrix& design() const { return X_; }
    Matrix chol() const { return llt_.matrixL(); }
    const Vector& alpha() const { return alpha_; }
    double jitter() const { return jitter_; }
    int dim() const { return data_.dim; }

  private:
    GPModel() = default;

    KernelParams params_;
    Dataset data_;
    Matrix X_;
    Vector targets_;
    Eigen::LLT<Matrix> llt_;
    Vector alpha_;
    double jitter_ = 0.0;
  };

  inline GaussianPosterior gp_predict(const GPModel& model, const Vector& x_star)
  {
    return model.predict(x_star);
  }

  inline double gaussian_log_marginal(const GPModel& model, const Vector& targets)
  {
    return model.log_marginal(targets);
  }

  /// Multi-start settings for marginal-likelihood maximization.
  struct HyperSearch
  {
    int starts = 8;
    int polls = 12;
    std::uint64_t seed = 0;
  };

  /*
   * Log-space box for hyperparameter search: sigma_f^2 in [1e-4, 10],
   * theta in [1e-2 diam, diam], sigma_n^2 in [1e-8, 1], where diam is the
   * diagonal of the design box.
   */
  struct HyperBounds
  {
    double signal_lo = 1e-4, signal_hi = 10.0;
    double length_lo = 0.01, length_hi = 1.0;
    double noise_lo = 1e-8, noise_hi = 1.0;

    static HyperBounds for_box(const Box& box);
  };

  /// Maximizes log_marginal over the bounds. The first start is `warm`
  /// (clamped) when given, the rest come from a seeded Halton sequence.
  KernelParams fit_hyperparameters(const Dataset& data,
                                   const Vector& targets,
                                   const HyperBounds& bounds,
                                   const HyperSearch& search,
                                   const std::optional<KernelParams>& warm = std::nullopt);
}
