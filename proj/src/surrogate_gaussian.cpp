#include "binbo/surrogate_gaussian.hpp"

#include "binbo/search.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace binbo::gaussian
{
  void KernelParams::validate() const
  {
    if (!std::isfinite(signal_variance) || !std::isfinite(length_scale)
        || !std::isfinite(noise_variance))
      throw InvalidInput("KernelParams: all fields must be finite");
    if (!(signal_variance > 0.0))
      throw InvalidInput("KernelParams: signal_variance must be > 0");
    if (!(length_scale > 0.0))
      throw InvalidInput("KernelParams: length_scale must be > 0");
    if (!(noise_variance >= 0.0))
      throw InvalidInput("KernelParams: noise_variance must be >= 0");
  }

  double kernel_eval(const KernelParams& params, const Vector& a, const Vector& b)
  {
    if (a.size() != b.size())
      throw InvalidInput("kernel_eval: dimension mismatch (" + std::to_string(a.size())
                         + " vs " + std::to_string(b.size()) + ")");
    const double r2 = (a - b).squaredNorm();
    return params.signal_variance
      * std::exp(-r2 / (2.0 * params.length_scale * params.length_scale));
  }

  Matrix kernel_matrix(const KernelParams& params, const Matrix& A, const Matrix& B)
  {
    if (A.cols() != B.cols())
      throw InvalidInput("kernel_matrix: dimension mismatch");
    const double inv = 1.0 / (2.0 * params.length_scale * params.length_scale);
    Matrix K(A.rows(), B.rows());
    for (Eigen::Index j = 0; j < B.rows(); ++j)
      for (Eigen::Index i = 0; i < A.rows(); ++i)
        K(i, j) = params.signal_variance * std::exp(-(A.row(i) - B.row(j)).squaredNorm() * inv);
    return K;
  }

  Vector kernel_vector(const KernelParams& params, const Matrix& X, const Vector& x)
  {
    if (X.rows() > 0 && X.cols() != x.size())
      throw InvalidInput("kernel_vector: dimension mismatch");
    const double inv = 1.0 / (2.0 * params.length_scale * params.length_scale);
    Vector k(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      k(i) = params.signal_variance * std::exp(-(X.row(i).transpose() - x).squaredNorm() * inv);
    return k;
  }

  JitteredCholesky jittered_cholesky(const Matrix& K, double diag_add, double signal_variance)
  {
    const double max_jitter = 1e-4 * signal_variance;
    JitteredCholesky out;
    for (double jitter = 1e-10 * signal_variance; jitter <= max_jitter * (1.0 + 1e-9); jitter *= 10.0)
    {
      Matrix Ky = K;
      Ky.diagonal().array() += diag_add + jitter;
      out.llt.compute(Ky);
      if (out.llt.info() == Eigen::Success)
      {
        out.jitter = jitter;
        return out;
      }
    }
    throw NumericalError("Gram matrix is not positive definite even with jitter "
                         + std::to_string(max_jitter)
                         + "; the design is too ill-conditioned (near-duplicate points?)");
  }

  GPModel GPModel::fit(const Dataset& data, const KernelParams& params, const Vector& targets)
  {
    params.validate();
    if (static_cast<std::size_t>(targets.size()) != data.size())
      throw InvalidInput("gp_fit: targets length " + std::to_string(targets.size())
                         + " differs from dataset size " + std::to_string(data.size()));
    GPModel model;
    model.params_ = params;
    model.data_ = data;
    model.X_ = data.design();
    model.targets_ = targets;
    if (data.empty())
    {
      model.alpha_ = Vector(0);
      return model;
    }
    const Matrix K = kernel_matrix(params, model.X_, model.X_);
    auto factor = jittered_cholesky(K, params.noise_variance, params.signal_variance);
    model.llt_ = std::move(factor.llt);
    model.jitter_ = factor.jitter;
    model.alpha_ = model.llt_.solve(targets);
    return model;
  }

  GaussianPosterior GPModel::predict(const Vector& x_star) const
  {
    if (x_star.size() != data_.dim)
      throw InvalidInput("gp_predict: point has dimension " + std::to_string(x_star.size())
                         + ", model has " + std::to_string(data_.dim));
    const double prior = params_.signal_variance;
    if (data_.empty())
      return {0.0, prior};
    const Vector k = kernel_vector(params_, X_, x_star);
    const Vector v = llt_.matrixL().solve(k);
    return {k.dot(alpha_), std::max(0.0, prior - v.squaredNorm())};
  }

  double GPModel::log_marginal(const Vector& targets) const
  {
    const auto n = static_cast<Eigen::Index>(data_.size());
    if (targets.size() != n)
      throw InvalidInput("gaussian_log_marginal: targets length mismatch");
    if (n == 0)
      return 0.0;
    const Vector a = llt_.solve(targets);
    const double log_det = 2.0 * Matrix(llt_.matrixL()).diagonal().array().log().sum();
    return -0.5 * targets.dot(a) - 0.5 * log_det
      - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  }

  HyperBounds HyperBounds::for_box(const Box& box)
  {
    HyperBounds b;
    const double diam = box.diameter();
    b.length_lo = 0.01 * diam;
    b.length_hi = diam;
    return b;
  }

  KernelParams fit_hyperparameters(const Dataset& data,
                                   const Vector& targets,
                                   const HyperBounds& bounds,
                                   const HyperSearch& search,
                                   const std::optional<KernelParams>& warm)
  {
    const Box log_box(Eigen::Vector3d(std::log(bounds.signal_lo), std::log(bounds.length_lo),
                                      std::log(bounds.noise_lo)),
                      Eigen::Vector3d(std::log(bounds.signal_hi), std::log(bounds.length_hi),
                                      std::log(bounds.noise_hi)));
    auto decode = [](const Vector& z) {
      return KernelParams{std::exp(z(0)), std::exp(z(1)), std::exp(z(2))};
    };
    auto objective = [&](const Vector& z) {
      try
      {
        return GPModel::fit(data, decode(z), targets).log_marginal();
      }
      catch (const NumericalError&)
      {
        return -std::numeric_limits<double>::infinity();
      }
    };

    std::vector<Vector> starts;
    if (warm)
      starts.push_back(log_box.clamp(Eigen::Vector3d(std::log(warm->signal_variance),
                                                     std::log(warm->length_scale),
                                                     std::log(warm->noise_variance))));
    search::Halton halton(3, search.seed);
    while (static_cast<int>(starts.size()) < search.starts)
      starts.push_back(halton.next(log_box));

    auto best = search::multistart(objective, log_box, starts, search.polls, 0.125);
    if (!best)
      throw NumericalError("gaussian hyperparameter fit: every candidate failed to factorize");
    return decode(best->x);
  }
}
