#include "binbo/surrogate_binomial.hpp"

#include "binbo/search.hpp"
#include "binbo/special.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace binbo::binomial
{
  double inverse_link(double f) { return special::sigmoid(f); }

  LogLikTerms binom_loglik(double f, std::int64_t y, std::int64_t N)
  {
    validate_counts(y, N);
    const double p = special::sigmoid(f);
    const double n = static_cast<double>(N);
    LogLikTerms t;
    t.value = static_cast<double>(y) * f - n * special::softplus(f)
      + special::log_binomial_coefficient(N, y);
    t.grad = static_cast<double>(y) - n * p;
    // p(1 - p) = sigmoid(f) sigmoid(-f) keeps precision in both tails.
    t.neg_hess = n * p * special::sigmoid(-f);
    return t;
  }

  namespace
  {
    struct LikSums
    {
      double value = 0.0;
      Vector grad;
      Vector neg_hess;
    };

    LikSums likelihood(const Dataset& data, const Vector& f)
    {
      const auto n = f.size();
      LikSums s{0.0, Vector(n), Vector(n)};
      for (Eigen::Index i = 0; i < n; ++i)
      {
        const auto& obs = data.points[static_cast<std::size_t>(i)];
        const auto t = binom_loglik(f(i), obs.successes, obs.trials);
        s.value += t.value;
        s.grad(i) = t.grad;
        s.neg_hess(i) = t.neg_hess;
      }
      return s;
    }

    Eigen::LLT<Matrix> factor_b(const Matrix& K, const Vector& sqrt_w)
    {
      Matrix B = sqrt_w.asDiagonal() * K * sqrt_w.asDiagonal();
      B.diagonal().array() += 1.0;
      Eigen::LLT<Matrix> llt(B);
      if (llt.info() != Eigen::Success)
        throw NumericalError("laplace_fit: factorization of I + W^1/2 K W^1/2 failed");
      return llt;
    }
  }

  LaplaceModel LaplaceModel::fit(const Dataset& data,
                                 const KernelParams& params,
                                 const Vector& warm_latent,
                                 const NewtonSettings& settings)
  {
    params.validate();
    for (const auto& obs : data.points)
      validate_counts(obs.successes, obs.trials);

    LaplaceModel m;
    m.params_ = params;
    m.params_.noise_variance = 0.0;
    m.data_ = data;
    m.X_ = data.design();
    const auto n = static_cast<Eigen::Index>(data.size());
    if (n == 0)
    {
      m.latent_ = m.alpha_ = m.W_ = m.sqrt_W_ = Vector(0);
      m.converged_ = true;
      m.history_.push_back(0.0);
      return m;
    }

    Matrix K = gaussian::kernel_matrix(m.params_, m.X_, m.X_);
    auto kfac = gaussian::jittered_cholesky(K, 0.0, m.params_.signal_variance);
    m.jitter_ = kfac.jitter;
    K.diagonal().array() += m.jitter_;

    Vector a = Vector::Zero(n);
    Vector f = Vector::Zero(n);
    if (warm_latent.size() == n && warm_latent.allFinite())
    {
      a = kfac.llt.solve(warm_latent);
      f = K * a;
    }

    auto lik = likelihood(data, f);
    double psi = lik.value - 0.5 * a.dot(f);
    // A warm start that is worse than the prior mode is discarded.
    if (warm_latent.size() == n)
    {
      const auto zero = likelihood(data, Vector::Zero(n));
      if (!(psi >= zero.value))
      {
        a.setZero();
        f.setZero();
        lik = zero;
        psi = zero.value;
      }
    }
    m.history_.push_back(psi);

    const double tol = settings.tolerance * std::sqrt(static_cast<double>(n));
    int iter = 0;
    bool converged = false;
    for (; iter < settings.max_iter; ++iter)
    {
      if ((lik.grad - a).norm() <= tol)
      {
        converged = true;
        break;
      }
      const Vector sqrt_w = lik.neg_hess.cwiseSqrt();
      const auto llt = factor_b(K, sqrt_w);
      const Vector b = lik.neg_hess.cwiseProduct(f) + lik.grad;
      const Vector c = llt.solve(sqrt_w.cwiseProduct(K * b));
      const Vector direction = b - sqrt_w.cwiseProduct(c) - a;

      double step = 1.0;
      bool accepted = false;
      for (int h = 0; h <= settings.max_halvings; ++h, step *= 0.5)
      {
        const Vector a_try = a + step * direction;
        const Vector f_try = K * a_try;
        auto lik_try = likelihood(data, f_try);
        const double psi_try = lik_try.value - 0.5 * a_try.dot(f_try);
        if (std::isfinite(psi_try) && psi_try >= psi)
        {
          a = a_try;
          f = f_try;
          lik = std::move(lik_try);
          psi = psi_try;
          accepted = true;
          break;
        }
      }
      if (!accepted)
        break;
      m.history_.push_back(psi);
    }
    if (!converged)
      converged = (lik.grad - a).norm() <= tol;

    m.latent_ = f;
    m.alpha_ = a;
    m.W_ = lik.neg_hess;
    m.sqrt_W_ = lik.neg_hess.cwiseSqrt();
    m.llt_ = factor_b(K, m.sqrt_W_);
    m.loglik_ = lik.value;
    m.grad_norm_ = (lik.grad - a).norm();
    m.converged_ = converged;
    m.iters_ = iter;
    return m;
  }

  void LaplaceModel::require_converged(const char* op) const
  {
    if (!converged_)
      throw StateError(std::string(op) + ": Laplace model did not converge (gradient norm "
                       + std::to_string(grad_norm_) + " after "
                       + std::to_string(iters_) + " Newton iterations)");
  }

  LatentPosterior LaplaceModel::predict_latent(const Vector& x_star) const
  {
    require_converged("laplace_predict_latent");
    if (x_star.size() != data_.dim)
      throw InvalidInput("laplace_predict_latent: point dimension mismatch");
    const double prior = params_.signal_variance;
    if (data_.empty())
      return {0.0, prior};
    const Vector k = gaussian::kernel_vector(params_, X_, x_star);
    const Vector v = llt_.matrixL().solve(sqrt_W_.cwiseProduct(k));
    return {k.dot(alpha_), std::max(0.0, prior - v.squaredNorm())};
  }

  double expected_success_prob(const LatentPosterior& latent)
  {
    if (latent.variance <= 0.0)
      return inverse_link(latent.mean);
    return special::gaussian_expectation(inverse_link, latent.mean, latent.variance, 32);
  }

  double LaplaceModel::predict_success_prob(const Vector& x_star) const
  {
    return expected_success_prob(predict_latent(x_star));
  }

  double LaplaceModel::log_marginal() const
  {
    require_converged("laplace_log_marginal");
    if (data_.empty())
      return 0.0;
    const double half_log_det_b = Matrix(llt_.matrixL()).diagonal().array().log().sum();
    return loglik_ - 0.5 * alpha_.dot(latent_) - half_log_det_b;
  }

  KernelParams fit_hyperparameters(const Dataset& data,
                                   const gaussian::HyperBounds& bounds,
                                   const gaussian::HyperSearch& search,
                                   const std::optional<KernelParams>& warm)
  {
    const Box log_box(Eigen::Vector2d(std::log(bounds.signal_lo), std::log(bounds.length_lo)),
                      Eigen::Vector2d(std::log(bounds.signal_hi), std::log(bounds.length_hi)));
    auto decode = [](const Vector& z) {
      return KernelParams{std::exp(z(0)), std::exp(z(1)), 0.0};
    };

    // Consecutive probes are close in hyperparameter space, so the last
    // mode is a good Newton seed.
    Vector last_mode;
    auto objective = [&](const Vector& z) {
      try
      {
        auto model = LaplaceModel::fit(data, decode(z), last_mode);
        if (!model.converged())
          return -std::numeric_limits<double>::infinity();
        last_mode = model.latent_mode();
        return model.log_marginal();
      }
      catch (const NumericalError&)
      {
        return -std::numeric_limits<double>::infinity();
      }
    };

    std::vector<Vector> starts;
    if (warm)
      starts.push_back(log_box.clamp(Eigen::Vector2d(std::log(warm->signal_variance),
                                                     std::log(warm->length_scale))));
    search::Halton halton(2, search.seed);
    while (static_cast<int>(starts.size()) < search.starts)
      starts.push_back(halton.next(log_box));

    auto best = search::multistart(objective, log_box, starts, search.polls, 0.125);
    if (!best)
      throw NumericalError("binomial hyperparameter fit: no candidate converged");
    return decode(best->x);
  }
}
