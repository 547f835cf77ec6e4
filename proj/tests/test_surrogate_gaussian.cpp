#include "binbo/random.hpp"
#include "binbo/surrogate_gaussian.hpp"

#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace binbo;
using namespace binbo::gaussian;

namespace
{
  Dataset make_data(const Matrix& X)
  {
    Dataset d(static_cast<int>(X.cols()));
    for (int i = 0; i < X.rows(); ++i)
      d.add({X.row(i).transpose(), 0, 1});
    return d;
  }

  Matrix random_points(Rng& rng, int n, int dim, double lo = -2.0, double hi = 2.0)
  {
    Matrix X(n, dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < dim; ++j)
        X(i, j) = rng.uniform(lo, hi);
    return X;
  }
}

TEST_CASE("kernel_eval substitution cases")
{
  const KernelParams unit{1.0, 1.0, 0.0};
  const Eigen::Vector2d a(0.3, -1.0);
  CHECK(kernel_eval(unit, a, a) == 1.0);
  CHECK(kernel_eval(unit, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1))
        == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(kernel_eval({2.5, 0.5, 0.0}, Vector::Zero(1), Vector::Ones(1))
        == doctest::Approx(2.5 * std::exp(-2.0)).epsilon(1e-15));
  // noise never enters the kernel itself
  CHECK(kernel_eval({1.0, 1.0, 0.7}, a, a) == 1.0);
  CHECK_THROWS_AS(kernel_eval(unit, Vector::Zero(2), Vector::Zero(3)), InvalidInput);
}

TEST_CASE("kernel symmetry and Gram positive semi-definiteness")
{
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial)
  {
    const KernelParams p{rng.uniform(0.1, 3.0), rng.uniform(0.05, 2.0), 0.0};
    const int n = 1 + static_cast<int>(rng.below(20));
    const Matrix X = random_points(rng, n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(kernel_eval(p, X.row(i).transpose(), X.row(j).transpose())
              == kernel_eval(p, X.row(j).transpose(), X.row(i).transpose()));
    const Matrix K = kernel_matrix(p, X, X);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(K);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("invalid kernel parameters are rejected")
{
  CHECK_THROWS_AS((KernelParams{0.0, 1.0, 0.0}.validate()), InvalidInput);
  CHECK_THROWS_AS((KernelParams{1.0, -1.0, 0.0}.validate()), InvalidInput);
  CHECK_THROWS_AS((KernelParams{1.0, 1.0, -1e-3}.validate()), InvalidInput);
  CHECK_THROWS_AS((KernelParams{NAN, 1.0, 0.0}.validate()), InvalidInput);
}

TEST_CASE("single point Gram and evidence")
{
  const KernelParams p{1.3, 0.4, 0.2};
  Dataset d(1);
  d.add({Vector::Constant(1, 0.5), 0, 1});
  const auto m = GPModel::fit(d, p, Vector::Zero(1));
  const double g = 1.3 + 0.2 + m.jitter();
  CHECK(m.jitter() == doctest::Approx(1e-10 * 1.3));
  CHECK(m.chol()(0, 0) * m.chol()(0, 0) == doctest::Approx(g).epsilon(1e-15));
  CHECK(m.log_marginal() == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi * g)).epsilon(1e-14));

  const auto m1 = GPModel::fit(d, {0.6, 1.0, 0.4}, Vector::Ones(1));
  CHECK(m1.log_marginal() == doctest::Approx(-0.5 - 0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-9));
}

TEST_CASE("duplicated point without noise factorizes with jitter")
{
  Dataset d(1);
  d.add({Vector::Zero(1), 0, 1});
  d.add({Vector::Zero(1), 0, 1});
  const auto m = GPModel::fit(d, {1.0, 1.0, 0.0}, Eigen::Vector2d(0.2, 0.2));
  CHECK(m.jitter() >= 1e-10);
  Matrix K = kernel_matrix(m.params(), m.design(), m.design());
  K.diagonal().array() += m.jitter();
  const Matrix L = m.chol();
  CHECK((L * L.transpose() - K).norm() / K.norm() <= 1e-8);
}

TEST_CASE("jitter escalates on a barely indefinite matrix and gives up on a badly indefinite one")
{
  // smallest eigenvalue -1e-8: needs jitter > 1e-8
  Eigen::Matrix2d K;
  K << 1.0, 1.0 + 1e-8, 1.0 + 1e-8, 1.0;
  const auto f = jittered_cholesky(K, 0.0, 1.0);
  CHECK(f.jitter == doctest::Approx(1e-7));

  Eigen::Matrix2d bad;
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_WITH_AS(jittered_cholesky(bad, 0.0, 1.0), doctest::Contains("ill-conditioned"), NumericalError);
}

TEST_CASE("two-point model matches closed-form 2x2 algebra")
{
  // x = 0, 1; y = 0, 1; sf2 = 1, theta = 1, sn2 = 0.1
  Dataset d(1);
  d.add({Vector::Constant(1, 0.0), 0, 1});
  d.add({Vector::Constant(1, 1.0), 0, 1});
  const Eigen::Vector2d y(0.0, 1.0);
  const auto m = GPModel::fit(d, {1.0, 1.0, 0.1}, y);

  const double diag = 1.0 + 0.1 + m.jitter();
  const double off = std::exp(-0.5);
  const double det = diag * diag - off * off;
  // inverse of [[diag, off], [off, diag]] applied to y
  const Eigen::Vector2d alpha((diag * y(0) - off * y(1)) / det, (-off * y(0) + diag * y(1)) / det);
  CHECK(std::fabs(m.alpha()(0) - alpha(0)) <= 1e-12);
  CHECK(std::fabs(m.alpha()(1) - alpha(1)) <= 1e-12);

  const double k = std::exp(-0.125);  // both points at distance 0.5 from x* = 0.5
  const Eigen::Vector2d ks(k, k);
  const double mean = ks.dot(alpha);
  const double var = 1.0 - (ks(0) * (diag * ks(0) - off * ks(1)) + ks(1) * (-off * ks(0) + diag * ks(1))) / det;
  const auto post = m.predict(Vector::Constant(1, 0.5));
  CHECK(std::fabs(post.mean - mean) <= 1e-12);
  CHECK(std::fabs(post.variance - var) <= 1e-12);
}

TEST_CASE("noise-free interpolation and prior reversion")
{
  Rng rng(3);
  const Matrix X = random_points(rng, 6, 2);
  const auto d = make_data(X);
  Vector y(6);
  for (int i = 0; i < 6; ++i)
    y(i) = rng.uniform(-1, 1);
  const KernelParams p{0.8, 0.7, 0.0};
  const auto m = GPModel::fit(d, p, y);
  for (int i = 0; i < 6; ++i)
  {
    const auto post = m.predict(X.row(i).transpose());
    CHECK(std::fabs(post.mean - y(i)) <= 1e-8);
    CHECK(post.variance <= 1e-8);
  }
  const auto far = m.predict(Eigen::Vector2d(100.0, -100.0));
  CHECK(std::fabs(far.mean) <= 1e-6);
  CHECK(std::fabs(far.variance - 0.8) <= 1e-6);
  CHECK_THROWS_AS(m.predict(Vector::Zero(3)), InvalidInput);
}

TEST_CASE("empty dataset predicts the prior")
{
  const auto m = GPModel::fit(Dataset(2), {1.7, 1.0, 0.1}, Vector(0));
  const auto post = m.predict(Eigen::Vector2d(0.3, 0.3));
  CHECK(post.mean == 0.0);
  CHECK(post.variance == 1.7);
}

TEST_CASE("posterior and evidence match a dense-inverse oracle")
{
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial)
  {
    const int dim = 1 + static_cast<int>(rng.below(3));
    const int n = 1 + static_cast<int>(rng.below(10));
    const Matrix X = random_points(rng, n, dim);
    Vector y(n);
    for (int i = 0; i < n; ++i)
      y(i) = rng.uniform(-1, 1);
    const KernelParams p{rng.uniform(0.2, 2.0), rng.uniform(0.3, 2.0), rng.uniform(0.01, 0.5)};
    const auto m = GPModel::fit(make_data(X), p, y);

    Matrix Ky = oracle::se_gram(X, X, p.signal_variance, p.length_scale);
    Ky.diagonal().array() += p.noise_variance + m.jitter();
    const Matrix Kinv = Ky.inverse();
    const double lml = -0.5 * y.dot(Kinv * y) - 0.5 * std::log(Ky.determinant())
      - 0.5 * n * std::log(2.0 * std::numbers::pi);
    CHECK(std::fabs(m.log_marginal() - lml) <= 1e-8);

    for (int q = 0; q < 5; ++q)
    {
      const Matrix xs = random_points(rng, 1, dim);
      const Vector k = oracle::se_gram(X, xs, p.signal_variance, p.length_scale).col(0);
      const auto post = m.predict(xs.row(0).transpose());
      CHECK(std::fabs(post.mean - k.dot(Kinv * y)) <= 1e-8);
      CHECK(std::fabs(post.variance - std::max(0.0, p.signal_variance - k.dot(Kinv * k))) <= 1e-8);
      CHECK(post.variance <= p.signal_variance + 1e-8);
    }

    const Matrix L = m.chol();
    CHECK((L * L.transpose() - Ky).norm() / Ky.norm() <= 1e-8);
  }
}

TEST_CASE("adding an observation never increases the posterior variance")
{
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial)
  {
    const int n = 1 + static_cast<int>(rng.below(8));
    const Matrix X = random_points(rng, n + 1, 2);
    const KernelParams p{1.0, rng.uniform(0.3, 1.5), rng.uniform(0.01, 0.3)};
    const auto small = GPModel::fit(make_data(X.topRows(n)), p, Vector::Zero(n));
    const auto big = GPModel::fit(make_data(X), p, Vector::Zero(n + 1));
    for (int q = 0; q < 10; ++q)
    {
      const Vector xs = random_points(rng, 1, 2).row(0).transpose();
      CHECK(big.predict(xs).variance <= small.predict(xs).variance + 1e-12);
    }
  }
}

TEST_CASE("hyperparameter fit stays in bounds and beats the default")
{
  Rng rng(21);
  const Box box = Box::cube(1, 0.0, 4.0);
  Dataset d(1);
  Vector y(15);
  for (int i = 0; i < 15; ++i)
  {
    const double x = rng.uniform(0, 4);
    d.add({Vector::Constant(1, x), 0, 1});
    y(i) = std::sin(2.0 * x) * 0.3 + 0.05 * rng.normal();
  }
  const auto bounds = HyperBounds::for_box(box);
  const auto p = fit_hyperparameters(d, y, bounds, {8, 20, 1});
  CHECK(p.signal_variance >= bounds.signal_lo * (1 - 1e-12));
  CHECK(p.signal_variance <= bounds.signal_hi * (1 + 1e-12));
  CHECK(p.length_scale >= bounds.length_lo * (1 - 1e-12));
  CHECK(p.length_scale <= bounds.length_hi * (1 + 1e-12));
  CHECK(p.noise_variance <= bounds.noise_hi * (1 + 1e-12));
  const double fitted = GPModel::fit(d, p, y).log_marginal();
  const double naive = GPModel::fit(d, {1.0, 1.0, 0.1}, y).log_marginal();
  CHECK(fitted >= naive);
  // same seed, same answer
  const auto again = fit_hyperparameters(d, y, bounds, {8, 20, 1});
  CHECK(again.length_scale == p.length_scale);
}
