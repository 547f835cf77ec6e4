#include "binbo/types.hpp"

#include <string>

namespace binbo
{
  Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi))
  {
    if (lower.size() != upper.size() || lower.size() == 0)
      throw InvalidInput("Box: bounds must be non-empty and of equal length");
    if ((lower.array() > upper.array()).any() || !lower.allFinite() || !upper.allFinite())
      throw InvalidInput("Box: need finite lower <= upper on every axis");
  }

  Box Box::cube(int dim, double lo, double hi)
  {
    return Box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
  }

  bool Box::contains(const Vector& x, double tol) const
  {
    if (x.size() != lower.size())
      return false;
    return ((x.array() >= lower.array() - tol) && (x.array() <= upper.array() + tol)).all();
  }

  Vector Box::clamp(const Vector& x) const
  {
    return x.cwiseMax(lower).cwiseMin(upper);
  }

  void validate_counts(std::int64_t successes, std::int64_t trials)
  {
    if (trials < 1)
      throw InvalidInput("trial count must be >= 1, got " + std::to_string(trials));
    if (successes < 0 || successes > trials)
      throw InvalidInput("success count " + std::to_string(successes)
                         + " outside [0, " + std::to_string(trials) + "]");
  }

  void Dataset::add(Observation obs)
  {
    if (obs.x.size() != dim)
      throw InvalidInput("Dataset::add: point has dimension " + std::to_string(obs.x.size())
                         + ", expected " + std::to_string(dim));
    validate_counts(obs.successes, obs.trials);
    points.push_back(std::move(obs));
  }

  Matrix Dataset::design() const
  {
    Matrix X(static_cast<Eigen::Index>(points.size()), dim);
    for (std::size_t i = 0; i < points.size(); ++i)
      X.row(static_cast<Eigen::Index>(i)) = points[i].x.transpose();
    return X;
  }

  Vector Dataset::fractions() const
  {
    Vector y(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i)
      y(static_cast<Eigen::Index>(i)) = points[i].fraction();
    return y;
  }
}
