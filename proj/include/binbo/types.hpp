#pragma once

#include "binbo/errors.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace binbo
{
  using Vector = Eigen::VectorXd;
  using Matrix = Eigen::MatrixXd;

  /// Axis-aligned box [lower, upper].
  struct Box
  {
    Vector lower;
    Vector upper;

    Box() = default;
    Box(Vector lo, Vector hi);
    static Box cube(int dim, double lo, double hi);

    int dim() const { return static_cast<int>(lower.size()); }
    bool contains(const Vector& x, double tol = 0.0) const;
    Vector clamp(const Vector& x) const;
    Vector center() const { return 0.5 * (lower + upper); }
    Vector width() const { return upper - lower; }
    double diameter() const { return width().norm(); }
  };

  /// A design point with a binomial success count.
  struct Observation
  {
    Vector x;
    std::int64_t successes = 0;
    std::int64_t trials = 1;

    double fraction() const
    {
      return static_cast<double>(successes) / static_cast<double>(trials);
    }
  };

  struct Dataset
  {
    int dim = 0;
    std::vector<Observation> points;

    explicit Dataset(int d = 0) : dim(d) {}

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    /// Appends after validating the counts and dimension.
    void add(Observation obs);

    Matrix design() const;
    Vector fractions() const;
  };

  void validate_counts(std::int64_t successes, std::int64_t trials);
}
