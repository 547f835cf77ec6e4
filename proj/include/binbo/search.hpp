#pragma once

#include "binbo/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace binbo::search
{
  using Objective = std::function<double(const Vector&)>;

  /// Scrambled Halton sequence: radical inverse per prime base plus a
  /// seeded Cranley-Patterson shift, mapped into the box.
  class Halton
  {
  public:
    Halton(int dim, std::uint64_t seed);
    Vector next(const Box& box);

  private:
    int dim_;
    std::uint64_t index_ = 1;
    std::vector<double> shift_;
  };

  struct SearchResult
  {
    Vector x;
    double value = 0.0;
    int evaluations = 0;
  };

  /*
   * Compass (coordinate pattern) search maximizing `objective` inside `box`.
   *
   * Each poll tries +/- step along every coordinate, moves to the best
   * strictly improving probe and otherwise halves the step. Probes are
   * clamped to the box. Non-finite values are treated as failures. Returns
   * nullopt only if every probe including the start was non-finite.
   */
  std::optional<SearchResult> pattern_search(const Objective& objective,
                                             const Box& box,
                                             const Vector& start,
                                             int polls,
                                             double initial_step_fraction = 0.25,
                                             double min_step_fraction = 1e-7);

  /// Maximizes over several starts; ties keep the lower start index.
  std::optional<SearchResult> multistart(const Objective& objective,
                                         const Box& box,
                                         const std::vector<Vector>& starts,
                                         int polls,
                                         double initial_step_fraction = 0.25);
}
