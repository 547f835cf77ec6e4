#include "binbo/search.hpp"

#include "binbo/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace binbo::search
{
  namespace
  {
    constexpr std::array<int, 32> primes = {
      2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
      59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

    double radical_inverse(std::uint64_t index, int base)
    {
      double result = 0.0;
      double scale = 1.0 / base;
      while (index > 0)
      {
        result += static_cast<double>(index % base) * scale;
        index /= base;
        scale /= base;
      }
      return result;
    }
  }

  Halton::Halton(int dim, std::uint64_t seed) : dim_(dim), shift_(dim)
  {
    if (dim < 1 || dim > static_cast<int>(primes.size()))
      throw InvalidInput("Halton: dimension must be in [1, 32]");
    Rng rng(seed);
    for (auto& s : shift_)
      s = rng.uniform();
  }

  Vector Halton::next(const Box& box)
  {
    if (box.dim() != dim_)
      throw InvalidInput("Halton::next: box dimension mismatch");
    Vector x(dim_);
    for (int j = 0; j < dim_; ++j)
    {
      double u = radical_inverse(index_, primes[j]) + shift_[j];
      u -= std::floor(u);
      x(j) = box.lower(j) + u * (box.upper(j) - box.lower(j));
    }
    ++index_;
    return x;
  }

  std::optional<SearchResult> pattern_search(const Objective& objective,
                                             const Box& box,
                                             const Vector& start,
                                             int polls,
                                             double initial_step_fraction,
                                             double min_step_fraction)
  {
    constexpr double failed = -std::numeric_limits<double>::infinity();
    auto evaluate = [&](const Vector& x) {
      const double v = objective(x);
      return std::isfinite(v) ? v : failed;
    };

    SearchResult result;
    result.x = box.clamp(start);
    result.value = evaluate(result.x);
    result.evaluations = 1;

    const Vector width = box.width();
    Vector step = initial_step_fraction * width;
    const int dim = box.dim();

    for (int poll = 0; poll < polls; ++poll)
    {
      if ((step.array() <= min_step_fraction * width.array()).all())
        break;

      Vector best_x;
      double best_value = result.value;
      for (int j = 0; j < dim; ++j)
      {
        for (double sign : {1.0, -1.0})
        {
          Vector probe = result.x;
          probe(j) = std::clamp(probe(j) + sign * step(j), box.lower(j), box.upper(j));
          if (probe(j) == result.x(j))
            continue;
          const double v = evaluate(probe);
          ++result.evaluations;
          if (v > best_value)
          {
            best_value = v;
            best_x = std::move(probe);
          }
        }
      }
      if (best_x.size() > 0)
      {
        result.x = std::move(best_x);
        result.value = best_value;
      }
      else
      {
        step *= 0.5;
      }
    }

    if (result.value == failed)
      return std::nullopt;
    return result;
  }

  std::optional<SearchResult> multistart(const Objective& objective,
                                         const Box& box,
                                         const std::vector<Vector>& starts,
                                         int polls,
                                         double initial_step_fraction)
  {
    std::optional<SearchResult> best;
    int evaluations = 0;
    for (const auto& start : starts)
    {
      auto r = pattern_search(objective, box, start, polls, initial_step_fraction);
      if (!r)
        continue;
      evaluations += r->evaluations;
      if (!best || r->value > best->value)
        best = std::move(r);
    }
    if (best)
      best->evaluations = evaluations;
    return best;
  }
}
