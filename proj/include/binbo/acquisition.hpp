#pragma once

#include "binbo/surrogate_binomial.hpp"
#include "binbo/surrogate_gaussian.hpp"
#include "binbo/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace binbo::acquisition
{
  using gaussian::GaussianPosterior;
  using binomial::LatentPosterior;

  /// Best observed success fraction and where it was seen.
  struct Incumbent
  {
    double y_min = 1.0;
    Vector x_min;
    std::size_t index = 0;
  };

  struct AcquisitionConfig
  {
    int mc_samples = 1024;
    int restarts = 16;
    int local_steps = 60;
    std::uint64_t seed = 0;

    void validate() const;
  };

  /// Closed-form expected improvement below y_min for a Gaussian posterior.
  double ei_closed(const GaussianPosterior& post, double y_min);

  /*
   * Monte-Carlo EI through the logistic link:
   *   mean_k max(0, y_min - sigmoid(mu + sd z_k)),  z_k ~ N(0, 1) seeded.
   *
   * The standard-normal draws are generated once from the seed and reused
   * for every posterior it is evaluated on (common random numbers), so the
   * estimate is a smooth deterministic function of (mu, sd).
   */
  class MonteCarloEI
  {
  public:
    MonteCarloEI(int samples, std::uint64_t seed);

    double operator()(const LatentPosterior& latent, double y_min) const;

    struct Estimate
    {
      double value = 0.0;
      double standard_error = 0.0;
    };
    Estimate estimate(const LatentPosterior& latent, double y_min) const;

    int samples() const { return static_cast<int>(draws_.size()); }

  private:
    std::vector<double> draws_;
  };

  double ei_mc(const LatentPosterior& latent, double y_min, const AcquisitionConfig& cfg);

  using AcquisitionFn = std::function<double(const Vector&)>;

  /// Multi-start pattern-search maximizer. Starts come from a seeded
  /// scrambled Halton sequence; ties keep the earliest restart.
  Vector optimize_acquisition(const AcquisitionFn& acq, const Box& bounds,
                              const AcquisitionConfig& cfg);
}
