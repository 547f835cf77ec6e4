#include "binbo/acquisition.hpp"

#include "binbo/random.hpp"
#include "binbo/search.hpp"
#include "binbo/special.hpp"

#include <cmath>

namespace binbo::acquisition
{
  void AcquisitionConfig::validate() const
  {
    if (mc_samples < 1)
      throw InvalidInput("AcquisitionConfig: mc_samples must be positive");
    if (restarts < 1)
      throw InvalidInput("AcquisitionConfig: restarts must be positive");
    if (local_steps < 1)
      throw InvalidInput("AcquisitionConfig: local_steps must be positive");
  }

  double ei_closed(const GaussianPosterior& post, double y_min)
  {
    const double improvement = y_min - post.mean;
    const double sigma = std::sqrt(std::max(0.0, post.variance));
    if (sigma == 0.0)
      return std::max(0.0, improvement);
    const double z = improvement / sigma;
    const double ei = improvement * special::normal_cdf(z) + sigma * special::normal_pdf(z);
    return std::max(0.0, ei);
  }

  MonteCarloEI::MonteCarloEI(int samples, std::uint64_t seed)
  {
    if (samples < 1)
      throw InvalidInput("MonteCarloEI: need at least one sample");
    Rng rng(seed);
    draws_.resize(static_cast<std::size_t>(samples));
    for (auto& z : draws_)
      z = rng.normal();
  }

  MonteCarloEI::Estimate MonteCarloEI::estimate(const LatentPosterior& latent, double y_min) const
  {
    if (y_min <= 0.0)
      return {};
    const double sd = std::sqrt(std::max(0.0, latent.variance));
    if (sd == 0.0)
      return {std::max(0.0, y_min - binomial::inverse_link(latent.mean)), 0.0};
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double z : draws_)
    {
      const double gain = std::max(0.0, y_min - binomial::inverse_link(latent.mean + sd * z));
      sum += gain;
      sum_sq += gain * gain;
    }
    const double n = static_cast<double>(draws_.size());
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n)};
  }

  double MonteCarloEI::operator()(const LatentPosterior& latent, double y_min) const
  {
    return estimate(latent, y_min).value;
  }

  double ei_mc(const LatentPosterior& latent, double y_min, const AcquisitionConfig& cfg)
  {
    return MonteCarloEI(cfg.mc_samples, cfg.seed)(latent, y_min);
  }

  Vector optimize_acquisition(const AcquisitionFn& acq, const Box& bounds,
                              const AcquisitionConfig& cfg)
  {
    cfg.validate();
    if (((bounds.upper - bounds.lower).array() <= 0.0).any())
      throw InvalidInput("optimize_acquisition: bounds are degenerate");

    search::Halton halton(bounds.dim(), derive_seed(cfg.seed, "acquisition-starts"));
    std::vector<Vector> starts;
    starts.reserve(static_cast<std::size_t>(cfg.restarts));
    for (int r = 0; r < cfg.restarts; ++r)
      starts.push_back(halton.next(bounds));

    auto best = search::multistart(acq, bounds, starts, cfg.local_steps);
    if (!best)
      throw NumericalError("optimize_acquisition: acquisition was non-finite at every probe");
    return bounds.clamp(best->x);
  }
}
