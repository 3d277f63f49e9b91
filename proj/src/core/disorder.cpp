#include "core/disorder.hpp"

#include <cmath>
#include <random>

#include "core/constants.hpp"
#include "core/entanglement.hpp"
#include "core/parallel.hpp"
#include "core/spectra.hpp"

namespace combent::disorder {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

// Box-Muller over explicit 53-bit uniforms; std::normal_distribution is not
// specified bit-identically across standard libraries.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t stream_seed) : rng_(stream_seed) {}

  double normal(double mean, double stddev) {
    const double u1 = ((rng_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = (rng_() >> 11) * 0x1.0p-53;        // [0, 1)
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  /// Rate draw: rejects non-positive magnitudes, resampling instead of
  /// clamping. A negative mean keeps its sign and varies in magnitude; a
  /// zero mean is a degenerate distribution and stays frozen.
  double rate_normal(double mean, double sigma_rel) {
    if (mean == 0.0 || sigma_rel == 0.0) return mean;
    const double sign = mean < 0.0 ? -1.0 : 1.0;
    const double mag = std::fabs(mean);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double x = normal(mag, sigma_rel * mag);
      if (x > 0.0) return sign * x;
    }
    throw NumericError("disorder: rejection sampling failed to produce a positive rate");
  }

 private:
  std::mt19937_64 rng_;
};

std::uint64_t stream_seed(std::uint64_t seed, std::uint32_t sample) {
  std::uint64_t state = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(sample) + 1);
  return splitmix64(state);
}

}  // namespace

std::vector<SystemConfig> sample_configs(const SystemConfig& base, const DisorderSpec& spec) {
  if (spec.sigma_rel < 0.0)
    throw ValidationError("disorder.sigma_rel: must be >= 0");
  if (spec.sigma_rel >= 0.5)
    throw ValidationError("disorder.sigma_rel: must be < 0.5 (rejection regime)");
  if (spec.samples < 1) throw ValidationError("disorder.samples: must be >= 1");

  std::vector<SystemConfig> out(spec.samples, base);
  if (spec.sigma_rel == 0.0) return out;
  for (std::uint32_t s = 0; s < spec.samples; ++s) {
    NormalStream stream(stream_seed(spec.seed, s));
    for (auto& mode : out[s].modes) {
      if (spec.vary_g) mode.g = stream.rate_normal(mode.g, spec.sigma_rel);
      if (spec.vary_kappa_e)
        mode.kappa_e = stream.rate_normal(mode.kappa_e, spec.sigma_rel);
    }
    validate(out[s]);
  }
  return out;
}

EnsembleStats ensemble_variance(const SystemConfig& base, const DisorderSpec& spec,
                                std::span<const double> omega_grid, double theta) {
  if (omega_grid.empty()) throw ValidationError("ensemble_variance: empty omega grid");
  const int m = base.mode_count();
  if (m < 2) throw ValidationError("ensemble_variance: requires at least two modes");

  std::vector<SystemConfig> samples = sample_configs(base, spec);
  for (auto& cfg : samples) cfg.theta = theta;

  EnsembleStats stats;
  stats.theta = theta;
  stats.omega_grid.assign(omega_grid.begin(), omega_grid.end());
  for (int j = 0; j < m; ++j)
    for (int l = j + 1; l < m; ++l) stats.pairs.emplace_back(j, l);
  const std::size_t pairs = stats.pairs.size();
  const std::size_t grid = omega_grid.size();

  stats.traces.assign(samples.size(),
                      std::vector<std::vector<double>>(pairs, std::vector<double>(grid)));
  // flatten (sample, omega) for parallel evaluation into disjoint slots
  parallel_for(samples.size() * grid, [&](std::size_t task) {
    const std::size_t s = task / grid;
    const std::size_t i = task % grid;
    const spectra::CorrelationBasis basis(samples[s], omega_grid[i]);
    for (std::size_t p = 0; p < pairs; ++p)
      stats.traces[s][p][i] =
          entanglement::duan_variance(basis, stats.pairs[p].first, stats.pairs[p].second);
  });

  stats.min_v.assign(pairs, std::vector<double>(grid));
  stats.max_v.assign(pairs, std::vector<double>(grid));
  stats.mean_v.assign(pairs, std::vector<double>(grid));
  for (std::size_t p = 0; p < pairs; ++p) {
    for (std::size_t i = 0; i < grid; ++i) {
      double lo = stats.traces[0][p][i], hi = lo, sum = 0.0;
      for (std::size_t s = 0; s < samples.size(); ++s) {
        const double v = stats.traces[s][p][i];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
      }
      stats.min_v[p][i] = lo;
      stats.max_v[p][i] = hi;
      stats.mean_v[p][i] = sum / static_cast<double>(samples.size());
    }
  }
  return stats;
}

}  // namespace combent::disorder
