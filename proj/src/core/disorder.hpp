#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace combent::disorder {

struct DisorderSpec {
  double sigma_rel = 0.0;     // relative standard deviation, must be < 0.5
  std::uint64_t seed = 0;
  std::uint32_t samples = 1;
  bool vary_g = true;         // draw G_j per mode
  bool vary_kappa_e = true;   // draw kappa_e,j per mode
};

/// S copies of base with the targeted parameters drawn independently per mode
/// from Normal(mean, (sigma_rel * mean)^2). Non-positive draws are rejected
/// and resampled (a zero mean is degenerate and kept as-is). Sample s gets
/// its own counter-derived stream, so the list is reproducible regardless of
/// evaluation order.
std::vector<SystemConfig> sample_configs(const SystemConfig& base, const DisorderSpec& spec);

struct EnsembleStats {
  std::vector<std::pair<int, int>> pairs;       // (j, l) with j < l
  std::vector<double> omega_grid;
  double theta = 0.0;
  // [pair][omega] aggregates over samples
  std::vector<std::vector<double>> min_v, max_v, mean_v;
  // [sample][pair][omega]
  std::vector<std::vector<std::vector<double>>> traces;
};

/// Full-route V_jl per disorder sample, aggregated per pair and grid point.
/// Deterministic for fixed (base, spec, grid) bit for bit.
EnsembleStats ensemble_variance(const SystemConfig& base, const DisorderSpec& spec,
                                std::span<const double> omega_grid, double theta);

/// SplitMix64 step; used to derive per-sample stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace combent::disorder
