#pragma once

#include <complex>
#include <random>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace testutil {

// Randomized configs matching the regime the formulas target: unresolved
// sideband, couplings up to 0.5 Omega_m, detunings up to the linewidth.
struct ConfigSampler {
  std::mt19937_64 rng;
  explicit ConfigSampler(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }

  combent::SystemConfig random_config(int m, bool with_detuning = true,
                                      bool with_thermal_photons = false) {
    combent::SystemConfig cfg;
    cfg.mech.omega_m = 0.1;
    cfg.mech.gamma_m = cfg.mech.omega_m / 1e6;
    cfg.mech.n_th = uniform(0.0, 1e4);
    cfg.theta = uniform(-3.14159265358979, 3.14159265358979);
    for (int j = 0; j < m; ++j) {
      combent::ModeParams mode;
      mode.kappa_i = uniform(0.0, 0.3);
      mode.kappa_e = 1.0 - mode.kappa_i;
      mode.delta = with_detuning ? uniform(-1.0, 1.0) : 0.0;
      mode.g = uniform(0.0, 0.5 * cfg.mech.omega_m);
      mode.n_o = with_thermal_photons ? uniform(0.0, 2.0) : 0.0;
      cfg.modes.push_back(mode);
    }
    return cfg;
  }
};

inline combent::SystemConfig identical_config(int m, double g_over_om, double omega_m = 0.1,
                                              double q_m = 1e6, double n_th = 1e3,
                                              double kappa_e = 1.0, double kappa_i = 0.0,
                                              double theta = 0.0) {
  combent::SystemConfig cfg;
  cfg.mech.omega_m = omega_m;
  cfg.mech.gamma_m = omega_m / q_m;
  cfg.mech.n_th = n_th;
  cfg.theta = theta;
  combent::ModeParams mode;
  mode.kappa_e = kappa_e;
  mode.kappa_i = kappa_i;
  mode.g = g_over_om * omega_m;
  cfg.modes.assign(m, mode);
  return cfg;
}

inline std::string fig1b_json() {
  return R"({
    "unit": "dimensionless",
    "theta": 0.7853981633974483,
    "mechanical": {"omega_m": 0.1, "q_m": 1e6, "n_th": 1000},
    "modes": [
      {"delta": 0, "kappa_e": 1.0, "kappa_i": 0.0, "g": 0.03},
      {"delta": 0, "kappa_e": 1.0, "kappa_i": 0.0, "g": 0.03}
    ]
  })";
}

inline bool close(double a, double b, double rel, double abs_floor = 0.0) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= std::max(rel * scale, abs_floor);
}

inline bool close(std::complex<double> a, std::complex<double> b, double rel,
                  double abs_floor = 0.0) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= std::max(rel * scale, abs_floor);
}

}  // namespace testutil
