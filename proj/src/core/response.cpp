#include "core/response.hpp"

#include <cmath>

#include "core/constants.hpp"

namespace combent::response {

namespace {
constexpr cd kI{0.0, 1.0};
}

cd chi_cavity(double delta, double kappa, double omega) {
  return 1.0 / (kI * (delta - omega) + kappa);
}

static cd self_energy(const SystemConfig& cfg, double omega) {
  cd sum = 0.0;
  for (const auto& m : cfg.modes) {
    const double k = m.kappa();
    sum += m.g * m.g *
           (chi_cavity(m.delta, k, omega) - std::conj(chi_cavity(m.delta, k, -omega)));
  }
  return sum;
}

cd chi_mech(const SystemConfig& cfg, double omega) {
  const cd p = kI * (cfg.mech.omega_m - omega) + cfg.mech.gamma_m;
  const cd m = -kI * (cfg.mech.omega_m + omega) + cfg.mech.gamma_m;
  const cd sig = self_energy(cfg, omega);
  return m / (p * m + (m - p) * sig);
}

cd f_mech(const SystemConfig& cfg, double omega) {
  return std::conj(chi_mech(cfg, -omega)) - chi_mech(cfg, omega);
}

cd zeta(const ModeParams& mode, double omega, double theta) {
  const double k = mode.kappa();
  return std::exp(kI * theta) * std::conj(chi_cavity(mode.delta, k, -omega)) -
         std::exp(-kI * theta) * chi_cavity(mode.delta, k, omega);
}

cd xi(const ModeParams& mode, double omega, double theta) {
  const double k = mode.kappa();
  return std::exp(kI * theta) * std::conj(chi_cavity(mode.delta, k, -omega)) +
         std::exp(-kI * theta) * chi_cavity(mode.delta, k, omega);
}

double photon_number(double power_w, double wavelength_m, double kappa_e, double kappa_i,
                     double delta) {
  const double omega_l = kTwoPi * kSpeedOfLight / wavelength_m;
  const double flux = power_w / (kHbar * omega_l);  // |epsilon|^2, photons/s
  const double kappa = kappa_e + kappa_i;
  return 2.0 * kappa_e * flux / (delta * delta + kappa * kappa);
}

SteadyState steady_state(const SystemConfig& cfg) {
  const int m_count = cfg.mode_count();
  SteadyState ss;
  ss.abar.assign(m_count, 0.0);
  ss.g_linearized.assign(m_count, 0.0);
  ss.delta_eff.assign(m_count, 0.0);
  ss.photon_number.assign(m_count, 0.0);

  std::vector<double> flux(m_count, 0.0);  // |epsilon_j|^2
  std::vector<double> g_om(m_count, 0.0);
  for (int j = 0; j < m_count; ++j) {
    const auto& mode = cfg.modes[j];
    if (mode.drive) {
      const double omega_l = kTwoPi * kSpeedOfLight / mode.drive->wavelength_m;
      flux[j] = mode.drive->power_w / (kHbar * omega_l);
      g_om[j] = mode.drive->g_om;
    }
    ss.delta_eff[j] = mode.delta;
  }

  double rate_scale = cfg.mech.omega_m;
  for (const auto& mode : cfg.modes) rate_scale = std::max(rate_scale, mode.kappa());
  const double tol = 1e-12 * rate_scale;
  const cd mech_pole = kI * cfg.mech.omega_m + cfg.mech.gamma_m;

  cd beta = 0.0;
  double update = 0.0;
  const int cap = 200;
  int it = 0;
  for (; it < cap; ++it) {
    double sum_g_n = 0.0;
    for (int j = 0; j < m_count; ++j) {
      const auto& mode = cfg.modes[j];
      const double k = mode.kappa();
      const double n =
          2.0 * mode.kappa_e * flux[j] / (ss.delta_eff[j] * ss.delta_eff[j] + k * k);
      ss.photon_number[j] = n;
      sum_g_n += g_om[j] * n;
    }
    beta = -kI * sum_g_n / mech_pole;
    update = 0.0;
    for (int j = 0; j < m_count; ++j) {
      const double target = cfg.modes[j].delta + 2.0 * g_om[j] * beta.real();
      const double next = 0.5 * (ss.delta_eff[j] + target);  // damped update
      update = std::max(update, std::fabs(target - ss.delta_eff[j]));
      ss.delta_eff[j] = next;
    }
    if (update < tol) break;
  }
  if (update >= tol)
    throw NumericError("steady_state: no convergence after " + std::to_string(cap) +
                       " iterations, last delta_eff residual " + std::to_string(update));

  double approx = 0.0;
  for (int j = 0; j < m_count; ++j) {
    const auto& mode = cfg.modes[j];
    // drive phase rotated so abar (and hence G) is real
    const double mag = std::sqrt(ss.photon_number[j]);
    ss.abar[j] = mag;
    ss.g_linearized[j] = mode.drive ? g_om[j] * mag : mode.g;
    approx += g_om[j] * ss.photon_number[j];
  }
  ss.beta = beta;
  ss.beta_approx = -approx / cfg.mech.omega_m;
  ss.iterations = it + 1;
  ss.residual = update;
  return ss;
}

SystemConfig resolve_drives(const SystemConfig& cfg) {
  if (!cfg.has_drives()) return cfg;
  SteadyState ss = steady_state(cfg);
  SystemConfig out = cfg;
  for (int j = 0; j < cfg.mode_count(); ++j) {
    if (out.modes[j].drive) {
      out.modes[j].g = ss.g_linearized[j];
      out.modes[j].delta = ss.delta_eff[j];
    }
  }
  return out;
}

SimplifiedScales simplified_scales(const SystemConfig& cfg, double omega) {
  if (!cfg.identical_modes())
    throw ValidationError("simplified route requires identical cavity modes");
  const ModeParams& mode = cfg.modes.front();
  const double kappa = mode.kappa();
  if (std::fabs(mode.delta) > 1e-9 * kappa)
    throw ValidationError("simplified route requires zero effective detuning");

  SimplifiedScales s;
  s.delta_minus = cfg.mech.omega_m - omega;
  s.delta_plus = cfg.mech.omega_m + omega;
  s.delta = (s.delta_minus * s.delta_plus) / (s.delta_minus + s.delta_plus);
  s.gamma_meas = (4.0 * mode.g * mode.g / kappa) * kappa * kappa /
                 (omega * omega + kappa * kappa);
  s.eta = mode.eta();
  const double guard = 100.0 * cfg.mech.gamma_m;
  s.valid = std::fabs(s.delta_minus) >= guard && std::fabs(s.delta_plus) >= guard &&
            std::fabs(s.delta) >= guard;
  return s;
}

}  // namespace combent::response
