#pragma once

#include <complex>
#include <vector>

#include "core/model.hpp"

namespace combent::response {

using cd = std::complex<double>;

/// Cavity susceptibility 1/(i(delta - omega) + kappa). Requires kappa > 0.
cd chi_cavity(double delta, double kappa, double omega);

/// Dressed mechanical susceptibility: the response of b(omega) to the
/// mechanical input noise after the optical modes are eliminated exactly,
///
///   chi_m(omega) = m / (p m + (m - p) Sigma),
///   p = i(Omega_m - omega) + gamma_m,   m = -i(Omega_m + omega) + gamma_m,
///   Sigma(omega) = sum_j G_j^2 [chi_R,j(omega) - conj(chi_R,j(-omega))].
///
/// This keeps the counter-rotating part of the self-energy; expanding to
/// first order in Sigma recovers 1/(p + Sigma). The two coincide wherever
/// Sigma vanishes (all detunings zero) and at G = 0.
cd chi_mech(const SystemConfig& cfg, double omega);

/// F_m(omega) = conj(chi_m(-omega)) - chi_m(omega); obeys conj(F(-w)) = -F(w).
cd f_mech(const SystemConfig& cfg, double omega);

/// zeta_j = e^{i theta} conj(chi_R(-w)) - e^{-i theta} chi_R(w)
cd zeta(const ModeParams& mode, double omega, double theta);
/// Xi_j = e^{i theta} conj(chi_R(-w)) + e^{-i theta} chi_R(w)
cd xi(const ModeParams& mode, double omega, double theta);

struct SteadyState {
  std::vector<cd> abar;             // intracavity amplitudes (drive phase chosen so G is real)
  cd beta;                          // exact mechanical shift -i sum g|a|^2 / (i Omega + gamma)
  cd beta_approx;                   // the Omega-only approximation -sum g|a|^2 / Omega
  std::vector<double> g_linearized; // G_j = g_om,j |abar_j|
  std::vector<double> delta_eff;    // delta'_j + 2 g_om,j Re(beta)
  std::vector<double> photon_number;
  int iterations = 0;
  double residual = 0.0;            // last delta_eff update
};

/// Self-consistent (abar, beta, delta_eff) for a config whose modes carry
/// drive parameters. Damped Picard iteration, tolerance 1e-12 relative to the
/// largest rate, cap 200; throws NumericError with the last residual on
/// non-convergence (bistable or otherwise invalid operating point).
SteadyState steady_state(const SystemConfig& cfg);

/// Photon number 2 kappa_e (P / hbar omega_L) / (delta^2 + kappa^2) for a
/// single mode at fixed effective detuning; rates in rad/s.
double photon_number(double power_w, double wavelength_m, double kappa_e, double kappa_i,
                     double delta);

/// Copy of cfg with every drive resolved into (g, effective delta).
SystemConfig resolve_drives(const SystemConfig& cfg);

struct SimplifiedScales {
  double delta_minus = 0.0;  // Omega_m - omega
  double delta_plus = 0.0;   // Omega_m + omega
  double delta = 0.0;        // 1/delta = 1/delta_- + 1/delta_+
  double gamma_meas = 0.0;   // (4G^2/kappa) kappa^2/(omega^2+kappa^2)
  double eta = 0.0;          // kappa_e/kappa
  bool valid = true;         // false within 100 gamma_m of the sideband degeneracies
};

/// Identical-mode scales for the closed-form route. Throws ValidationError if
/// the modes differ or sit away from delta = 0.
SimplifiedScales simplified_scales(const SystemConfig& cfg, double omega);

}  // namespace combent::response
