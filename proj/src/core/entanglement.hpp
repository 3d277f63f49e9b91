#pragma once

#include <span>
#include <vector>

#include "core/model.hpp"
#include "core/response.hpp"
#include "core/spectra.hpp"

namespace combent::entanglement {

struct VarianceMatrix {
  double omega = 0.0;
  double theta = 0.0;
  int m = 0;
  std::vector<double> v;  // m*m, row-major; diagonal entries are NaN (unused)

  double at(int j, int l) const { return v[static_cast<std::size_t>(j) * m + l]; }
};

struct EntanglementVerdict {
  bool entangled = false;  // every j<l entry below the bound of 2
  int worst_j = 0, worst_l = 0;
  double worst_value = 0.0;
};

/// V_jl = <(dX_j - dX_l)(w) (dX_j - dX_l)(-w)> + <(dY_j + dY_l)(w) (dY_j + dY_l)(-w)>
///      = XX_jj + XX_ll - 2 Re XX_jl + YY_jj + YY_ll + 2 Re YY_jl.
/// V < 2 certifies pairwise inseparability. Throws on j == l. The imaginary
/// residue must stay below 1e-8 (relative to max(1,|V|)) or the evaluation
/// aborts: a larger residue signals a transcription bug, not noise.
double duan_variance(const SystemConfig& cfg, int j, int l, double omega,
                     spectra::Route route = spectra::Route::Full, bool* valid = nullptr);

/// Same sum evaluated from a prebuilt basis (grid sweeps).
double duan_variance(const spectra::CorrelationBasis& basis, int j, int l);

VarianceMatrix variance_matrix(const SystemConfig& cfg, double omega);

EntanglementVerdict multipartite_verdict(const VarianceMatrix& vm);

struct PairMinimum {
  int j = 0, l = 0;
  double v_min = 0.0, omega_opt = 0.0, theta_opt = 0.0;
};

struct ScanResult {
  double v_min = 0.0;      // global minimum of the worst (largest) pair variance
  double omega_opt = 0.0;
  double theta_opt = 0.0;
  int j = 0, l = 0;        // pair attaining v_min at (omega_opt, theta_opt)
  std::vector<PairMinimum> per_pair;
};

/// Grid scan; ties break toward the lowest omega, then the lowest theta.
ScanResult scan_minimum(const SystemConfig& cfg, std::span<const double> omega_grid,
                        std::span<const double> theta_grid);

/// Default grids: 2001 omega points over [0.01, 2.5] Omega_m and 181 theta
/// points over [-pi, pi).
std::vector<double> default_omega_grid(const SystemConfig& cfg);
std::vector<double> default_theta_grid();

struct AnalyticMinimum {
  double v_min = 0.0;      // (2 - 2 eta Gt sin^2(theta) / (M Gt + 4 Omega n_th / Q)) (2 n_o + 1)
  double delta_opt = 0.0;  // (M Gt + 4 Omega n_th / Q) |cot(theta)|
  double strong_coupling = 0.0;  // 2 - (2 eta / M) sin^2(theta), times (2 n_o + 1)
  double weak_coupling = 0.0;    // 2 - (eta Q Gt / 2 Omega n_th) sin^2(theta), times (2 n_o + 1)
};

/// Closed-form minimum of the identical-mode variance over the sideband
/// detuning, at fixed quadrature angle. Throws when sin(theta) = 0 (no
/// optimum exists there).
AnalyticMinimum analytic_vmin(const response::SimplifiedScales& scales, int mode_count,
                              double theta, const MechanicalParams& mech, double n_o);

/// |delta| above which the simplified model predicts V < 2:
/// (M Gt / 2 + Omega n_th / Q) |cot(theta)| (2 n_o + 1). Throws at sin(theta)=0.
double entanglement_threshold_delta(const response::SimplifiedScales& scales, int mode_count,
                                    double theta, const MechanicalParams& mech, double n_o);

}  // namespace combent::entanglement
