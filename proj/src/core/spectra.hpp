#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "core/model.hpp"

namespace combent::spectra {

using cd = std::complex<double>;

enum class Route { Full, Simplified, Oracle };

struct PairCorrelation {
  int j = 0, l = 0;
  cd xx{};          // <dX_out,j(w) dX_out,l(-w)>
  cd yy{};          // <dY_out,j(w) dY_out,l(-w)>
  double omega = 0.0;
  Route route = Route::Full;
  bool valid = true;  // simplified route only; full/oracle always true
};

/// Per-(config, omega, theta) cache of everything the correlation formulas
/// reuse across mode pairs: chi_R at +-omega, zeta/Xi, the dressed mechanical
/// response at +-omega, F_m, and the back-action sums over modes. Makes a
/// full M x M table O(M^2) after O(M) setup.
class CorrelationBasis {
 public:
  CorrelationBasis(const SystemConfig& cfg, double omega);
  CorrelationBasis(const SystemConfig& cfg, double omega, double theta);

  cd xx(int j, int l) const;
  cd yy(int j, int l) const;
  double omega() const { return omega_; }
  double theta() const { return theta_; }
  int mode_count() const { return static_cast<int>(g_.size()); }

 private:
  cd correlation(int j, int l, bool quad_x) const;

  double omega_, theta_, gamma_m_;
  cd phase_;       // e^{-i theta}
  cd f_m_;         // F_m(omega)
  double mech_occ_;  // |chi_m(w)|^2 (n_th+1) + |chi_m(-w)|^2 n_th
  double bsum_pos_;  // sum_n kappa_n G_n^2 |chi_R,n(w)|^2  (n_o,n + 1)
  double bsum_neg_;  // sum_n kappa_n G_n^2 |chi_R,n(-w)|^2  n_o,n
  std::vector<cd> chi_pos_, chi_neg_, zeta_, xi_;
  std::vector<double> g_, kappa_, sqrt_kappa_e_, n_o_;
};

cd xx_correlation_full(const SystemConfig& cfg, int j, int l, double omega);
cd yy_correlation_full(const SystemConfig& cfg, int j, int l, double omega);

/// Identical-mode closed forms. `valid`, when given, reports whether the
/// point sits inside the formulas' validity region (away from the sideband
/// degeneracies); out-of-validity points still return the formula value.
cd xx_correlation_simplified(const SystemConfig& cfg, int j, int l, double omega,
                             bool* valid = nullptr);
cd yy_correlation_simplified(const SystemConfig& cfg, int j, int l, double omega,
                             bool* valid = nullptr);

/// All pairs (j,l) including the diagonal, full route. Diagonal entries are
/// checked real to 1e-10 (relative).
std::vector<PairCorrelation> correlation_matrix(const SystemConfig& cfg, double omega);

/// A full sweep: every ordered pair at every grid point, plus the metadata
/// needed to reproduce it.
struct SpectrumResult {
  std::vector<double> omega_grid;        // strictly increasing
  std::vector<PairCorrelation> values;   // grid-major, pair-minor (M^2 per point)
  std::uint64_t config_hash = 0;
  double theta = 0.0;
  Route route = Route::Full;

  int pair_count() const {
    return omega_grid.empty() ? 0 : static_cast<int>(values.size() / omega_grid.size());
  }
};

/// Evaluates the grid in parallel. Rejects grids that are not strictly
/// increasing. The oracle route goes through the scattering solver.
SpectrumResult sweep(const SystemConfig& cfg, std::span<const double> omega_grid, Route route);

}  // namespace combent::spectra
