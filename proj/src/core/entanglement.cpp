#include "core/entanglement.hpp"

#include <cmath>
#include <limits>

#include "core/constants.hpp"
#include "core/parallel.hpp"

namespace combent::entanglement {

namespace {

double finish_variance(std::complex<double> v) {
  const double scale = std::max(1.0, std::fabs(v.real()));
  if (std::fabs(v.imag()) > 1e-8 * scale)
    throw NumericError("duan_variance: imaginary residue " + std::to_string(v.imag()) +
                       " exceeds 1e-8; correlation table is not Hermitian");
  return v.real();
}

}  // namespace

double duan_variance(const spectra::CorrelationBasis& basis, int j, int l) {
  const std::complex<double> v = basis.xx(j, j) + basis.xx(l, l) - 2.0 * basis.xx(j, l).real() +
                                 basis.yy(j, j) + basis.yy(l, l) + 2.0 * basis.yy(j, l).real();
  return finish_variance(v);
}

double duan_variance(const SystemConfig& cfg, int j, int l, double omega,
                     spectra::Route route, bool* valid) {
  if (j == l) throw ValidationError("duan_variance: requires two distinct modes");
  if (j < 0 || l < 0 || j >= cfg.mode_count() || l >= cfg.mode_count())
    throw ValidationError("duan_variance: mode index out of range");
  if (valid) *valid = true;
  switch (route) {
    case spectra::Route::Full:
      return duan_variance(spectra::CorrelationBasis(cfg, omega), j, l);
    case spectra::Route::Simplified: {
      bool ok = true;
      const auto xx_d = spectra::xx_correlation_simplified(cfg, j, j, omega, &ok);
      const auto xx_o = spectra::xx_correlation_simplified(cfg, j, l, omega);
      const auto yy_d = spectra::yy_correlation_simplified(cfg, j, j, omega);
      const auto yy_o = spectra::yy_correlation_simplified(cfg, j, l, omega);
      if (valid) *valid = ok;
      return finish_variance(2.0 * xx_d - 2.0 * xx_o + 2.0 * yy_d + 2.0 * yy_o);
    }
    case spectra::Route::Oracle:
      break;
  }
  throw ValidationError("duan_variance: oracle route goes through oracle::correlation_table");
}

VarianceMatrix variance_matrix(const SystemConfig& cfg, double omega) {
  const int m = cfg.mode_count();
  if (m < 2) throw ValidationError("variance_matrix: requires at least two modes");
  const spectra::CorrelationBasis basis(cfg, omega);
  VarianceMatrix vm;
  vm.omega = omega;
  vm.theta = cfg.theta;
  vm.m = m;
  vm.v.assign(static_cast<std::size_t>(m) * m, std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j < m; ++j) {
    for (int l = j + 1; l < m; ++l) {
      const double v = duan_variance(basis, j, l);
      vm.v[static_cast<std::size_t>(j) * m + l] = v;
      vm.v[static_cast<std::size_t>(l) * m + j] = v;
    }
  }
  return vm;
}

EntanglementVerdict multipartite_verdict(const VarianceMatrix& vm) {
  EntanglementVerdict verdict;
  verdict.entangled = true;
  verdict.worst_value = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < vm.m; ++j) {
    for (int l = j + 1; l < vm.m; ++l) {
      const double v = vm.at(j, l);
      if (v > verdict.worst_value) {
        verdict.worst_value = v;
        verdict.worst_j = j;
        verdict.worst_l = l;
      }
      if (!(v < 2.0)) verdict.entangled = false;
    }
  }
  return verdict;
}

std::vector<double> default_omega_grid(const SystemConfig& cfg) {
  const int n = 2001;
  std::vector<double> grid(n);
  const double lo = 0.01 * cfg.mech.omega_m, hi = 2.5 * cfg.mech.omega_m;
  for (int i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * i / (n - 1);
  return grid;
}

std::vector<double> default_theta_grid() {
  const int n = 181;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = -kPi + kTwoPi * i / n;
  return grid;
}

ScanResult scan_minimum(const SystemConfig& cfg, std::span<const double> omega_grid,
                        std::span<const double> theta_grid) {
  if (omega_grid.empty() || theta_grid.empty())
    throw ValidationError("scan_minimum: empty grid");
  const int m = cfg.mode_count();
  if (m < 2) throw ValidationError("scan_minimum: requires at least two modes");

  const int pairs = m * (m - 1) / 2;
  ScanResult result;
  result.v_min = std::numeric_limits<double>::infinity();
  result.per_pair.resize(pairs);
  {
    int p = 0;
    for (int j = 0; j < m; ++j)
      for (int l = j + 1; l < m; ++l) {
        result.per_pair[p].j = j;
        result.per_pair[p].l = l;
        result.per_pair[p].v_min = std::numeric_limits<double>::infinity();
        ++p;
      }
  }

  // ties break toward the lowest omega first, then the lowest theta
  auto improves = [](double v, double v_best, double w, double w_best, double t,
                     double t_best) {
    if (v != v_best) return v < v_best;
    if (w != w_best) return w < w_best;
    return t < t_best;
  };

  std::vector<double> point(omega_grid.size() * pairs);
  for (double theta : theta_grid) {
    SystemConfig at_theta = cfg;
    at_theta.theta = theta;
    parallel_for(omega_grid.size(), [&](std::size_t i) {
      const spectra::CorrelationBasis basis(at_theta, omega_grid[i]);
      int p = 0;
      for (int j = 0; j < m; ++j)
        for (int l = j + 1; l < m; ++l) point[i * pairs + p++] = duan_variance(basis, j, l);
    });
    // sequential reduction in grid order keeps the result order-independent
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
      double worst = -std::numeric_limits<double>::infinity();
      int worst_p = 0;
      for (int p = 0; p < pairs; ++p) {
        const double v = point[i * pairs + p];
        auto& pm = result.per_pair[p];
        if (improves(v, pm.v_min, omega_grid[i], pm.omega_opt, theta, pm.theta_opt)) {
          pm.v_min = v;
          pm.omega_opt = omega_grid[i];
          pm.theta_opt = theta;
        }
        if (v > worst) {
          worst = v;
          worst_p = p;
        }
      }
      if (improves(worst, result.v_min, omega_grid[i], result.omega_opt, theta,
                   result.theta_opt)) {
        result.v_min = worst;
        result.omega_opt = omega_grid[i];
        result.theta_opt = theta;
        result.j = result.per_pair[worst_p].j;
        result.l = result.per_pair[worst_p].l;
      }
    }
  }
  return result;
}

AnalyticMinimum analytic_vmin(const response::SimplifiedScales& scales, int mode_count,
                              double theta, const MechanicalParams& mech, double n_o) {
  const double st = std::sin(theta);
  if (st == 0.0)
    throw ValidationError("analytic_vmin: undefined at sin(theta) = 0");
  const double occ = 2.0 * n_o + 1.0;
  const double gt = scales.gamma_meas;
  const double thermal = 4.0 * mech.omega_m * mech.n_th / mech.quality_factor();
  const double den = mode_count * gt + thermal;

  AnalyticMinimum out;
  out.v_min = (2.0 - 2.0 * scales.eta * gt * st * st / den) * occ;
  out.delta_opt = den * std::fabs(std::cos(theta) / st);
  out.strong_coupling = (2.0 - 2.0 * scales.eta * st * st / mode_count) * occ;
  out.weak_coupling =
      thermal > 0.0
          ? (2.0 - 2.0 * scales.eta * gt * st * st / thermal) * occ
          : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double entanglement_threshold_delta(const response::SimplifiedScales& scales, int mode_count,
                                    double theta, const MechanicalParams& mech, double n_o) {
  const double st = std::sin(theta);
  if (st == 0.0)
    throw ValidationError("entanglement_threshold_delta: undefined at sin(theta) = 0");
  const double base =
      0.5 * mode_count * scales.gamma_meas + mech.omega_m * mech.n_th / mech.quality_factor();
  return base * std::fabs(std::cos(theta) / st) * (2.0 * n_o + 1.0);
}

}  // namespace combent::entanglement
