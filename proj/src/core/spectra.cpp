#include "core/spectra.hpp"

#include <cmath>

#include "core/oracle.hpp"
#include "core/parallel.hpp"
#include "core/response.hpp"

namespace combent::spectra {

namespace {
constexpr cd kI{0.0, 1.0};

double norm2(cd z) { return z.real() * z.real() + z.imag() * z.imag(); }

// Kahan sum; the back-action n-sums are the one place terms of very
// different magnitude meet.
struct Compensated {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};
}  // namespace

CorrelationBasis::CorrelationBasis(const SystemConfig& cfg, double omega)
    : CorrelationBasis(cfg, omega, cfg.theta) {}

CorrelationBasis::CorrelationBasis(const SystemConfig& cfg, double omega, double theta)
    : omega_(omega), theta_(theta), gamma_m_(cfg.mech.gamma_m) {
  const int m = cfg.mode_count();
  chi_pos_.resize(m);
  chi_neg_.resize(m);
  zeta_.resize(m);
  xi_.resize(m);
  g_.resize(m);
  kappa_.resize(m);
  sqrt_kappa_e_.resize(m);
  n_o_.resize(m);

  phase_ = std::exp(-kI * theta);
  const cd conj_phase = std::conj(phase_);
  for (int n = 0; n < m; ++n) {
    const auto& mode = cfg.modes[n];
    const double k = mode.kappa();
    chi_pos_[n] = response::chi_cavity(mode.delta, k, omega);
    chi_neg_[n] = response::chi_cavity(mode.delta, k, -omega);
    zeta_[n] = conj_phase * std::conj(chi_neg_[n]) - phase_ * chi_pos_[n];
    xi_[n] = conj_phase * std::conj(chi_neg_[n]) + phase_ * chi_pos_[n];
    g_[n] = mode.g;
    kappa_[n] = k;
    sqrt_kappa_e_[n] = std::sqrt(mode.kappa_e);
    n_o_[n] = mode.n_o;
  }

  const cd chi_m_pos = response::chi_mech(cfg, omega);
  const cd chi_m_neg = response::chi_mech(cfg, -omega);
  f_m_ = std::conj(chi_m_neg) - chi_m_pos;
  mech_occ_ = norm2(chi_m_pos) * (cfg.mech.n_th + 1.0) + norm2(chi_m_neg) * cfg.mech.n_th;

  Compensated pos, neg;
  for (int n = 0; n < m; ++n) {
    const double w = kappa_[n] * g_[n] * g_[n];
    pos.add(w * norm2(chi_pos_[n]) * (n_o_[n] + 1.0));
    neg.add(w * norm2(chi_neg_[n]) * n_o_[n]);
  }
  bsum_pos_ = pos.s;
  bsum_neg_ = neg.s;
}

cd CorrelationBasis::correlation(int j, int l, bool quad_x) const {
  const cd uj = quad_x ? zeta_[j] : xi_[j];
  const cd ul_c = std::conj(quad_x ? zeta_[l] : xi_[l]);
  const double sgn = quad_x ? -1.0 : 1.0;
  const double gg = sqrt_kappa_e_[j] * sqrt_kappa_e_[l] * g_[j] * g_[l];
  const cd e = phase_;                 // e^{-i theta}
  const cd ec = std::conj(phase_);     // e^{+i theta}
  const cd f_c = std::conj(f_m_);

  cd s = 0.0;
  if (j == l) s += 0.5 * (2.0 * n_o_[j] + 1.0);
  // mechanical bath through zeta/Xi
  s += 2.0 * gamma_m_ * gg * uj * ul_c * mech_occ_;
  // interference of direct reflection with the mediated back-action
  s += sgn * e * gg * (2.0 * kappa_[j] * chi_pos_[j] - 1.0) * f_c * ul_c *
       std::conj(chi_pos_[j]) * (n_o_[j] + 1.0);
  s += sgn * ec * gg * (2.0 * kappa_[l] * std::conj(chi_pos_[l]) - 1.0) * f_m_ * uj *
       chi_pos_[l] * (n_o_[l] + 1.0);
  // radiation-pressure back-action summed over every mode's input channels
  s += 2.0 * gg * norm2(f_m_) * uj * ul_c * bsum_pos_;
  // thermal-photon counterparts of the three terms above
  s += -ec * gg * (2.0 * kappa_[j] * std::conj(chi_neg_[j]) - 1.0) * f_c * ul_c *
       chi_neg_[j] * n_o_[j];
  s += -e * gg * (2.0 * kappa_[l] * chi_neg_[l] - 1.0) * f_m_ * uj *
       std::conj(chi_neg_[l]) * n_o_[l];
  s += 2.0 * gg * norm2(f_m_) * uj * ul_c * bsum_neg_;
  return s;
}

cd CorrelationBasis::xx(int j, int l) const { return correlation(j, l, true); }
cd CorrelationBasis::yy(int j, int l) const { return correlation(j, l, false); }

namespace {
void check_pair(const SystemConfig& cfg, int j, int l) {
  if (j < 0 || l < 0 || j >= cfg.mode_count() || l >= cfg.mode_count())
    throw ValidationError("mode index out of range");
}
}  // namespace

cd xx_correlation_full(const SystemConfig& cfg, int j, int l, double omega) {
  check_pair(cfg, j, l);
  return CorrelationBasis(cfg, omega).xx(j, l);
}

cd yy_correlation_full(const SystemConfig& cfg, int j, int l, double omega) {
  check_pair(cfg, j, l);
  return CorrelationBasis(cfg, omega).yy(j, l);
}

namespace {
cd simplified(const SystemConfig& cfg, int j, int l, double omega, bool quad_x,
              bool* valid) {
  check_pair(cfg, j, l);
  const auto s = response::simplified_scales(cfg, omega);
  if (valid) *valid = s.valid;
  const double m = cfg.mode_count();
  const double n_o = cfg.modes.front().n_o;
  const double occ = 2.0 * n_o + 1.0;
  const double c2 = std::cos(2.0 * cfg.theta);
  const double s2 = std::sin(2.0 * cfg.theta);
  const double trig = quad_x ? 1.0 - c2 : 1.0 + c2;
  const double interf = quad_x ? 0.5 * s2 : -0.5 * s2;
  const double thermal = cfg.mech.omega_m * s.delta *
                         (cfg.mech.n_th / (cfg.mech.omega_m / cfg.mech.gamma_m)) *
                         (1.0 / (s.delta_minus * s.delta_minus) +
                          1.0 / (s.delta_plus * s.delta_plus));
  double v = s.eta * m * (s.gamma_meas / (2.0 * s.delta)) *
                 (s.gamma_meas / (2.0 * s.delta)) * trig * occ +
             s.eta * (s.gamma_meas / s.delta) * (thermal * trig + interf) * occ;
  if (j == l) v += 0.5 * occ;
  return cd(v, 0.0);
}
}  // namespace

cd xx_correlation_simplified(const SystemConfig& cfg, int j, int l, double omega,
                             bool* valid) {
  return simplified(cfg, j, l, omega, true, valid);
}

cd yy_correlation_simplified(const SystemConfig& cfg, int j, int l, double omega,
                             bool* valid) {
  return simplified(cfg, j, l, omega, false, valid);
}

SpectrumResult sweep(const SystemConfig& cfg, std::span<const double> omega_grid,
                     Route route) {
  if (omega_grid.empty()) throw ValidationError("sweep: empty omega grid");
  for (std::size_t i = 1; i < omega_grid.size(); ++i)
    if (!(omega_grid[i] > omega_grid[i - 1]))
      throw ValidationError("sweep: omega grid must be strictly increasing");

  const int m = cfg.mode_count();
  SpectrumResult result;
  result.omega_grid.assign(omega_grid.begin(), omega_grid.end());
  result.config_hash = config_hash(cfg);
  result.theta = cfg.theta;
  result.route = route;
  result.values.resize(omega_grid.size() * static_cast<std::size_t>(m) * m);

  parallel_for(omega_grid.size(), [&](std::size_t i) {
    const double w = omega_grid[i];
    PairCorrelation* row = result.values.data() + i * static_cast<std::size_t>(m) * m;
    auto fill = [&](int j, int l, cd xx, cd yy, bool valid) {
      PairCorrelation& pc = row[static_cast<std::size_t>(j) * m + l];
      pc.j = j;
      pc.l = l;
      pc.omega = w;
      pc.route = route;
      pc.xx = xx;
      pc.yy = yy;
      pc.valid = valid;
    };
    switch (route) {
      case Route::Full: {
        const CorrelationBasis basis(cfg, w);
        for (int j = 0; j < m; ++j)
          for (int l = 0; l < m; ++l) fill(j, l, basis.xx(j, l), basis.yy(j, l), true);
        break;
      }
      case Route::Simplified: {
        for (int j = 0; j < m; ++j)
          for (int l = 0; l < m; ++l) {
            bool ok = true;
            const cd xx = xx_correlation_simplified(cfg, j, l, w, &ok);
            const cd yy = yy_correlation_simplified(cfg, j, l, w);
            fill(j, l, xx, yy, ok);
          }
        break;
      }
      case Route::Oracle: {
        const auto table = oracle::correlation_table(cfg, w);
        for (int j = 0; j < m; ++j)
          for (int l = 0; l < m; ++l) fill(j, l, table.xx(j, l), table.yy(j, l), true);
        break;
      }
    }
  });
  return result;
}

std::vector<PairCorrelation> correlation_matrix(const SystemConfig& cfg, double omega) {
  const CorrelationBasis basis(cfg, omega);
  const int m = cfg.mode_count();
  std::vector<PairCorrelation> table;
  table.reserve(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    for (int l = 0; l < m; ++l) {
      PairCorrelation pc;
      pc.j = j;
      pc.l = l;
      pc.omega = omega;
      pc.route = Route::Full;
      pc.xx = basis.xx(j, l);
      pc.yy = basis.yy(j, l);
      if (j == l) {
        const double scale_x = std::max(1.0, std::fabs(pc.xx.real()));
        const double scale_y = std::max(1.0, std::fabs(pc.yy.real()));
        if (std::fabs(pc.xx.imag()) > 1e-10 * scale_x ||
            std::fabs(pc.yy.imag()) > 1e-10 * scale_y)
          throw NumericError("correlation_matrix: auto-correlation has imaginary residue");
      }
      table.push_back(pc);
    }
  }
  return table;
}

}  // namespace combent::spectra
