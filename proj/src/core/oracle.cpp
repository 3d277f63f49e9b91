#include "core/oracle.hpp"

#include <cmath>

namespace combent::oracle {

namespace {
constexpr cd kI{0.0, 1.0};
}

void build_system(const SystemConfig& cfg, double omega, Eigen::MatrixXcd& a,
                  Eigen::MatrixXcd& b) {
  const int m = cfg.mode_count();
  const int n = 2 * m + 2;
  a = Eigen::MatrixXcd::Zero(n, n);
  b = Eigen::MatrixXcd::Zero(n, 4 * m + 2);
  const int ib = 2 * m, ibd = 2 * m + 1;
  for (int j = 0; j < m; ++j) {
    const auto& mode = cfg.modes[j];
    const double kappa = mode.kappa();
    // (i(D_j - w) + k_j) a_j + i G_j (b + bd) = sqrt(2 ke) a_in,e + sqrt(2 ki) a_in,i
    a(j, j) = kI * (mode.delta - omega) + kappa;
    a(j, ib) = kI * mode.g;
    a(j, ibd) = kI * mode.g;
    b(j, j) = std::sqrt(2.0 * mode.kappa_e);
    b(j, 2 * m + j) = std::sqrt(2.0 * mode.kappa_i);
    // conjugate row at -omega for ad_j
    a(m + j, m + j) = -kI * (mode.delta + omega) + kappa;
    a(m + j, ib) = -kI * mode.g;
    a(m + j, ibd) = -kI * mode.g;
    b(m + j, m + j) = std::sqrt(2.0 * mode.kappa_e);
    b(m + j, 3 * m + j) = std::sqrt(2.0 * mode.kappa_i);
    // mechanical rows couple to a_j + ad_j
    a(ib, j) = kI * mode.g;
    a(ib, m + j) = kI * mode.g;
    a(ibd, j) = -kI * mode.g;
    a(ibd, m + j) = -kI * mode.g;
  }
  a(ib, ib) = kI * (cfg.mech.omega_m - omega) + cfg.mech.gamma_m;
  a(ibd, ibd) = -kI * (cfg.mech.omega_m + omega) + cfg.mech.gamma_m;
  b(ib, 4 * m) = std::sqrt(2.0 * cfg.mech.gamma_m);
  b(ibd, 4 * m + 1) = std::sqrt(2.0 * cfg.mech.gamma_m);
}

ScatteringSolution solve_output(const SystemConfig& cfg, double omega) {
  const int m = cfg.mode_count();
  Eigen::MatrixXcd a, b;
  build_system(cfg, omega, a, b);

  ScatteringSolution sol;
  sol.omega = omega;
  sol.coeffs = a.partialPivLu().solve(b);
  sol.residual = (a * sol.coeffs - b).cwiseAbs().maxCoeff();
  if (!(sol.residual < 1e-10))
    throw NumericError("oracle: scattering solve residual " + std::to_string(sol.residual) +
                       " at omega " + std::to_string(omega) +
                       " (singular or divergent system)");

  sol.out_coeffs = Eigen::MatrixXcd::Zero(2 * m, 4 * m + 2);
  for (int j = 0; j < m; ++j) {
    const double root = std::sqrt(2.0 * cfg.modes[j].kappa_e);
    sol.out_coeffs.row(j) = root * sol.coeffs.row(j);
    sol.out_coeffs(j, j) -= 1.0;
    sol.out_coeffs.row(m + j) = root * sol.coeffs.row(m + j);
    sol.out_coeffs(m + j, m + j) -= 1.0;
  }
  return sol;
}

namespace {

// quadrature coefficient rows at one frequency from the output rows
Eigen::MatrixXcd quadrature_rows(const ScatteringSolution& sol, int m, double theta,
                                 Quadrature q) {
  const cd e = std::exp(-kI * theta), ec = std::exp(kI * theta);
  Eigen::MatrixXcd rows(m, 4 * m + 2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < m; ++j) {
    if (q == Quadrature::X)
      rows.row(j) = inv_sqrt2 * (e * sol.out_coeffs.row(j) + ec * sol.out_coeffs.row(m + j));
    else
      rows.row(j) =
          (inv_sqrt2 / kI) * (e * sol.out_coeffs.row(j) - ec * sol.out_coeffs.row(m + j));
  }
  return rows;
}

Eigen::MatrixXcd contract(const SystemConfig& cfg, const Eigen::MatrixXcd& rows_pos,
                          const Eigen::MatrixXcd& rows_neg) {
  const int m = cfg.mode_count();
  Eigen::MatrixXcd out(m, m);
  for (int j = 0; j < m; ++j) {
    for (int l = 0; l < m; ++l) {
      cd s = 0.0;
      for (int n = 0; n < m; ++n) {
        const double no = cfg.modes[n].n_o;
        s += rows_pos(j, n) * rows_neg(l, m + n) * (no + 1.0) +
             rows_pos(j, m + n) * rows_neg(l, n) * no;
        s += rows_pos(j, 2 * m + n) * rows_neg(l, 3 * m + n) * (no + 1.0) +
             rows_pos(j, 3 * m + n) * rows_neg(l, 2 * m + n) * no;
      }
      s += rows_pos(j, 4 * m) * rows_neg(l, 4 * m + 1) * (cfg.mech.n_th + 1.0) +
           rows_pos(j, 4 * m + 1) * rows_neg(l, 4 * m) * cfg.mech.n_th;
      out(j, l) = s;
    }
  }
  return out;
}

}  // namespace

CorrelationTable correlation_table(const SystemConfig& cfg, double omega) {
  const int m = cfg.mode_count();
  const ScatteringSolution pos = solve_output(cfg, omega);
  const ScatteringSolution neg = solve_output(cfg, -omega);
  CorrelationTable table;
  table.xx = contract(cfg, quadrature_rows(pos, m, cfg.theta, Quadrature::X),
                      quadrature_rows(neg, m, cfg.theta, Quadrature::X));
  table.yy = contract(cfg, quadrature_rows(pos, m, cfg.theta, Quadrature::Y),
                      quadrature_rows(neg, m, cfg.theta, Quadrature::Y));
  return table;
}

cd oracle_correlation(const SystemConfig& cfg, int j, int l, double omega, Quadrature q) {
  if (j < 0 || l < 0 || j >= cfg.mode_count() || l >= cfg.mode_count())
    throw ValidationError("oracle_correlation: mode index out of range");
  const CorrelationTable table = correlation_table(cfg, omega);
  return q == Quadrature::X ? table.xx(j, l) : table.yy(j, l);
}

double duan_variance(const SystemConfig& cfg, int j, int l, double omega) {
  if (j == l) throw ValidationError("oracle::duan_variance: requires two distinct modes");
  const CorrelationTable t = correlation_table(cfg, omega);
  const cd v = t.xx(j, j) + t.xx(l, l) - 2.0 * t.xx(j, l).real() + t.yy(j, j) +
               t.yy(l, l) + 2.0 * t.yy(j, l).real();
  return v.real();
}

double condition_number(const SystemConfig& cfg, double omega) {
  Eigen::MatrixXcd a, b;
  build_system(cfg, omega, a, b);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

}  // namespace combent::oracle
