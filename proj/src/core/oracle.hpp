#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "core/model.hpp"

namespace combent::oracle {

using cd = std::complex<double>;

// Independent numeric route: assemble the frequency-domain equations of
// motion as a dense linear system and push the input-noise covariances
// through it. Shares nothing with the analytic correlation formulas beyond
// the config itself.
//
// Unknown ordering:  [a_1..a_M, ad_1..ad_M, b, bd]   (2M+2)
// Input ordering:    [a_in,e 1..M, ad_in,e 1..M, a_in,i 1..M, ad_in,i 1..M,
//                     b_in, bd_in]                   (4M+2)
// ad_j(omega) denotes the transform of the conjugated operator, i.e. the
// conjugate of a_j at -omega; its rows are the a_j rows conjugated at -omega.

void build_system(const SystemConfig& cfg, double omega, Eigen::MatrixXcd& a,
                  Eigen::MatrixXcd& b);

struct ScatteringSolution {
  double omega = 0.0;
  Eigen::MatrixXcd coeffs;      // (2M+2) x (4M+2): internal operators vs inputs
  Eigen::MatrixXcd out_coeffs;  // (2M)   x (4M+2): a_out rows, then ad_out rows
  double residual = 0.0;        // max |A coeffs - B| entry
};

/// Solves the system and forms the output rows via a_out = -a_in,e + sqrt(2 kappa_e) a.
/// Throws NumericError when the solve residual exceeds 1e-10 (singular or
/// parametrically divergent point).
ScatteringSolution solve_output(const SystemConfig& cfg, double omega);

enum class Quadrature { X, Y };

/// <dQ_j(omega) dQ_l(-omega)> from solutions at +omega and -omega contracted
/// with the diagonal input covariances (optical channels at n_o per mode,
/// mechanical at n_th).
cd oracle_correlation(const SystemConfig& cfg, int j, int l, double omega, Quadrature q);

/// Full M x M tables of XX and YY at one frequency (two solves total).
struct CorrelationTable {
  Eigen::MatrixXcd xx, yy;
};
CorrelationTable correlation_table(const SystemConfig& cfg, double omega);

/// V_jl assembled purely from oracle correlations.
double duan_variance(const SystemConfig& cfg, int j, int l, double omega);

/// 2-norm condition number of the system matrix.
double condition_number(const SystemConfig& cfg, double omega);

}  // namespace combent::oracle
