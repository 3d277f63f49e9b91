#include <cmath>
#include <complex>

#include "core/oracle.hpp"
#include "core/spectra.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace combent;
using oracle::cd;
using testutil::close;

TEST_CASE("uncoupled system assembles a block-diagonal matrix") {
  auto cfg = testutil::identical_config(1, 0.0);
  Eigen::MatrixXcd a, b;
  oracle::build_system(cfg, 0.05, a, b);
  REQUIRE(a.rows() == 4);
  // optical block decouples from the mechanical block at G = 0
  CHECK(a(0, 2) == cd(0, 0));
  CHECK(a(0, 3) == cd(0, 0));
  CHECK(a(2, 0) == cd(0, 0));
  CHECK(a(3, 1) == cd(0, 0));
  CHECK(b(0, 0).real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(b(0, 0).imag() == 0.0);
}

TEST_CASE("conjugated rows equal the direct rows at reflected frequency") {
  testutil::ConfigSampler s(31);
  for (int i = 0; i < 25; ++i) {
    auto cfg = s.random_config(1 + i % 3, true, false);
    const double w = s.uniform(-0.3, 0.3);
    const int m = cfg.mode_count();
    Eigen::MatrixXcd a_pos, b_pos, a_neg, b_neg;
    oracle::build_system(cfg, w, a_pos, b_pos);
    oracle::build_system(cfg, -w, a_neg, b_neg);
    // row for ad_j at +w is the conjugate of the a_j row at -w, with the
    // unknown and input columns swapped into the daggered slots
    for (int j = 0; j < m; ++j) {
      CHECK(close(a_pos(m + j, m + j), std::conj(a_neg(j, j)), 1e-15));
      CHECK(close(a_pos(m + j, 2 * m), std::conj(a_neg(j, 2 * m)), 1e-15));
      CHECK(close(b_pos(m + j, m + j), std::conj(b_neg(j, j)), 1e-15));
    }
    CHECK(close(a_pos(2 * m + 1, 2 * m + 1), std::conj(a_neg(2 * m, 2 * m)), 1e-15));
  }
}

TEST_CASE("empty cavity reflects the input with unit magnitude") {
  auto cfg = testutil::identical_config(1, 0.0, 0.1, 1e6, 0.0);
  SUBCASE("on resonance the output equals +a_in") {
    const auto sol = oracle::solve_output(cfg, 0.0);
    CHECK(close(sol.out_coeffs(0, 0), cd(1.0, 0.0), 1e-12));
  }
  SUBCASE("far off resonance the output tends to -a_in") {
    const auto sol = oracle::solve_output(cfg, 400.0);
    CHECK(close(sol.out_coeffs(0, 0), cd(-1.0, 0.0), 1e-2));
  }
}

TEST_CASE("solve residual stays below 1e-10") {
  testutil::ConfigSampler s(32);
  for (int i = 0; i < 30; ++i) {
    auto cfg = s.random_config(1 + i % 4, true, true);
    const auto sol = oracle::solve_output(cfg, s.uniform(0.001, 0.3));
    CHECK(sol.residual < 1e-10);
  }
}

TEST_CASE("fig 1(b) system is well conditioned at omega = Omega_m") {
  auto cfg = testutil::identical_config(2, 0.3, 0.1, 1e6, 1e3, 1.0, 0.0, M_PI / 4);
  const double c = oracle::condition_number(cfg, cfg.mech.omega_m);
  CHECK(std::isfinite(c));
  CHECK(c > 1.0);
  CHECK(c < 1e12);
}

TEST_CASE("vacuum diagonal correlation is the shot floor") {
  auto cfg = testutil::identical_config(1, 0.0, 0.1, 1e6, 0.0, 1.0, 0.0, 0.3);
  const auto xx = oracle::oracle_correlation(cfg, 0, 0, 0.05, oracle::Quadrature::X);
  CHECK(close(xx, cd(0.5, 0.0), 1e-12));
}

TEST_CASE("zero-temperature diagonal spectra are passive (non-negative)") {
  testutil::ConfigSampler s(33);
  for (int i = 0; i < 25; ++i) {
    auto cfg = s.random_config(1 + i % 3, true, false);
    cfg.mech.n_th = 0.0;
    const auto table = oracle::correlation_table(cfg, s.uniform(0.005, 0.25));
    for (int j = 0; j < cfg.mode_count(); ++j) {
      CHECK(table.xx(j, j).real() > -1e-11);
      CHECK(table.yy(j, j).real() > -1e-11);
    }
  }
}

TEST_CASE("stationarity: <Q_j(w) Q_l(-w)> = conj(<Q_l(w) Q_j(-w)>)") {
  testutil::ConfigSampler s(34);
  for (int i = 0; i < 25; ++i) {
    auto cfg = s.random_config(2 + i % 2, true, true);
    const double w = s.uniform(0.005, 0.25);
    const auto t = oracle::correlation_table(cfg, w);
    for (int j = 0; j < cfg.mode_count(); ++j)
      for (int l = 0; l < cfg.mode_count(); ++l) {
        CHECK(close(t.xx(j, l), std::conj(t.xx(l, j)), 1e-11, 1e-14));
        CHECK(close(t.yy(j, l), std::conj(t.yy(l, j)), 1e-11, 1e-14));
      }
  }
}

TEST_CASE("cold low-damping single mode shows a positive back-action spectrum") {
  auto cfg = testutil::identical_config(1, 0.3, 0.1, 1e9, 0.0, 1.0, 0.0, M_PI / 4);
  for (double w : {0.05, 0.08, 0.12}) {
    const auto xx = oracle::oracle_correlation(cfg, 0, 0, w, oracle::Quadrature::X);
    const auto yy = oracle::oracle_correlation(cfg, 0, 0, w, oracle::Quadrature::Y);
    CHECK(xx.real() + yy.real() > 1.0 - 1e-9);  // back-action cannot beat both quadratures
    CHECK(xx.real() > -1e-11);
    CHECK(yy.real() > -1e-11);
  }
}

TEST_CASE("oracle duan variance equals the spectra-route variance") {
  auto cfg = testutil::identical_config(2, 0.3, 0.1, 1e6, 1e3, 1.0, 0.0, -M_PI / 4);
  const double w = 1.2 * cfg.mech.omega_m;
  const spectra::CorrelationBasis basis(cfg, w);
  const double via_spectra = basis.xx(0, 0).real() + basis.xx(1, 1).real() -
                             2 * basis.xx(0, 1).real() + basis.yy(0, 0).real() +
                             basis.yy(1, 1).real() + 2 * basis.yy(0, 1).real();
  CHECK(oracle::duan_variance(cfg, 0, 1, w) == doctest::Approx(via_spectra).epsilon(1e-10));
}
