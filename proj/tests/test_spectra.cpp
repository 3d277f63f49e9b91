#include <cmath>
#include <complex>

#include "core/oracle.hpp"
#include "core/response.hpp"
#include "core/spectra.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace combent;
using spectra::cd;
using testutil::close;

TEST_CASE("uncoupled modes give pure shot noise") {
  auto cfg = testutil::identical_config(2, 0.0, 0.1, 1e6, 1e3, 1.0, 0.0, 0.4);
  for (double w : {0.02, 0.1, 0.19}) {
    CHECK(close(spectra::xx_correlation_full(cfg, 0, 0, w), cd(0.5, 0), 1e-14));
    CHECK(close(spectra::yy_correlation_full(cfg, 1, 1, w), cd(0.5, 0), 1e-14));
    CHECK(std::abs(spectra::xx_correlation_full(cfg, 0, 1, w)) < 1e-15);
    CHECK(std::abs(spectra::yy_correlation_full(cfg, 0, 1, w)) < 1e-15);
  }
}

TEST_CASE("thermal optical input raises the shot floor to (2 n_o + 1)/2") {
  auto cfg = testutil::identical_config(1, 0.0);
  cfg.modes[0].n_o = 1.5;
  CHECK(close(spectra::xx_correlation_full(cfg, 0, 0, 0.07), cd(2.0, 0), 1e-13));
}

TEST_CASE("single-mode quadrature rotation XX(theta) = YY(theta + pi/2)") {
  testutil::ConfigSampler s(21);
  for (int i = 0; i < 40; ++i) {
    auto cfg = s.random_config(1, true, true);
    const double w = s.uniform(0.01, 0.25);
    auto rotated = cfg;
    rotated.theta += M_PI / 2;
    CHECK(close(spectra::xx_correlation_full(cfg, 0, 0, w),
                spectra::yy_correlation_full(rotated, 0, 0, w), 1e-11, 1e-13));
  }
}

TEST_CASE("hermiticity: XX_jl(w) equals conj(XX_lj(w))") {
  testutil::ConfigSampler s(22);
  for (int i = 0; i < 60; ++i) {
    auto cfg = s.random_config(2 + i % 3, true, true);
    const double w = s.uniform(0.005, 0.25);
    const spectra::CorrelationBasis basis(cfg, w);
    for (int j = 0; j < cfg.mode_count(); ++j)
      for (int l = 0; l < cfg.mode_count(); ++l) {
        CHECK(close(basis.xx(j, l), std::conj(basis.xx(l, j)), 1e-11, 1e-14));
        CHECK(close(basis.yy(j, l), std::conj(basis.yy(l, j)), 1e-11, 1e-14));
      }
  }
}

TEST_CASE("diagonal spectra are real and non-negative") {
  testutil::ConfigSampler s(23);
  for (int i = 0; i < 60; ++i) {
    auto cfg = s.random_config(1 + i % 4, true, false);
    const double w = s.uniform(0.005, 0.25);
    const auto xx = spectra::xx_correlation_full(cfg, 0, 0, w);
    const auto yy = spectra::yy_correlation_full(cfg, 0, 0, w);
    const double scale_x = std::max(1.0, std::abs(xx));
    CHECK(std::abs(xx.imag()) < 1e-10 * scale_x);
    CHECK(std::abs(yy.imag()) < 1e-10 * std::max(1.0, std::abs(yy)));
    CHECK(xx.real() > -1e-10);
    CHECK(yy.real() > -1e-10);
  }
}

TEST_CASE("single-mode Heisenberg product XX * YY >= 1/4") {
  testutil::ConfigSampler s(24);
  for (int i = 0; i < 30; ++i) {
    auto cfg = s.random_config(1, true, false);
    cfg.modes[0].kappa_i = 0.0;
    cfg.modes[0].kappa_e = 1.0;
    for (int k = 0; k < 12; ++k) {
      const double w = 0.01 + 0.02 * k;
      const double xx = spectra::xx_correlation_full(cfg, 0, 0, w).real();
      const double yy = spectra::yy_correlation_full(cfg, 0, 0, w).real();
      CHECK(xx * yy >= 0.25 * (1.0 - 1e-8));
    }
  }
}

TEST_CASE("full formulas match the scattering oracle on detuned lossy configs") {
  testutil::ConfigSampler s(25);
  for (int i = 0; i < 12; ++i) {
    auto cfg = s.random_config(1 + i % 4, true, i % 2 == 1);
    const double w = s.uniform(0.005, 0.25);
    const auto table = oracle::correlation_table(cfg, w);
    const spectra::CorrelationBasis basis(cfg, w);
    for (int j = 0; j < cfg.mode_count(); ++j)
      for (int l = 0; l < cfg.mode_count(); ++l) {
        CHECK(close(basis.xx(j, l), table.xx(j, l), 1e-8, 1e-12));
        CHECK(close(basis.yy(j, l), table.yy(j, l), 1e-8, 1e-12));
      }
  }
}

TEST_CASE("fig 1(b) spot checks against the oracle") {
  auto cfg = testutil::identical_config(2, 0.3, 0.1, 1e6, 1e3, 1.0, 0.0, -M_PI / 4);
  const double om = cfg.mech.omega_m;
  const auto xx = spectra::xx_correlation_full(cfg, 0, 1, 0.5 * om);
  CHECK(close(xx, oracle::oracle_correlation(cfg, 0, 1, 0.5 * om, oracle::Quadrature::X),
              1e-8, 1e-12));
  cfg.theta = M_PI / 4;
  const auto yy = spectra::yy_correlation_full(cfg, 0, 1, 1.3 * om);
  CHECK(close(yy, oracle::oracle_correlation(cfg, 0, 1, 1.3 * om, oracle::Quadrature::Y),
              1e-8, 1e-12));
}

TEST_CASE("simplified route: G = 0 leaves the shot term only") {
  auto cfg = testutil::identical_config(2, 0.0, 0.1, 1e6, 1e3, 1.0, 0.0, 0.7);
  CHECK(close(spectra::xx_correlation_simplified(cfg, 0, 0, 0.05), cd(0.5, 0), 1e-14));
  CHECK(std::abs(spectra::xx_correlation_simplified(cfg, 0, 1, 0.05)) < 1e-15);
}

TEST_CASE("simplified route at theta = pi/2: XX carries factor 2, YY collapses") {
  auto cfg = testutil::identical_config(2, 0.3, 0.1, 1e6, 1e3, 1.0, 0.0, M_PI / 2);
  const double w = 0.06;
  const auto xx = spectra::xx_correlation_simplified(cfg, 0, 1, w);
  const auto yy = spectra::yy_correlation_simplified(cfg, 0, 1, w);
  CHECK(std::abs(yy) < 1e-14);  // (1 + cos 2theta) and sin 2theta both vanish
  const auto s = response::simplified_scales(cfg, w);
  const double m = 2.0;
  const double half = s.gamma_meas / (2 * s.delta);
  const double thermal = cfg.mech.omega_m * s.delta *
                         (cfg.mech.n_th / cfg.mech.quality_factor()) *
                         (1.0 / (s.delta_minus * s.delta_minus) +
                          1.0 / (s.delta_plus * s.delta_plus));
  const double expected = 2.0 * (s.eta * m * half * half + s.eta * (s.gamma_meas / s.delta) * thermal);
  CHECK(xx.real() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("simplified route flags points near the sideband degeneracy") {
  auto cfg = testutil::identical_config(2, 0.3, 0.1, 1e6, 1e3, 1.0, 0.0, M_PI / 4);
  bool valid = true;
  spectra::xx_correlation_simplified(cfg, 0, 1, cfg.mech.omega_m * (1.0 + 1e-7), &valid);
  CHECK(!valid);
  spectra::xx_correlation_simplified(cfg, 0, 1, cfg.mech.omega_m * 1.5, &valid);
  CHECK(valid);
}

TEST_CASE("simplified route rejects non-identical modes") {
  auto cfg = testutil::identical_config(2, 0.3);
  cfg.modes[0].kappa_i = 0.05;
  cfg.modes[0].kappa_e = 0.95;
  CHECK_THROWS_AS(spectra::xx_correlation_simplified(cfg, 0, 1, 0.05), ValidationError);
}

TEST_CASE("full vs simplified stay within 5% on fig 1(b) parameters") {
  auto cfg = testutil::identical_config(2, 0.3, 0.1, 1e6, 1e3, 1.0, 0.0, M_PI / 4);
  const double om = cfg.mech.omega_m, gm = cfg.mech.gamma_m;
  for (int i = 0; i <= 400; ++i) {
    const double w = (0.2 + 1.6 * i / 400.0) * om;
    if (std::fabs(w - om) < 100 * gm) continue;
    const double full = spectra::xx_correlation_full(cfg, 0, 1, w).real();
    const double simp = spectra::xx_correlation_simplified(cfg, 0, 1, w).real();
    CHECK(std::fabs(full - simp) <= 0.05 * std::fabs(full) + 1e-12);
  }
}

TEST_CASE("sweep fills grid x pair-count values and validates the grid") {
  auto cfg = testutil::identical_config(3, 0.2, 0.1, 1e6, 1e3, 1.0, 0.0, M_PI / 4);
  std::vector<double> grid{0.02, 0.05, 0.11, 0.14};
  const auto result = spectra::sweep(cfg, grid, spectra::Route::Full);
  CHECK(result.pair_count() == 9);
  CHECK(result.values.size() == grid.size() * 9);
  CHECK(result.theta == doctest::Approx(M_PI / 4));
  CHECK(result.config_hash == config_hash(cfg));
  // entries agree with the direct per-point evaluation
  CHECK(close(result.values[9 + 1].xx, spectra::xx_correlation_full(cfg, 0, 1, grid[1]),
              1e-14));

  const auto via_oracle = spectra::sweep(cfg, grid, spectra::Route::Oracle);
  for (std::size_t k = 0; k < result.values.size(); ++k)
    CHECK(close(result.values[k].xx, via_oracle.values[k].xx, 1e-8, 1e-12));

  std::vector<double> unsorted{0.05, 0.02};
  CHECK_THROWS_AS(spectra::sweep(cfg, unsorted, spectra::Route::Full), ValidationError);
  std::vector<double> empty;
  CHECK_THROWS_AS(spectra::sweep(cfg, empty, spectra::Route::Full), ValidationError);
}

TEST_CASE("correlation_matrix structure") {
  SUBCASE("single mode gives one real diagonal entry") {
    auto cfg = testutil::identical_config(1, 0.2, 0.1, 1e6, 10.0, 1.0, 0.0, 0.3);
    const auto table = spectra::correlation_matrix(cfg, 0.07);
    REQUIRE(table.size() == 1);
    CHECK(table[0].j == 0);
    CHECK(std::abs(table[0].xx.imag()) < 1e-10);
  }
  SUBCASE("identical modes make all off-diagonal entries equal") {
    auto cfg = testutil::identical_config(4, 0.5, 0.1, 1e6, 1e3, 1.0, 0.0, M_PI / 4);
    const auto table = spectra::correlation_matrix(cfg, 0.08);
    cd ref{};
    bool first = true;
    for (const auto& pc : table) {
      if (pc.j == pc.l) continue;
      if (first) {
        ref = pc.xx;
        first = false;
      }
      CHECK(close(pc.xx, ref, 1e-10, 1e-12));
    }
  }
  SUBCASE("out-of-range index throws") {
    auto cfg = testutil::identical_config(2, 0.1);
    CHECK_THROWS_AS(spectra::xx_correlation_full(cfg, 0, 5, 0.05), ValidationError);
  }
}
