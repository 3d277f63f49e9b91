#include <cmath>

#include "core/entanglement.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace combent;

TEST_CASE("uncoupled modes sit exactly on the Duan bound") {
  auto cfg = testutil::identical_config(3, 0.0, 0.1, 1e6, 1e3, 1.0, 0.0, 0.9);
  for (double w : {0.01, 0.1, 0.22})
    CHECK(entanglement::duan_variance(cfg, 0, 2, w) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("thermal optical occupancy scales the bound to 2(2 n_o + 1)") {
  auto cfg = testutil::identical_config(2, 0.0);
  cfg.modes[0].n_o = cfg.modes[1].n_o = 0.75;
  CHECK(entanglement::duan_variance(cfg, 0, 1, 0.13) ==
        doctest::Approx(2.0 * 2.5).epsilon(1e-12));
}

TEST_CASE("duan_variance rejects a mode paired with itself") {
  auto cfg = testutil::identical_config(2, 0.1);
  CHECK_THROWS_AS(entanglement::duan_variance(cfg, 1, 1, 0.1), ValidationError);
}

TEST_CASE("theta periodicity V(theta) = V(theta + pi)") {
  testutil::ConfigSampler s(41);
  for (int i = 0; i < 30; ++i) {
    auto cfg = s.random_config(2 + i % 2, true, false);
    auto shifted = cfg;
    shifted.theta += M_PI;
    const double w = s.uniform(0.01, 0.24);
    CHECK(entanglement::duan_variance(cfg, 0, 1, w) ==
          doctest::Approx(entanglement::duan_variance(shifted, 0, 1, w)).epsilon(1e-10));
  }
}

TEST_CASE("identical modes make the variance pair-independent") {
  auto cfg = testutil::identical_config(5, 0.2, 0.1, 1e6, 1e3, 1.0, 0.0, -M_PI / 4);
  const double w = 1.1 * cfg.mech.omega_m;
  const double ref = entanglement::duan_variance(cfg, 0, 1, w);
  for (int j = 0; j < 5; ++j)
    for (int l = j + 1; l < 5; ++l)
      CHECK(entanglement::duan_variance(cfg, j, l, w) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("variance matrix is symmetric, including disordered samples") {
  testutil::ConfigSampler s(42);
  auto cfg = s.random_config(4, true, false);
  const auto vm = entanglement::variance_matrix(cfg, 0.12);
  for (int j = 0; j < 4; ++j)
    for (int l = j + 1; l < 4; ++l)
      CHECK(vm.at(j, l) == doctest::Approx(vm.at(l, j)).epsilon(1e-14));
  CHECK(std::isnan(vm.at(2, 2)));
}

TEST_CASE("multipartite verdict") {
  entanglement::VarianceMatrix vm;
  vm.m = 3;
  vm.v.assign(9, 1.9);
  SUBCASE("all below the bound") {
    const auto verdict = entanglement::multipartite_verdict(vm);
    CHECK(verdict.entangled);
    CHECK(verdict.worst_value == doctest::Approx(1.9));
  }
  SUBCASE("one pair above the bound breaks it") {
    vm.v[0 * 3 + 2] = vm.v[2 * 3 + 0] = 2.05;
    const auto verdict = entanglement::multipartite_verdict(vm);
    CHECK(!verdict.entangled);
    CHECK(verdict.worst_j == 0);
    CHECK(verdict.worst_l == 2);
    CHECK(verdict.worst_value == doctest::Approx(2.05));
  }
}

TEST_CASE("fig 3(c) parameters certify ten-partite entanglement at 1.04 Omega_m") {
  auto cfg = testutil::identical_config(10, 0.1, 0.1, 1e6, 1e3, 1.0, 0.0, -M_PI / 4);
  const auto vm = entanglement::variance_matrix(cfg, 1.04 * cfg.mech.omega_m);
  const auto verdict = entanglement::multipartite_verdict(vm);
  CHECK(verdict.entangled);
  CHECK(verdict.worst_value < 2.0);
  CHECK(verdict.worst_value == doctest::Approx(1.91).epsilon(0.03));
}

TEST_CASE("scan_minimum at G = 0 reports the bound with the lowest-grid tie-break") {
  auto cfg = testutil::identical_config(2, 0.0);
  const std::vector<double> omegas{0.01, 0.05, 0.1};
  const std::vector<double> thetas{-0.5, 0.5};
  const auto res = entanglement::scan_minimum(cfg, omegas, thetas);
  CHECK(res.v_min == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(res.omega_opt == 0.01);
  CHECK(res.theta_opt == -0.5);
}

TEST_CASE("scan_minimum rejects empty grids") {
  auto cfg = testutil::identical_config(2, 0.1);
  const std::vector<double> empty;
  const std::vector<double> one{0.1};
  CHECK_THROWS_AS(entanglement::scan_minimum(cfg, empty, one), ValidationError);
}

TEST_CASE("minimum variance decreases with G and respects the 2 - eta/M floor") {
  const double om = 0.1;
  std::vector<double> omegas;
  for (int i = 0; i <= 400; ++i) omegas.push_back((0.01 + 2.49 * i / 400.0) * om);
  const std::vector<double> theta{-M_PI / 4};
  double previous = 2.0 + 1e-9;
  for (double gf : {0.02, 0.05, 0.08, 0.1, 0.2, 0.3, 0.4}) {
    auto cfg = testutil::identical_config(10, gf, om, 1e6, 1e3, 1.0, 0.0, -M_PI / 4);
    const auto res = entanglement::scan_minimum(cfg, omegas, theta);
    CHECK(res.v_min <= previous + 1e-12);
    CHECK(res.v_min >= 2.0 - 1.0 / 10.0 - 1e-6);
    previous = res.v_min;
  }
}

TEST_CASE("per-pair minima are populated") {
  auto cfg = testutil::identical_config(3, 0.2, 0.1, 1e6, 1e3, 1.0, 0.0, M_PI / 4);
  std::vector<double> omegas;
  for (int i = 0; i <= 100; ++i) omegas.push_back((0.01 + 2.49 * i / 100.0) * 0.1);
  const std::vector<double> theta{M_PI / 4};
  const auto res = entanglement::scan_minimum(cfg, omegas, theta);
  REQUIRE(res.per_pair.size() == 3);
  for (const auto& pm : res.per_pair) CHECK(pm.v_min == doctest::Approx(res.v_min));
}

TEST_CASE("analytic minimum formulas") {
  auto cfg = testutil::identical_config(10, 0.1, 0.1, 1e6, 0.0, 1.0, 0.0, M_PI / 4);
  const auto scales = response::simplified_scales(cfg, cfg.mech.omega_m);

  SUBCASE("strong-coupling value at theta = pi/4 and M = 10 is 1.9") {
    const auto res = entanglement::analytic_vmin(scales, 10, M_PI / 4, cfg.mech, 0.0);
    CHECK(res.v_min == doctest::Approx(1.9).epsilon(1e-9));
    CHECK(res.strong_coupling == doctest::Approx(1.9).epsilon(1e-12));
  }
  SUBCASE("theta = pi/2 reaches 2 - 2 eta / M") {
    const auto res = entanglement::analytic_vmin(scales, 10, M_PI / 2, cfg.mech, 0.0);
    CHECK(res.v_min == doctest::Approx(2.0 - 0.2).epsilon(1e-9));
    CHECK(res.delta_opt == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("sin(theta) = 0 has no optimum") {
    CHECK_THROWS_AS(entanglement::analytic_vmin(scales, 10, 0.0, cfg.mech, 0.0),
                    ValidationError);
  }
}

TEST_CASE("entanglement threshold in the sideband detuning") {
  auto cfg = testutil::identical_config(1, 0.3, 0.1, 1e6, 0.0, 1.0, 0.0, M_PI / 4);
  const auto scales = response::simplified_scales(cfg, 0.05);
  SUBCASE("cold single mode at theta = pi/4 needs |delta| > Gamma_meas / 2") {
    const double thr =
        entanglement::entanglement_threshold_delta(scales, 1, M_PI / 4, cfg.mech, 0.0);
    CHECK(thr == doctest::Approx(scales.gamma_meas / 2).epsilon(1e-12));
  }
  SUBCASE("theta = pi/2 opens the band completely") {
    const double thr =
        entanglement::entanglement_threshold_delta(scales, 1, M_PI / 2, cfg.mech, 0.0);
    CHECK(thr == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("sin(theta) = 0 is rejected") {
    CHECK_THROWS_AS(
        entanglement::entanglement_threshold_delta(scales, 1, 0.0, cfg.mech, 0.0),
        ValidationError);
  }
}

TEST_CASE("fig 1(b): grid minimum near theta = pi/2 dips to almost 1") {
  auto cfg = testutil::identical_config(2, 0.3, 0.1, 1e6, 1e3);
  const auto omegas = entanglement::default_omega_grid(cfg);
  std::vector<double> near_half_pi;
  for (double th : entanglement::default_theta_grid())
    if (std::fabs(th - M_PI / 2) <= 0.06 * M_PI) near_half_pi.push_back(th);
  REQUIRE(!near_half_pi.empty());
  const auto res = entanglement::scan_minimum(cfg, omegas, near_half_pi);
  CHECK(res.v_min > 1.0);
  CHECK(res.v_min < 1.1);
}
