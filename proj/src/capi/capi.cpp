#include "comb_entangler.h"

#include <complex>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "core/disorder.hpp"
#include "core/entanglement.hpp"
#include "core/model.hpp"
#include "core/oracle.hpp"
#include "core/parallel.hpp"
#include "core/response.hpp"
#include "core/spectra.hpp"

using namespace combent;

struct combent_config {
  SystemConfig cfg;                 // drive-resolved
  SystemConfig as_parsed;           // original document form, for serialization
  response::SteadyState steady;     // populated when drives are present
  bool has_steady = false;
};

struct combent_ensemble {
  disorder::EnsembleStats stats;
};

namespace {

thread_local std::string g_last_error;

combent_status fail(combent_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
combent_status guarded(Fn&& fn) {
  try {
    fn();
    return COMBENT_OK;
  } catch (const ValidationError& e) {
    return fail(COMBENT_ERR_VALIDATION, e.what());
  } catch (const NumericError& e) {
    return fail(COMBENT_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(COMBENT_ERR_NUMERIC, "out of memory");
  } catch (const std::exception& e) {
    return fail(COMBENT_ERR_INVALID_ARGUMENT, e.what());
  }
}

combent_status require_handle(const void* p) {
  if (!p) return fail(COMBENT_ERR_INVALID_ARGUMENT, "null handle");
  return COMBENT_OK;
}

spectra::Route to_route(combent_route r) {
  switch (r) {
    case COMBENT_ROUTE_SIMPLIFIED:
      return spectra::Route::Simplified;
    case COMBENT_ROUTE_ORACLE:
      return spectra::Route::Oracle;
    default:
      return spectra::Route::Full;
  }
}

}  // namespace

extern "C" {

const char* combent_version(void) { return "0.1.0"; }

const char* combent_last_error(void) { return g_last_error.c_str(); }

combent_status combent_config_parse(const char* json_text, combent_config** out) {
  if (!json_text || !out)
    return fail(COMBENT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto handle = std::make_unique<combent_config>();
    handle->as_parsed = parse_config(json_text);
    if (handle->as_parsed.has_drives()) {
      handle->steady = response::steady_state(handle->as_parsed);
      handle->has_steady = true;
      handle->cfg = response::resolve_drives(handle->as_parsed);
    } else {
      handle->cfg = handle->as_parsed;
    }
    *out = handle.release();
  });
}

combent_status combent_config_load(const char* path, combent_config** out) {
  if (!path || !out)
    return fail(COMBENT_ERR_INVALID_ARGUMENT, "null argument");
  std::ifstream in(path);
  if (!in)
    return fail(COMBENT_ERR_IO, std::string("cannot open config file: ") + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return combent_config_parse(buf.str().c_str(), out);
}

void combent_config_free(combent_config* cfg) { delete cfg; }

combent_status combent_config_serialize(const combent_config* cfg, char** json_out) {
  if (auto s = require_handle(cfg)) return s;
  if (!json_out) return fail(COMBENT_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    const std::string text = serialize_config(cfg->as_parsed);
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *json_out = buf;
  });
}

void combent_string_free(char* s) { delete[] s; }

combent_status combent_config_hash(const combent_config* cfg, uint64_t* out) {
  if (auto s = require_handle(cfg)) return s;
  return guarded([&] { *out = config_hash(cfg->as_parsed); });
}

combent_status combent_config_mode_count(const combent_config* cfg, int* out) {
  if (auto s = require_handle(cfg)) return s;
  *out = cfg->cfg.mode_count();
  return COMBENT_OK;
}

combent_status combent_config_omega_m(const combent_config* cfg, double* out) {
  if (auto s = require_handle(cfg)) return s;
  *out = cfg->cfg.mech.omega_m;
  return COMBENT_OK;
}

combent_status combent_config_theta(const combent_config* cfg, double* out) {
  if (auto s = require_handle(cfg)) return s;
  *out = cfg->cfg.theta;
  return COMBENT_OK;
}

combent_status combent_config_with_theta(const combent_config* cfg, double theta,
                                         combent_config** out) {
  if (auto s = require_handle(cfg)) return s;
  if (!out) return fail(COMBENT_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    auto handle = std::make_unique<combent_config>(*cfg);
    handle->cfg.theta = theta;
    handle->as_parsed.theta = theta;
    validate(handle->cfg);
    *out = handle.release();
  });
}

combent_status combent_config_photon_number(const combent_config* cfg, int j, double* out) {
  if (auto s = require_handle(cfg)) return s;
  if (!cfg->has_steady)
    return fail(COMBENT_ERR_INVALID_ARGUMENT, "config has no drive blocks");
  if (j < 0 || j >= cfg->cfg.mode_count())
    return fail(COMBENT_ERR_INVALID_ARGUMENT, "mode index out of range");
  *out = cfg->steady.photon_number[j];
  return COMBENT_OK;
}

combent_status combent_photon_number(double power_w, double wavelength_m, double kappa_e,
                                     double kappa_i, double delta, double* out) {
  if (!out) return fail(COMBENT_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    if (power_w < 0.0) throw ValidationError("power_w: must be >= 0");
    if (wavelength_m <= 0.0) throw ValidationError("wavelength_m: must be > 0");
    if (kappa_e < 0.0 || kappa_e + kappa_i <= 0.0)
      throw ValidationError("kappa_e/kappa_i: need kappa_e >= 0 and kappa_e + kappa_i > 0");
    *out = response::photon_number(power_w, wavelength_m, kappa_e, kappa_i, delta);
  });
}

combent_status combent_correlation(const combent_config* cfg, int j, int l, double omega,
                                   combent_route route, double* xx_re, double* xx_im,
                                   double* yy_re, double* yy_im, int* valid) {
  if (auto s = require_handle(cfg)) return s;
  return guarded([&] {
    std::complex<double> xx, yy;
    bool ok = true;
    switch (route) {
      case COMBENT_ROUTE_SIMPLIFIED:
        xx = spectra::xx_correlation_simplified(cfg->cfg, j, l, omega, &ok);
        yy = spectra::yy_correlation_simplified(cfg->cfg, j, l, omega);
        break;
      case COMBENT_ROUTE_ORACLE: {
        const auto table = oracle::correlation_table(cfg->cfg, omega);
        if (j < 0 || l < 0 || j >= cfg->cfg.mode_count() || l >= cfg->cfg.mode_count())
          throw ValidationError("mode index out of range");
        xx = table.xx(j, l);
        yy = table.yy(j, l);
        break;
      }
      default:
        xx = spectra::xx_correlation_full(cfg->cfg, j, l, omega);
        yy = spectra::yy_correlation_full(cfg->cfg, j, l, omega);
    }
    if (xx_re) *xx_re = xx.real();
    if (xx_im) *xx_im = xx.imag();
    if (yy_re) *yy_re = yy.real();
    if (yy_im) *yy_im = yy.imag();
    if (valid) *valid = ok ? 1 : 0;
  });
}

combent_status combent_spectrum_run(const combent_config* cfg, const double* omegas,
                                    size_t n_omega, combent_route route, double* values,
                                    int* valid) {
  if (auto s = require_handle(cfg)) return s;
  if (!omegas || n_omega == 0 || !values)
    return fail(COMBENT_ERR_INVALID_ARGUMENT, "null or empty grid");
  return guarded([&] {
    const auto result = spectra::sweep(cfg->cfg, {omegas, n_omega}, to_route(route));
    const std::size_t per_point = static_cast<std::size_t>(cfg->cfg.mode_count()) *
                                  cfg->cfg.mode_count();
    for (std::size_t i = 0; i < n_omega; ++i) {
      bool point_ok = true;
      for (std::size_t p = 0; p < per_point; ++p) {
        const auto& pc = result.values[i * per_point + p];
        double* slot = values + (i * per_point + p) * 4;
        slot[0] = pc.xx.real();
        slot[1] = pc.xx.imag();
        slot[2] = pc.yy.real();
        slot[3] = pc.yy.imag();
        point_ok = point_ok && pc.valid;
      }
      if (valid) valid[i] = point_ok ? 1 : 0;
    }
  });
}

combent_status combent_duan_variance(const combent_config* cfg, int j, int l, double omega,
                                     combent_route route, double* v, int* valid) {
  if (auto s = require_handle(cfg)) return s;
  return guarded([&] {
    bool ok = true;
    double value;
    if (route == COMBENT_ROUTE_ORACLE)
      value = oracle::duan_variance(cfg->cfg, j, l, omega);
    else
      value = entanglement::duan_variance(cfg->cfg, j, l, omega, to_route(route), &ok);
    if (v) *v = value;
    if (valid) *valid = ok ? 1 : 0;
  });
}

combent_status combent_variance_grid(const combent_config* cfg, const double* omegas,
                                     size_t n_omega, combent_route route, double* v,
                                     int* valid) {
  if (auto s = require_handle(cfg)) return s;
  if (!omegas || n_omega == 0 || !v)
    return fail(COMBENT_ERR_INVALID_ARGUMENT, "null or empty grid");
  return guarded([&] {
    const int m = cfg->cfg.mode_count();
    if (m < 2) throw ValidationError("variance grid requires at least two modes");
    const std::size_t pairs = static_cast<std::size_t>(m) * (m - 1) / 2;
    parallel_for(n_omega, [&](std::size_t i) {
      bool ok = true;
      std::size_t p = 0;
      if (route == COMBENT_ROUTE_FULL) {
        const spectra::CorrelationBasis basis(cfg->cfg, omegas[i]);
        for (int a = 0; a < m; ++a)
          for (int b = a + 1; b < m; ++b)
            v[i * pairs + p++] = entanglement::duan_variance(basis, a, b);
      } else if (route == COMBENT_ROUTE_ORACLE) {
        const auto table = oracle::correlation_table(cfg->cfg, omegas[i]);
        for (int a = 0; a < m; ++a)
          for (int b = a + 1; b < m; ++b) {
            const std::complex<double> val =
                table.xx(a, a) + table.xx(b, b) - 2.0 * table.xx(a, b).real() +
                table.yy(a, a) + table.yy(b, b) + 2.0 * table.yy(a, b).real();
            v[i * pairs + p++] = val.real();
          }
      } else {
        for (int a = 0; a < m; ++a)
          for (int b = a + 1; b < m; ++b) {
            bool point_ok = true;
            v[i * pairs + p++] = entanglement::duan_variance(cfg->cfg, a, b, omegas[i],
                                                             to_route(route), &point_ok);
            ok = ok && point_ok;
          }
      }
      if (valid) valid[i] = ok ? 1 : 0;
    });
  });
}

combent_status combent_variance_matrix(const combent_config* cfg, double omega, double* out) {
  if (auto s = require_handle(cfg)) return s;
  if (!out) return fail(COMBENT_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    const auto vm = entanglement::variance_matrix(cfg->cfg, omega);
    std::memcpy(out, vm.v.data(), vm.v.size() * sizeof(double));
  });
}

combent_status combent_scan_minimum(const combent_config* cfg, const double* omegas,
                                    size_t n_omega, const double* thetas, size_t n_theta,
                                    double* v_min, double* omega_opt, double* theta_opt,
                                    int* j, int* l) {
  if (auto s = require_handle(cfg)) return s;
  if (!omegas || !thetas)
    return fail(COMBENT_ERR_INVALID_ARGUMENT, "null grid");
  return guarded([&] {
    const auto res = entanglement::scan_minimum(cfg->cfg, {omegas, n_omega}, {thetas, n_theta});
    if (v_min) *v_min = res.v_min;
    if (omega_opt) *omega_opt = res.omega_opt;
    if (theta_opt) *theta_opt = res.theta_opt;
    if (j) *j = res.j;
    if (l) *l = res.l;
  });
}

combent_status combent_analytic_vmin(const combent_config* cfg, double omega_eval,
                                     double* v_min, double* delta_opt) {
  if (auto s = require_handle(cfg)) return s;
  return guarded([&] {
    const auto scales = response::simplified_scales(cfg->cfg, omega_eval);
    const auto res = entanglement::analytic_vmin(scales, cfg->cfg.mode_count(),
                                                 cfg->cfg.theta, cfg->cfg.mech,
                                                 cfg->cfg.modes.front().n_o);
    if (v_min) *v_min = res.v_min;
    if (delta_opt) *delta_opt = res.delta_opt;
  });
}

combent_status combent_threshold_delta(const combent_config* cfg, double omega_eval,
                                       double* delta_thr) {
  if (auto s = require_handle(cfg)) return s;
  return guarded([&] {
    const auto scales = response::simplified_scales(cfg->cfg, omega_eval);
    *delta_thr = entanglement::entanglement_threshold_delta(
        scales, cfg->cfg.mode_count(), cfg->cfg.theta, cfg->cfg.mech,
        cfg->cfg.modes.front().n_o);
  });
}

combent_status combent_ensemble_run(const combent_config* cfg, double sigma_rel,
                                    uint64_t seed, uint32_t samples, unsigned targets,
                                    const double* omegas, size_t n_omega, double theta,
                                    combent_ensemble** out) {
  if (auto s = require_handle(cfg)) return s;
  if (!omegas || n_omega == 0 || !out)
    return fail(COMBENT_ERR_INVALID_ARGUMENT, "null or empty grid");
  return guarded([&] {
    disorder::DisorderSpec spec;
    spec.sigma_rel = sigma_rel;
    spec.seed = seed;
    spec.samples = samples;
    spec.vary_g = (targets & 1u) != 0;
    spec.vary_kappa_e = (targets & 2u) != 0;
    auto ens = std::make_unique<combent_ensemble>();
    ens->stats = disorder::ensemble_variance(cfg->cfg, spec, {omegas, n_omega}, theta);
    *out = ens.release();
  });
}

void combent_ensemble_free(combent_ensemble* ens) { delete ens; }

combent_status combent_ensemble_pair_count(const combent_ensemble* ens, size_t* out) {
  if (auto s = require_handle(ens)) return s;
  *out = ens->stats.pairs.size();
  return COMBENT_OK;
}

combent_status combent_ensemble_pair(const combent_ensemble* ens, size_t p, int* j, int* l) {
  if (auto s = require_handle(ens)) return s;
  if (p >= ens->stats.pairs.size())
    return fail(COMBENT_ERR_INVALID_ARGUMENT, "pair index out of range");
  if (j) *j = ens->stats.pairs[p].first;
  if (l) *l = ens->stats.pairs[p].second;
  return COMBENT_OK;
}

combent_status combent_ensemble_stat(const combent_ensemble* ens, combent_stat kind,
                                     size_t pair, size_t omega_index, double* out) {
  if (auto s = require_handle(ens)) return s;
  if (pair >= ens->stats.pairs.size() || omega_index >= ens->stats.omega_grid.size())
    return fail(COMBENT_ERR_INVALID_ARGUMENT, "index out of range");
  switch (kind) {
    case COMBENT_STAT_MIN:
      *out = ens->stats.min_v[pair][omega_index];
      break;
    case COMBENT_STAT_MAX:
      *out = ens->stats.max_v[pair][omega_index];
      break;
    case COMBENT_STAT_MEAN:
      *out = ens->stats.mean_v[pair][omega_index];
      break;
    default:
      return fail(COMBENT_ERR_INVALID_ARGUMENT, "unknown statistic");
  }
  return COMBENT_OK;
}

combent_status combent_ensemble_sample_value(const combent_ensemble* ens, uint32_t sample,
                                             size_t pair, size_t omega_index, double* out) {
  if (auto s = require_handle(ens)) return s;
  if (sample >= ens->stats.traces.size() || pair >= ens->stats.pairs.size() ||
      omega_index >= ens->stats.omega_grid.size())
    return fail(COMBENT_ERR_INVALID_ARGUMENT, "index out of range");
  *out = ens->stats.traces[sample][pair][omega_index];
  return COMBENT_OK;
}

}  // extern "C"
