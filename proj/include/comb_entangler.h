/* comb_entangler — output-field quadrature noise correlations and
 * continuous-variable entanglement for a frequency-comb-driven multimode
 * optomechanical cavity.
 *
 * C API of the shared library. All objects are opaque handles created and
 * destroyed here; every function returns a status code, with a thread-local
 * human-readable message available from combent_last_error(). Frequencies
 * passed in and out of this API are angular, in the config's internal unit
 * system (a "hz" document is converted to rad/s at parse time).
 */
#ifndef COMB_ENTANGLER_H
#define COMB_ENTANGLER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum combent_status {
  COMBENT_OK = 0,
  COMBENT_ERR_INVALID_ARGUMENT = 1, /* bad handle, index, or parameter */
  COMBENT_ERR_VALIDATION = 2,       /* malformed config or violated invariant */
  COMBENT_ERR_NUMERIC = 3,          /* non-convergence, singular system, residue */
  COMBENT_ERR_IO = 4                /* file could not be read */
} combent_status;

typedef enum combent_route {
  COMBENT_ROUTE_FULL = 0,
  COMBENT_ROUTE_SIMPLIFIED = 1,
  COMBENT_ROUTE_ORACLE = 2
} combent_route;

typedef struct combent_config combent_config;
typedef struct combent_ensemble combent_ensemble;

const char* combent_version(void);

/* Last error message for the calling thread; valid until the next API call. */
const char* combent_last_error(void);

/* ---- configuration ------------------------------------------------- */

/* Parses a JSON config document, validates it, and resolves any physical
 * drive blocks into linearized couplings and effective detunings. */
combent_status combent_config_parse(const char* json_text, combent_config** out);
combent_status combent_config_load(const char* path, combent_config** out);
void combent_config_free(combent_config* cfg);

/* Canonical JSON serialization; free the returned buffer with
 * combent_string_free. */
combent_status combent_config_serialize(const combent_config* cfg, char** json_out);
void combent_string_free(char* s);

combent_status combent_config_hash(const combent_config* cfg, uint64_t* out);
combent_status combent_config_mode_count(const combent_config* cfg, int* out);
combent_status combent_config_omega_m(const combent_config* cfg, double* out);
combent_status combent_config_theta(const combent_config* cfg, double* out);

/* Copy with a different quadrature angle. */
combent_status combent_config_with_theta(const combent_config* cfg, double theta,
                                         combent_config** out);

/* Steady-state photon number of mode j; requires a drive block on that mode. */
combent_status combent_config_photon_number(const combent_config* cfg, int j, double* out);

/* Standalone steady-state photon number, rates in rad/s, at fixed effective
 * detuning. */
combent_status combent_photon_number(double power_w, double wavelength_m, double kappa_e,
                                     double kappa_i, double delta, double* out);

/* ---- correlations and variances ------------------------------------ */

/* <dX_j(w) dX_l(-w)> and <dY_j(w) dY_l(-w)>. `valid` (may be NULL) reports
 * the simplified route's validity flag; 1 for the other routes. */
combent_status combent_correlation(const combent_config* cfg, int j, int l, double omega,
                                   combent_route route, double* xx_re, double* xx_im,
                                   double* yy_re, double* yy_im, int* valid);

/* Full sweep over a strictly increasing grid, evaluated in parallel.
 * `values` receives n_omega * M * M * 4 doubles laid out grid-major,
 * then row-major over (j,l), then [xx_re, xx_im, yy_re, yy_im].
 * `valid` (may be NULL) one flag per grid point. */
combent_status combent_spectrum_run(const combent_config* cfg, const double* omegas,
                                    size_t n_omega, combent_route route, double* values,
                                    int* valid);

/* Duan variance sum V_jl; < 2 certifies pairwise inseparability. */
combent_status combent_duan_variance(const combent_config* cfg, int j, int l, double omega,
                                     combent_route route, double* v, int* valid);

/* V_jl on an omega grid for all M(M-1)/2 pairs (j<l, row-major pair order),
 * evaluated in parallel. `v` holds n_omega * n_pairs entries, grid-major;
 * `valid` (may be NULL) one flag per grid point. */
combent_status combent_variance_grid(const combent_config* cfg, const double* omegas,
                                     size_t n_omega, combent_route route, double* v,
                                     int* valid);

/* Symmetric M x M variance matrix at one frequency (diagonal = NaN). */
combent_status combent_variance_matrix(const combent_config* cfg, double omega, double* out);

/* Grid minimum of the worst-pair variance; ties break toward the lowest
 * omega, then the lowest theta. */
combent_status combent_scan_minimum(const combent_config* cfg, const double* omegas,
                                    size_t n_omega, const double* thetas, size_t n_theta,
                                    double* v_min, double* omega_opt, double* theta_opt,
                                    int* j, int* l);

/* Closed-form identical-mode minimum and optimal sideband detuning, with the
 * filter scale Gamma_meas evaluated at omega_eval. */
combent_status combent_analytic_vmin(const combent_config* cfg, double omega_eval,
                                     double* v_min, double* delta_opt);

/* Sideband detuning |delta| above which the simplified model gives V < 2. */
combent_status combent_threshold_delta(const combent_config* cfg, double omega_eval,
                                       double* delta_thr);

/* ---- disorder ensembles --------------------------------------------- */

/* targets: bit 0 varies G_j, bit 1 varies kappa_e,j. */
combent_status combent_ensemble_run(const combent_config* cfg, double sigma_rel,
                                    uint64_t seed, uint32_t samples, unsigned targets,
                                    const double* omegas, size_t n_omega, double theta,
                                    combent_ensemble** out);
void combent_ensemble_free(combent_ensemble* ens);

combent_status combent_ensemble_pair_count(const combent_ensemble* ens, size_t* out);
combent_status combent_ensemble_pair(const combent_ensemble* ens, size_t p, int* j, int* l);

typedef enum combent_stat { COMBENT_STAT_MIN = 0, COMBENT_STAT_MAX = 1, COMBENT_STAT_MEAN = 2 } combent_stat;
combent_status combent_ensemble_stat(const combent_ensemble* ens, combent_stat kind,
                                     size_t pair, size_t omega_index, double* out);
combent_status combent_ensemble_sample_value(const combent_ensemble* ens, uint32_t sample,
                                             size_t pair, size_t omega_index, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COMB_ENTANGLER_H */
