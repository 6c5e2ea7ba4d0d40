#ifndef ILLUMINA_ILLUMINA_H
#define ILLUMINA_ILLUMINA_H

/*
 * C interface to the illumina library.
 *
 * Every fallible call returns an il_status. On failure a description of the
 * most recent error on the calling thread is available from il_last_error().
 * Handles are opaque and must be released with the matching *_free call;
 * passing NULL to a *_free call is a no-op.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ILLUMINA_BUILDING_LIBRARY)
#    define IL_API __declspec(dllexport)
#  else
#    define IL_API __declspec(dllimport)
#  endif
#else
#  define IL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum il_status {
  IL_OK = 0,
  IL_ERR_INVALID_ARGUMENT = 1,
  IL_ERR_CONFIG = 2,
  IL_ERR_NUMERICAL = 3,
  IL_ERR_TRUNCATION = 4,
  IL_ERR_DIMENSION = 5,
  IL_ERR_IO = 6,
  IL_ERR_INTERNAL = 7
} il_status;

typedef struct il_table il_table;
typedef struct il_npe il_npe;
typedef struct il_optim il_optim;

IL_API const char* il_version(void);
IL_API const char* il_status_string(il_status status);
/* Message for the last failing call on this thread; "" if none. */
IL_API const char* il_last_error(void);

/* ---- experiments ------------------------------------------------------- */

typedef struct il_run_options {
  int threads;       /* <= 0 means 1 */
  int has_seed;      /* nonzero: `seed` overrides the configured seeds */
  uint64_t seed;
} il_run_options;

/* Parses `config_toml` and runs one subcommand (fig2 ... fig6, bounds, mc,
 * qfi, snr). `options` may be NULL. */
IL_API il_status il_run_experiment(const char* subcommand, const char* config_toml,
                                   const il_run_options* options, il_table** out);
/* Validates a configuration without running anything. */
IL_API il_status il_check_config(const char* config_toml);

/* The table as CSV text; the pointer stays valid until il_table_free. */
IL_API il_status il_table_csv(const il_table* table, const char** text, size_t* length);
IL_API size_t il_table_rows(const il_table* table);
IL_API void il_table_free(il_table* table);

/* ---- NPE probes --------------------------------------------------------- */

/* sum_n a_n |N-n, n>, a_n = re[n] + i im[n] for n = 0..N; `im` may be NULL.
 * Coefficients are renormalised. */
IL_API il_status il_npe_create(int n_total, const double* re, const double* im, il_npe** out);
IL_API void il_npe_free(il_npe* probe);
IL_API il_status il_npe_signal_energy(const il_npe* probe, double* out);

/* QFI at eta = 0. `generic` nonzero selects the dense eigendecomposition path. */
IL_API il_status il_npe_qfi(const il_npe* probe, double n_th, double tail_tol, size_t max_dim, int generic,
                            double* out);
IL_API il_status il_npe_snr(const il_npe* probe, double eta, double n_th, double* out);

/* ---- closed forms and bounds -------------------------------------------- */

IL_API il_status il_qfi_coherent_closed(double n_signal, double n_th, double* out);
IL_API il_status il_snr_coherent_closed(double n_total, double n_signal, double theta, double eta,
                                        double n_th, double* out);
IL_API il_status il_error_bounds_from_qfi(double f_q, double eta, int m, double* lower, double* upper);
IL_API il_status il_p_err_gaussian(double snr, int m, double* out);

/* ---- optimisation -------------------------------------------------------- */

IL_API il_status il_optimize_npe_qfi(int n_total, double n_th, uint64_t seed, int starts, il_optim** out);
IL_API il_status il_optimize_npe_snr(int n_total, double eta, double n_th, uint64_t seed, int starts,
                                     il_optim** out);
IL_API double il_optim_objective(const il_optim* result);
IL_API double il_optim_signal_energy(const il_optim* result);
IL_API int il_optim_converged(const il_optim* result);
/* Number of coefficients (N+1); copies min(capacity, N+1) of them into `out`. */
IL_API size_t il_optim_coeffs(const il_optim* result, double* out, size_t capacity);
IL_API void il_optim_free(il_optim* result);

#ifdef __cplusplus
}
#endif

#endif /* ILLUMINA_ILLUMINA_H */
