/* Exercises the public C interface from C. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "illumina/illumina.h"

static int failures = 0;

#define EXPECT(cond)                                                                                  \
  do {                                                                                                \
    if (!(cond)) {                                                                                    \
      fprintf(stderr, "%s:%d: expectation failed: %s (%s)\n", __FILE__, __LINE__, #cond, il_last_error()); \
      ++failures;                                                                                     \
    }                                                                                                 \
  } while (0)

static int close_to(double a, double b, double tol) { return fabs(a - b) <= tol * fmax(1.0, fabs(b)); }

int main(void) {
  EXPECT(strlen(il_version()) > 0);
  EXPECT(strcmp(il_status_string(IL_ERR_CONFIG), "configuration error") == 0);

  /* |4,0> at zero temperature. */
  const double re[5] = {1, 0, 0, 0, 0};
  il_npe* probe = NULL;
  EXPECT(il_npe_create(4, re, NULL, &probe) == IL_OK);
  double v = 0;
  EXPECT(il_npe_signal_energy(probe, &v) == IL_OK && close_to(v, 4.0, 1e-14));
  EXPECT(il_npe_qfi(probe, 0.0, 1e-12, 4096, 0, &v) == IL_OK && close_to(v, 16.0, 1e-10));
  EXPECT(il_npe_qfi(probe, 0.0, 1e-12, 4096, 1, &v) == IL_OK && close_to(v, 16.0, 1e-10));
  EXPECT(il_npe_snr(probe, 0.1, 1.0, &v) == IL_OK && v == 0.0);
  EXPECT(il_npe_qfi(probe, 20.0, 1e-12, 8, 0, &v) == IL_ERR_TRUNCATION);
  EXPECT(strlen(il_last_error()) > 0);
  il_npe_free(probe);
  il_npe_free(NULL);

  EXPECT(il_npe_create(2, re, NULL, NULL) == IL_ERR_INVALID_ARGUMENT);
  EXPECT(il_npe_create(-1, re, NULL, &probe) == IL_ERR_INVALID_ARGUMENT && probe == NULL);

  EXPECT(il_qfi_coherent_closed(2.0, 1.0, &v) == IL_OK && close_to(v, 8.0 / 3.0, 1e-14));
  EXPECT(il_snr_coherent_closed(4, 2, 0, 0.1, 1, &v) == IL_OK && close_to(v, 0.4 / (sqrt(6.97) + sqrt(7.0)), 1e-12));
  EXPECT(il_snr_coherent_closed(2, 3, 0, 0.1, 1, &v) == IL_ERR_INVALID_ARGUMENT);
  double lo = 0, hi = 0;
  EXPECT(il_error_bounds_from_qfi(8.0, 0.5, 4, &lo, &hi) == IL_OK && close_to(hi, 0.5 * exp(-1.0), 1e-14) && lo < hi);
  EXPECT(il_p_err_gaussian(0.1, 200, &v) == IL_OK && close_to(v, exp(-1.0), 1e-14));

  il_optim* opt = NULL;
  EXPECT(il_optimize_npe_qfi(4, 0.0, 1, 4, &opt) == IL_OK);
  EXPECT(close_to(il_optim_objective(opt), 16.0, 1e-9));
  EXPECT(il_optim_converged(opt) == 1);
  double c[8];
  EXPECT(il_optim_coeffs(opt, c, 8) == 5 && c[0] * c[0] > 1 - 1e-6);
  EXPECT(il_optim_coeffs(opt, NULL, 0) == 5);
  il_optim_free(opt);

  il_table* table = NULL;
  il_run_options ro = {2, 0, 0};
  EXPECT(il_run_experiment("qfi", "[qfi]\nprobe = \"coherent\"\nn_signal = 2\nn_th = 1\n", &ro, &table) == IL_OK);
  EXPECT(il_table_rows(table) == 1);
  const char* csv = NULL;
  size_t len = 0;
  EXPECT(il_table_csv(table, &csv, &len) == IL_OK && len == strlen(csv) && strstr(csv, "f_q") != NULL);
  il_table_free(table);

  table = NULL;
  EXPECT(il_run_experiment("fig2", "[fig2]\nbogus = 1\n", NULL, &table) == IL_ERR_CONFIG && table == NULL);
  EXPECT(strstr(il_last_error(), "bogus") != NULL);
  EXPECT(il_run_experiment("fig9", "", NULL, &table) == IL_ERR_CONFIG);
  EXPECT(il_check_config("[mc]\ntrials = 10\n") == IL_OK);
  EXPECT(strlen(il_last_error()) == 0);
  EXPECT(il_check_config(NULL) == IL_ERR_INVALID_ARGUMENT);

  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  else printf("C API: all checks passed\n");
  return failures ? 1 : 0;
}
