#include "illumina/illumina.h"

#include <new>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "measurement.hpp"
#include "metrology.hpp"
#include "optimize.hpp"

struct il_table {
  std::string csv;
  std::size_t rows = 0;
};

struct il_npe {
  illumina::NpeState state;
};

struct il_optim {
  illumina::OptimResult result;
};

namespace {

thread_local std::string g_last_error;

il_status fail(il_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs f, translating exceptions into status codes.
template <class F>
il_status guarded(F&& f) {
  using namespace illumina;
  try {
    g_last_error.clear();
    f();
    return IL_OK;
  } catch (const ConfigError& e) {
    return fail(IL_ERR_CONFIG, e.what());
  } catch (const InvalidArgument& e) {
    return fail(IL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const TruncationOverflow& e) {
    return fail(IL_ERR_TRUNCATION, e.what());
  } catch (const DimensionError& e) {
    return fail(IL_ERR_DIMENSION, e.what());
  } catch (const NumericalError& e) {
    return fail(IL_ERR_NUMERICAL, e.what());
  } catch (const Error& e) {
    return fail(IL_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(IL_ERR_NUMERICAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(IL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(IL_ERR_INTERNAL, "unknown error");
  }
}

#define IL_REQUIRE(cond, msg)                                                                                \
  do {                                                                                                       \
    if (!(cond)) return fail(IL_ERR_INVALID_ARGUMENT, msg);                                                  \
  } while (0)

} // namespace

extern "C" {

const char* il_version(void) { return ILLUMINA_VERSION_STRING; }

const char* il_status_string(il_status s) {
  switch (s) {
  case IL_OK: return "ok";
  case IL_ERR_INVALID_ARGUMENT: return "invalid argument";
  case IL_ERR_CONFIG: return "configuration error";
  case IL_ERR_NUMERICAL: return "numerical failure";
  case IL_ERR_TRUNCATION: return "truncation overflow";
  case IL_ERR_DIMENSION: return "dimension mismatch";
  case IL_ERR_IO: return "i/o error";
  case IL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* il_last_error(void) { return g_last_error.c_str(); }

il_status il_run_experiment(const char* subcommand, const char* config_toml, const il_run_options* options,
                            il_table** out) {
  IL_REQUIRE(subcommand && config_toml && out, "il_run_experiment: null argument");
  *out = nullptr;
  return guarded([&] {
    illumina::RunOptions ro;
    if (options) {
      ro.threads = options->threads > 0 ? options->threads : 1;
      if (options->has_seed) ro.seed = options->seed;
    }
    const illumina::Table t = illumina::run_experiment(subcommand, illumina::parse_config(config_toml), ro);
    *out = new il_table{t.to_csv(), t.rows.size()};
  });
}

il_status il_check_config(const char* config_toml) {
  IL_REQUIRE(config_toml, "il_check_config: null argument");
  return guarded([&] { (void)illumina::parse_config(config_toml); });
}

il_status il_table_csv(const il_table* table, const char** text, size_t* length) {
  IL_REQUIRE(table && text, "il_table_csv: null argument");
  *text = table->csv.c_str();
  if (length) *length = table->csv.size();
  return IL_OK;
}

size_t il_table_rows(const il_table* table) { return table ? table->rows : 0; }

void il_table_free(il_table* table) { delete table; }

il_status il_npe_create(int n_total, const double* re, const double* im, il_npe** out) {
  IL_REQUIRE(re && out, "il_npe_create: null argument");
  *out = nullptr;
  return guarded([&] {
    if (n_total < 0) throw illumina::InvalidArgument("il_npe_create: N must be nonnegative");
    std::vector<illumina::cplx> c(static_cast<std::size_t>(n_total) + 1);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = {re[k], im ? im[k] : 0.0};
    *out = new il_npe{illumina::NpeState(n_total, std::move(c))};
  });
}

void il_npe_free(il_npe* probe) { delete probe; }

il_status il_npe_signal_energy(const il_npe* probe, double* out) {
  IL_REQUIRE(probe && out, "il_npe_signal_energy: null argument");
  return guarded([&] { *out = illumina::signal_energy(probe->state); });
}

il_status il_npe_qfi(const il_npe* probe, double n_th, double tail_tol, size_t max_dim, int generic, double* out) {
  IL_REQUIRE(probe && out, "il_npe_qfi: null argument");
  return guarded([&] {
    const illumina::TruncationPolicy pol{tail_tol, max_dim};
    pol.validate();
    *out = generic ? illumina::qfi_generic(illumina::npe_vector(probe->state), n_th, pol).f_q
                   : illumina::qfi_product_fast(probe->state, n_th, pol).f_q;
  });
}

il_status il_npe_snr(const il_npe* probe, double eta, double n_th, double* out) {
  IL_REQUIRE(probe && out, "il_npe_snr: null argument");
  return guarded([&] { *out = illumina::snr(probe->state, eta, n_th).snr; });
}

il_status il_qfi_coherent_closed(double n_signal, double n_th, double* out) {
  IL_REQUIRE(out, "il_qfi_coherent_closed: null argument");
  return guarded([&] { *out = illumina::qfi_coherent_closed(n_signal, n_th); });
}

il_status il_snr_coherent_closed(double n_total, double n_signal, double theta, double eta, double n_th,
                                 double* out) {
  IL_REQUIRE(out, "il_snr_coherent_closed: null argument");
  return guarded([&] { *out = illumina::snr_coherent_closed(n_total, n_signal, theta, eta, n_th); });
}

il_status il_error_bounds_from_qfi(double f_q, double eta, int m, double* lower, double* upper) {
  IL_REQUIRE(lower && upper, "il_error_bounds_from_qfi: null argument");
  return guarded([&] {
    const illumina::ErrorBounds b = illumina::error_bounds_from_qfi(f_q, eta, m);
    *lower = b.lower;
    *upper = b.upper;
  });
}

il_status il_p_err_gaussian(double snr, int m, double* out) {
  IL_REQUIRE(out, "il_p_err_gaussian: null argument");
  return guarded([&] { *out = illumina::p_err_gaussian(snr, m); });
}

il_status il_optimize_npe_qfi(int n_total, double n_th, uint64_t seed, int starts, il_optim** out) {
  IL_REQUIRE(out, "il_optimize_npe_qfi: null argument");
  *out = nullptr;
  return guarded([&] {
    illumina::OptimOptions o;
    o.seed = seed;
    o.starts = starts;
    *out = new il_optim{illumina::optimize_npe_qfi(n_total, n_th, o)};
  });
}

il_status il_optimize_npe_snr(int n_total, double eta, double n_th, uint64_t seed, int starts, il_optim** out) {
  IL_REQUIRE(out, "il_optimize_npe_snr: null argument");
  *out = nullptr;
  return guarded([&] {
    illumina::OptimOptions o;
    o.seed = seed;
    o.starts = starts;
    *out = new il_optim{illumina::optimize_npe_snr(n_total, eta, n_th, o)};
  });
}

double il_optim_objective(const il_optim* r) { return r ? r->result.objective : 0.0; }

double il_optim_signal_energy(const il_optim* r) { return r ? r->result.n_signal : 0.0; }

int il_optim_converged(const il_optim* r) { return r && r->result.converged ? 1 : 0; }

size_t il_optim_coeffs(const il_optim* r, double* out, size_t capacity) {
  if (!r) return 0;
  const auto& c = r->result.coeffs;
  if (out)
    for (size_t k = 0; k < c.size() && k < capacity; ++k) out[k] = c[k];
  return c.size();
}

void il_optim_free(il_optim* r) { delete r; }

} // extern "C"
