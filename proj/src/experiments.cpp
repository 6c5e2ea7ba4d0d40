#include "experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "channel.hpp"
#include "errors.hpp"
#include "measurement.hpp"
#include "metrology.hpp"
#include "optimize.hpp"

namespace illumina {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0; // drop the sign of -0
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, r.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int k = 15; k >= 0; --k) {
    buf[k] = digits[v & 0xf];
    v >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

std::string join_coeffs(const std::vector<double>& c) {
  std::string s;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k) s += ' ';
    s += format_number(c[k]);
  }
  return s;
}

// Index-addressed parallel loop; the lowest-index exception wins.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  const std::size_t nt = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::exception_ptr> errs(n);
  auto body = [&](std::size_t w) {
    for (std::size_t k = w; k < n; k += nt) {
      try {
        fn(k);
      } catch (...) {
        errs[k] = std::current_exception();
      }
    }
  };
  if (nt <= 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nt; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

double normal_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Content-addressed store of optimiser results. An entry is used only when
// both its key and the recorded context hash match the current request.
class ResultCache {
public:
  explicit ResultCache(std::string dir) : dir_(std::move(dir)) {}

  bool enabled() const { return !dir_.empty(); }

  std::optional<OptimResult> get(const std::string& key, std::uint64_t context) const {
    if (!enabled()) return std::nullopt;
    std::ifstream in(path(key));
    if (!in) return std::nullopt;
    try {
      const nlohmann::json j = nlohmann::json::parse(in);
      if (j.at("key").get<std::string>() != key || j.at("context").get<std::string>() != hex64(context))
        return std::nullopt;
      OptimResult r;
      r.coeffs = j.at("coeffs").get<std::vector<double>>();
      r.objective = j.at("objective").get<double>();
      r.n_signal = j.at("n_signal").get<double>();
      r.starts = j.at("starts").get<int>();
      r.converged = j.at("converged").get<bool>();
      r.best_start_seed = j.at("best_start_seed").get<std::uint64_t>();
      r.best_is_warm_start = j.at("best_is_warm_start").get<bool>();
      r.agreeing_starts = j.at("agreeing_starts").get<int>();
      return r;
    } catch (const nlohmann::json::exception&) {
      return std::nullopt; // unreadable entries are recomputed and overwritten
    }
  }

  void put(const std::string& key, std::uint64_t context, const OptimResult& r) const {
    if (!enabled()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error("cache: cannot create directory " + dir_ + ": " + ec.message());
    nlohmann::json j{{"key", key},
                     {"context", hex64(context)},
                     {"coeffs", r.coeffs},
                     {"objective", r.objective},
                     {"n_signal", r.n_signal},
                     {"starts", r.starts},
                     {"converged", r.converged},
                     {"best_start_seed", r.best_start_seed},
                     {"best_is_warm_start", r.best_is_warm_start},
                     {"agreeing_starts", r.agreeing_starts}};
    const std::string final_path = path(key);
    const std::string tmp = final_path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << j.dump(2) << '\n';
      if (!out) throw Error("cache: cannot write " + tmp);
    }
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) throw Error("cache: cannot move entry into place: " + ec.message());
  }

private:
  std::string path(const std::string& key) const {
    return (std::filesystem::path(dir_) / (hex64(fnv1a64(key)) + ".json")).string();
  }

  std::string dir_;
};

struct Chain {
  int n_total;
  std::string objective; // "qfi" or "snr"
  double eta = 0.0;
};

// Optimises along an n_th grid, each point warm-started from the previous one.
std::vector<OptimResult> optimize_chain(const Chain& ch, const std::vector<double>& grid,
                                        const ExperimentConfig& cfg, int threads, const ResultCache& cache) {
  OptimOptions o;
  o.seed = cfg.optimizer.seed;
  o.starts = cfg.optimizer.starts;
  o.max_iter = cfg.optimizer.max_iter;
  o.threads = threads;

  std::string context = "truncation=" + format_number(cfg.truncation.tail_tol) + "/" +
                        std::to_string(cfg.truncation.max_dim) + ";starts=" + std::to_string(o.starts) +
                        ";max_iter=" + std::to_string(o.max_iter) + ";eta=" + format_number(ch.eta) + ";chain=";
  std::vector<OptimResult> out;
  for (double t : grid) {
    context += format_number(t) + ",";
    const std::string key = "N=" + std::to_string(ch.n_total) + ";n_th=" + format_number(t) +
                            ";objective=" + ch.objective + ";seed=" + std::to_string(o.seed);
    const std::uint64_t ctx = fnv1a64(context);
    std::optional<OptimResult> r = cache.get(key, ctx);
    if (!r) {
      r = ch.objective == "qfi" ? optimize_npe_qfi(ch.n_total, t, o, cfg.truncation)
                                : optimize_npe_snr(ch.n_total, ch.eta, t, o);
      cache.put(key, ctx, *r);
    }
    o.warm_start = r->coeffs;
    out.push_back(std::move(*r));
  }
  return out;
}

Table base_table(const ExperimentConfig& cfg, const std::string& cmd, bool uses_optimizer) {
  Table t;
  t.comments.push_back(std::string("illumina ") + ILLUMINA_VERSION_STRING);
  t.comments.push_back("subcommand: " + cmd);
  t.comments.push_back("config_hash: fnv1a64:" + hex64(fnv1a64(canonical_config(cfg, cmd))));
  t.comments.push_back("truncation: tail_tol=" + format_number(cfg.truncation.tail_tol) +
                       " max_dim=" + std::to_string(cfg.truncation.max_dim));
  if (uses_optimizer)
    t.comments.push_back("optimizer: seed=" + std::to_string(cfg.optimizer.seed) +
                         " starts=" + std::to_string(cfg.optimizer.starts) +
                         " max_iter=" + std::to_string(cfg.optimizer.max_iter));
  return t;
}

std::int64_t flag(bool b) { return b ? 1 : 0; }

double thermal_tail_for(double n_th, const TruncationPolicy& p) {
  return thermal_distribution(n_th, p).tail_mass;
}

void note_tail(Table& t, double tail) { t.comments.push_back("max_tail_mass: " + format_number(tail)); }

} // namespace

std::string Table::to_csv() const {
  std::string s;
  for (const auto& c : comments) s += "# " + c + "\n";
  for (std::size_t k = 0; k < columns.size(); ++k) s += (k ? "," : "") + csv_field(columns[k]);
  s += "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) s += (k ? "," : "") + csv_field(cell_text(row[k]));
    s += "\n";
  }
  return s;
}

Table run_fig2(const ExperimentConfig& cfg, const RunOptions& opts) {
  Table t = base_table(cfg, "fig2", true);
  t.comments.push_back("probe: optimised 4PE; references |sqrt2,sqrt2> (N_S=2) and |2,0> (N_S=4)");
  t.columns = {"n_th", "f_q_4pe", "n_signal_opt", "ratio_vs_sqrt2sqrt2", "ratio_vs_20", "converged"};
  const ResultCache cache(cfg.cache.dir);
  const auto res = optimize_chain({4, "qfi"}, cfg.fig2.n_th, cfg, opts.threads, cache);
  double tail = 0.0;
  for (std::size_t k = 0; k < res.size(); ++k) {
    const double n = cfg.fig2.n_th[k];
    tail = std::max(tail, thermal_tail_for(n, cfg.truncation));
    t.rows.push_back({n, res[k].objective, res[k].n_signal, res[k].objective / qfi_coherent_closed(2.0, n),
                      res[k].objective / qfi_coherent_closed(4.0, n), flag(res[k].converged)});
  }
  note_tail(t, tail);
  return t;
}

Table run_fig3(const ExperimentConfig& cfg, const RunOptions& opts) {
  Table t = base_table(cfg, "fig3", true);
  const int N = cfg.fig3.n_total;
  t.comments.push_back("probe: optimised " + std::to_string(N) + "PE; coherent and TMSV at the same N_S");
  t.columns = {"n_th", "f_q_npe", "f_q_coh", "f_q_tmsv", "n_signal_opt", "converged"};
  const ResultCache cache(cfg.cache.dir);
  const auto res = optimize_chain({N, "qfi"}, cfg.fig3.n_th, cfg, opts.threads, cache);
  std::vector<double> tmsv(res.size());
  parallel_for(res.size(), opts.threads, [&](std::size_t k) {
    tmsv[k] = qfi_product_fast(tmsv_diagonal_idler_form(res[k].n_signal, cfg.truncation),
                               thermal_distribution(cfg.fig3.n_th[k], cfg.truncation))
                  .f_q;
  });
  double tail = 0.0;
  for (std::size_t k = 0; k < res.size(); ++k) {
    const double n = cfg.fig3.n_th[k];
    tail = std::max(tail, thermal_tail_for(n, cfg.truncation));
    t.rows.push_back({n, res[k].objective, qfi_coherent_closed(res[k].n_signal, n), tmsv[k], res[k].n_signal,
                      flag(res[k].converged)});
  }
  note_tail(t, tail);
  return t;
}

Table run_fig4(const ExperimentConfig& cfg, const RunOptions& opts) {
  Table t = base_table(cfg, "fig4", true);
  t.comments.push_back("coherent reference: |sqrt(N_S)> at the NPE optimum's N_S; gap = F_coh - F_npe");
  t.columns = {"N", "n_th", "f_q_coh", "f_q_npe", "gap_over_n", "n_signal_opt", "converged"};
  const ResultCache cache(cfg.cache.dir);
  const auto& ns = cfg.fig4.n_total;
  std::vector<std::vector<OptimResult>> res(ns.size());
  parallel_for(ns.size(), opts.threads,
               [&](std::size_t k) { res[k] = optimize_chain({ns[k], "qfi"}, cfg.fig4.n_th, cfg, 1, cache); });
  double tail = 0.0;
  for (std::size_t a = 0; a < ns.size(); ++a)
    for (std::size_t b = 0; b < cfg.fig4.n_th.size(); ++b) {
      const double n = cfg.fig4.n_th[b];
      const OptimResult& r = res[a][b];
      const double coh = qfi_coherent_closed(r.n_signal, n);
      tail = std::max(tail, thermal_tail_for(n, cfg.truncation));
      t.rows.push_back({static_cast<std::int64_t>(ns[a]), n, coh, r.objective, (coh - r.objective) / ns[a],
                        r.n_signal, flag(r.converged)});
    }
  note_tail(t, tail);
  return t;
}

Table run_fig5(const ExperimentConfig& cfg, const RunOptions& opts) {
  Table t = base_table(cfg, "fig5", true);
  t.columns = {"N", "n_th", "fraction", "n_signal_opt", "f_q_npe", "converged"};
  const ResultCache cache(cfg.cache.dir);
  const auto& ns = cfg.fig5.n_total;
  std::vector<std::vector<OptimResult>> res(ns.size());
  parallel_for(ns.size(), opts.threads,
               [&](std::size_t k) { res[k] = optimize_chain({ns[k], "qfi"}, cfg.fig5.n_th, cfg, 1, cache); });
  double tail = 0.0;
  for (std::size_t a = 0; a < ns.size(); ++a)
    for (std::size_t b = 0; b < cfg.fig5.n_th.size(); ++b) {
      const OptimResult& r = res[a][b];
      tail = std::max(tail, thermal_tail_for(cfg.fig5.n_th[b], cfg.truncation));
      t.rows.push_back({static_cast<std::int64_t>(ns[a]), cfg.fig5.n_th[b], r.n_signal / ns[a], r.n_signal,
                        r.objective, flag(r.converged)});
    }
  note_tail(t, tail);
  return t;
}

Table run_fig6(const ExperimentConfig& cfg, const RunOptions& opts) {
  Table t = base_table(cfg, "fig6", true);
  const int N = cfg.fig6.n_total;
  t.comments.push_back("eta: " + format_number(cfg.fig6.eta));
  t.comments.push_back("probe: SNR-optimised " + std::to_string(N) +
                       "PE; coherent |sqrt(N_S), sqrt(N - N_S)> at the same N_S, theta = 0");
  t.columns = {"n_th", "snr_npe_opt", "snr_coh_same_ns", "abs_diff", "n_signal_opt", "converged"};
  const ResultCache cache(cfg.cache.dir);
  const auto res = optimize_chain({N, "snr", cfg.fig6.eta}, cfg.fig6.n_th, cfg, opts.threads, cache);
  for (std::size_t k = 0; k < res.size(); ++k) {
    const double n = cfg.fig6.n_th[k];
    const double coh = snr_coherent_closed(N, res[k].n_signal, 0.0, cfg.fig6.eta, n);
    t.rows.push_back({n, res[k].objective, coh, std::abs(res[k].objective - coh), res[k].n_signal,
                      flag(res[k].converged)});
  }
  note_tail(t, 0.0);
  return t;
}

Table run_bounds(const ExperimentConfig& cfg, const RunOptions& opts) {
  Table t = base_table(cfg, "bounds", true);
  const auto& b = cfg.bounds;
  t.comments.push_back("eta: " + format_number(b.eta));
  t.comments.push_back("probes: optimised " + std::to_string(b.n_total) +
                       "PE; coherent and TMSV at the optimum's N_S; priors 1/2");
  t.columns = {"state",          "n_th",      "m",           "n_signal",   "f_q",
               "qfi_lower",      "qfi_upper", "fidelity",    "fid_lower",  "fid_upper",
               "helstrom_single", "chernoff_q", "chernoff_s", "chernoff_bound", "bhattacharyya_bound"};
  const ResultCache cache(cfg.cache.dir);
  const auto opt = optimize_chain({b.n_total, "qfi"}, b.n_th, cfg, opts.threads, cache);

  struct PointResult {
    double n_signal = 0.0, f_q = 0.0, fid = 1.0, helstrom = 0.5, tail = 0.0;
    ChernoffResult chern;
    double bhatt = 1.0;
  };
  const std::size_t ns = b.states.size(), nn = b.n_th.size();
  std::vector<PointResult> pts(ns * nn);
  parallel_for(pts.size(), opts.threads, [&](std::size_t idx) {
    const std::string& st = b.states[idx / nn];
    const std::size_t k = idx % nn;
    const double n = b.n_th[k];
    PointResult& p = pts[idx];
    p.n_signal = opt[k].n_signal;
    std::optional<StateVector> probe;
    if (st == "npe") {
      const NpeState s = NpeState::from_real(b.n_total, opt[k].coeffs);
      probe = npe_vector(s);
      p.f_q = qfi_product_fast(s, n, cfg.truncation).f_q;
    } else if (st == "coherent") {
      const CoherentProbe c{std::sqrt(p.n_signal)};
      probe = coherent_probe_vector(c, cfg.truncation);
      p.f_q = qfi_product_fast(c, n, cfg.truncation).f_q;
    } else {
      probe = tmsv_vector(p.n_signal, cfg.truncation);
      p.f_q = qfi_product_fast(tmsv_diagonal_idler_form(p.n_signal, cfg.truncation),
                               thermal_distribution(n, cfg.truncation))
                  .f_q;
    }
    const DensityOperator r0 = apply_channel(*probe, {0.0, n, cfg.truncation});
    if (r0.mat().rows() > static_cast<Eigen::Index>(cfg.truncation.max_dim))
      throw TruncationOverflow("bounds: joint output space exceeds max_dim", static_cast<std::size_t>(r0.mat().rows()));
    const DensityOperator r1 = apply_channel(*probe, {b.eta, n, cfg.truncation});
    const DiscriminationReport d = discriminate(r0, r1);
    p.fid = d.fidelity;
    p.helstrom = d.p_err_helstrom;
    p.chern = {d.chernoff_q, d.chernoff_s_star};
    p.bhatt = d.bhattacharyya;
    p.tail = r1.tail_mass();
  });

  double tail = 0.0;
  for (std::size_t a = 0; a < ns; ++a)
    for (std::size_t k = 0; k < nn; ++k) {
      const PointResult& p = pts[a * nn + k];
      tail = std::max(tail, p.tail);
      for (int m : b.m) {
        const ErrorBounds eb = error_bounds_from_qfi(p.f_q, b.eta, m);
        const auto fb = fidelity_error_bounds(p.fid, m);
        t.rows.push_back({b.states[a], b.n_th[k], static_cast<std::int64_t>(m), p.n_signal, p.f_q, eb.lower,
                          eb.upper, p.fid, fb.first, fb.second, p.helstrom, p.chern.q, p.chern.s_star,
                          0.5 * std::pow(p.chern.q, m), 0.5 * std::pow(p.bhatt, m)});
      }
    }
  note_tail(t, tail);
  return t;
}

double eta_for_snr(int n_total, double n_th, double target) {
  const NpeState probe = NpeState::from_real(n_total, std::vector<double>(static_cast<std::size_t>(n_total) + 1, 1.0));
  auto f = [&](double eta) { return snr(probe, eta, n_th).snr; };
  double lo = 0.0, hi = 1.0;
  if (f(hi) < target) throw NumericalError("eta_for_snr: target SNR is not reachable with eta <= 1");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Table run_mc(const ExperimentConfig& cfg, const RunOptions& opts) {
  Table t = base_table(cfg, "mc", false);
  const McConfig& c = cfg.mc;
  const double eta = eta_for_snr(c.n_total, c.n_th, c.snr);
  const NpeState s = NpeState::from_real(c.n_total, std::vector<double>(static_cast<std::size_t>(c.n_total) + 1, 1.0));
  const StateVector probe = npe_vector(s);
  const OutcomePmf pmf0 = outcome_pmf(probe, 0.0, c.n_th, cfg.truncation);
  const OutcomePmf pmf1 = outcome_pmf(probe, eta, c.n_th, cfg.truncation);
  const double snr_pmf = (pmf1.mean() - pmf0.mean()) / (std::sqrt(pmf0.variance()) + std::sqrt(pmf1.variance()));
  t.comments.push_back("probe: balanced " + std::to_string(c.n_total) + "PE, n_th=" + format_number(c.n_th) +
                       ", eta=" + format_number(eta) + " (solved for snr=" + format_number(c.snr) + ")");
  t.comments.push_back("seed: " + std::to_string(c.seed) + " trials: " + std::to_string(c.trials));
  t.comments.push_back("control rows test the H0 pmf against itself");
  t.columns = {"kind", "m", "eta", "snr", "p_err_hat", "stderr", "p_err_gaussian", "p_err_normal",
               "p_false_alarm", "p_miss"};
  for (const char* kind : {"probe", "control"}) {
    const bool control = std::string(kind) == "control";
    for (int m : c.m) {
      const DetectionEstimate e = simulate_detection(pmf0, control ? pmf0 : pmf1, m, c.trials, c.seed, opts.threads);
      const double snr_used = control ? 0.0 : snr_pmf;
      t.rows.push_back({std::string(kind), static_cast<std::int64_t>(m), control ? 0.0 : eta, snr_used, e.p_err_hat,
                        e.stderr_, p_err_gaussian(snr_used, m), normal_tail(std::sqrt(static_cast<double>(m)) * snr_used),
                        e.p_false_alarm, e.p_miss});
    }
  }
  note_tail(t, std::max(pmf0.tail_mass, pmf1.tail_mass));
  return t;
}

Table run_qfi(const ExperimentConfig& cfg, const RunOptions& opts) {
  Table t = base_table(cfg, "qfi", cfg.qfi.probe == "npe" && cfg.qfi.coeffs.empty());
  const QfiConfig& q = cfg.qfi;
  t.columns = {"probe", "n_total", "n_signal", "n_th", "f_q", "method", "support_dim", "kernel_term", "tail_mass",
               "coeffs"};
  QfiReport rep;
  double n_signal = q.n_signal;
  std::vector<double> coeffs;
  std::int64_t n_total = 0;
  if (q.probe == "npe") {
    n_total = q.n_total;
    if (q.coeffs.empty()) {
      OptimOptions o;
      o.seed = cfg.optimizer.seed;
      o.starts = cfg.optimizer.starts;
      o.max_iter = cfg.optimizer.max_iter;
      o.threads = opts.threads;
      coeffs = optimize_npe_qfi(q.n_total, q.n_th, o, cfg.truncation).coeffs;
    } else {
      coeffs = q.coeffs;
    }
    const NpeState s = NpeState::from_real(q.n_total, coeffs);
    n_signal = signal_energy(s);
    rep = q.method == "fast" ? qfi_product_fast(s, q.n_th, cfg.truncation)
                             : qfi_generic(npe_vector(s), q.n_th, cfg.truncation);
  } else if (q.probe == "coherent") {
    const CoherentProbe c{std::sqrt(q.n_signal)};
    rep = q.method == "fast" ? qfi_product_fast(c, q.n_th, cfg.truncation)
                             : qfi_generic(coherent_probe_vector(c, cfg.truncation), q.n_th, cfg.truncation);
  } else {
    rep = q.method == "fast" ? qfi_product_fast(tmsv_diagonal_idler_form(q.n_signal, cfg.truncation),
                                                thermal_distribution(q.n_th, cfg.truncation))
                             : qfi_generic(tmsv_vector(q.n_signal, cfg.truncation), q.n_th, cfg.truncation);
  }
  t.rows.push_back({q.probe, n_total, n_signal, q.n_th, rep.f_q, to_string(rep.method),
                    static_cast<std::int64_t>(rep.support_dim), rep.kernel_term, rep.tail_mass, join_coeffs(coeffs)});
  return t;
}

Table run_snr(const ExperimentConfig& cfg, const RunOptions& opts) {
  const SnrConfig& q = cfg.snr;
  Table t = base_table(cfg, "snr", q.probe == "npe" && q.coeffs.empty());
  t.columns = {"probe", "n_total", "n_signal", "theta", "eta", "n_th", "snr", "snr_closed", "mean0", "mean1",
               "sigma0", "sigma1", "threshold", "coeffs"};
  SnrReport rep;
  Cell closed = std::string();
  double n_signal = q.n_signal;
  std::vector<double> coeffs;
  if (q.probe == "npe") {
    if (q.coeffs.empty()) {
      OptimOptions o;
      o.seed = cfg.optimizer.seed;
      o.starts = cfg.optimizer.starts;
      o.max_iter = cfg.optimizer.max_iter;
      o.threads = opts.threads;
      coeffs = optimize_npe_snr(q.n_total, q.eta, q.n_th, o).coeffs;
    } else {
      coeffs = q.coeffs;
    }
    const NpeState s = NpeState::from_real(q.n_total, coeffs);
    n_signal = signal_energy(s);
    rep = snr(s, q.eta, q.n_th);
  } else {
    const CoherentProbe c{std::sqrt(q.n_signal), std::polar(std::sqrt(q.n_total - q.n_signal), q.theta)};
    rep = snr(coherent_probe_vector(c, cfg.truncation), q.eta, q.n_th);
    closed = snr_coherent_closed(q.n_total, q.n_signal, q.theta, q.eta, q.n_th);
  }
  const MomentReport& m = rep.moments;
  t.rows.push_back({q.probe, static_cast<std::int64_t>(q.n_total), n_signal, q.theta, q.eta, q.n_th, rep.snr, closed,
                    m.mean0, m.mean1, m.sigma0, m.sigma1, m.threshold, join_coeffs(coeffs)});
  return t;
}

Table run_experiment(const std::string& cmd, ExperimentConfig cfg, const RunOptions& opts) {
  if (opts.seed) {
    cfg.optimizer.seed = *opts.seed;
    cfg.mc.seed = *opts.seed;
  }
  if (cmd == "fig2") return run_fig2(cfg, opts);
  if (cmd == "fig3") return run_fig3(cfg, opts);
  if (cmd == "fig4") return run_fig4(cfg, opts);
  if (cmd == "fig5") return run_fig5(cfg, opts);
  if (cmd == "fig6") return run_fig6(cfg, opts);
  if (cmd == "bounds") return run_bounds(cfg, opts);
  if (cmd == "mc") return run_mc(cfg, opts);
  if (cmd == "qfi") return run_qfi(cfg, opts);
  if (cmd == "snr") return run_snr(cfg, opts);
  throw ConfigError("unknown subcommand '" + cmd + "'");
}

} // namespace illumina
