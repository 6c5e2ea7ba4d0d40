// Acceptance gate. Each criterion prints one PASS/FAIL line with the measured
// quantity and its tolerance. Usage: illumina_acceptance [criterion ...]
// (no arguments runs all of them). Exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "channel.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "measurement.hpp"
#include "metrology.hpp"
#include "optimize.hpp"

using namespace illumina;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Matrix random_density(std::size_t d, std::mt19937_64& rng, std::size_t rank) {
  std::normal_distribution<double> nd;
  Matrix g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rank));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = cplx(nd(rng), nd(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

Outcome coherent_qfi_closed_form() {
  const auto t0 = Clock::now();
  const TruncationPolicy pol;
  double worst = 0.0;
  for (double ns : {1.0, 2.0, 4.0})
    for (double n_th : {0.0, 1.0, 5.0}) {
      const StateVector v = coherent_probe_vector(CoherentProbe{cplx(std::sqrt(ns))}, pol);
      worst = std::max(worst, rel(qfi_generic(v, n_th, pol).f_q, qfi_coherent_closed(ns, n_th)));
    }
  const double dt = seconds_since(t0);
  return {worst <= 1e-4 && dt < 60.0,
          fmt("max rel err %.3e (tol 1e-4), runtime %.2f s (limit 60 s)", worst, dt)};
}

Outcome zero_temperature_optimum() {
  const OptimResult r = optimize_npe_qfi(4, 0.0, OptimOptions{});
  const double a0 = r.coeffs[0] * r.coeffs[0];
  return {a0 >= 1 - 1e-6 && std::abs(r.objective - 16.0) <= 1e-6,
          fmt("|a0|^2 = %.12f (need >= 1-1e-6), objective %.10f (need 16 +- 1e-6)", a0, r.objective)};
}

Outcome coherent_beats_npe() {
  const auto t0 = Clock::now();
  double lo = INFINITY, hi = -INFINITY;
  bool ordered = true;
  for (double n_th : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    const OptimResult r = optimize_npe_qfi(4, n_th, OptimOptions{});
    const double coh = qfi_coherent_closed(r.n_signal, n_th);
    ordered &= coh >= r.objective;
    lo = std::min(lo, r.objective / coh);
    hi = std::max(hi, r.objective / coh);
  }
  const double dt = seconds_since(t0);
  return {ordered && lo >= 0.9 && hi <= 1.0 && dt < 600.0,
          fmt("F_coh >= F_4PE: %s; ratio F_4PE/F_coh in [%.4f, %.4f] (need within [0.9, 1.0]), runtime %.1f s",
              ordered ? "yes" : "no", lo, hi, dt)};
}

Outcome signal_energy_behaviour() {
  const std::vector<double> grid{0.0, 0.1, 0.2, 0.5, 1.0};
  std::vector<double> ns;
  for (double n : grid) ns.push_back(optimize_npe_qfi(4, n, OptimOptions{}).n_signal);
  bool decreasing = true;
  for (std::size_t k = 1; k < ns.size(); ++k) decreasing &= ns[k] < ns[k - 1];
  const double at5 = optimize_npe_qfi(4, 5.0, OptimOptions{}).n_signal;
  const bool pass = std::abs(ns[0] - 4.0) <= 1e-6 && at5 >= 2.7 && at5 <= 3.3 && decreasing;
  return {pass, fmt("N_S_opt(0) = %.8f (need 4), N_S_opt(5) = %.4f (need [2.7, 3.3]), "
                    "N_S_opt(0,0.1,0.2,0.5,1) = %.4f %.4f %.4f %.4f %.4f strictly decreasing: %s",
                    ns[0], at5, ns[0], ns[1], ns[2], ns[3], ns[4], decreasing ? "yes" : "no")};
}

Outcome energy_fraction() {
  const std::vector<int> n_list{2, 4, 10, 20, 30, 40};
  const auto cells = energy_fraction_sweep(n_list, {0.0, 10.0}, OptimOptions{});
  double worst_zero = 0.0, at_30_10 = NAN;
  for (const auto& c : cells) {
    if (!c.ok) return {false, "optimisation failed at N=" + std::to_string(c.n_total) + ": " + c.error};
    if (c.n_th == 0.0) worst_zero = std::max(worst_zero, std::abs(c.fraction - 1.0));
    if (c.n_total == 30 && c.n_th == 10.0) at_30_10 = c.fraction;
  }
  return {at_30_10 >= 0.9 && worst_zero <= 1e-6,
          fmt("fraction(N=30, n_th=10) = %.6f (need >= 0.9), max |fraction - 1| at n_th=0 over N in "
              "{2,4,10,20,30,40} = %.2e (tol 1e-6)",
              at_30_10, worst_zero)};
}

Outcome snr_equivalence() {
  const double eta = 0.01;
  double worst = 0.0;
  bool mono_npe = true, mono_coh = true;
  double prev_npe = INFINITY, prev_coh = INFINITY;
  OptimOptions o;
  for (double n_th : kDefaultNthGrid) {
    const OptimResult r = optimize_npe_snr(4, eta, n_th, o);
    o.warm_start = r.coeffs;
    const double coh = snr_coherent_closed(4, r.n_signal, 0.0, eta, n_th);
    worst = std::max(worst, std::abs(r.objective - coh));
    mono_npe &= r.objective <= prev_npe;
    mono_coh &= coh <= prev_coh;
    prev_npe = r.objective;
    prev_coh = coh;
  }
  return {worst <= 1e-5 && mono_npe && mono_coh,
          fmt("max |SNR_4PE - SNR_coh| = %.3e (tol 1e-5), non-increasing: 4PE %s, coherent %s", worst,
              mono_npe ? "yes" : "no", mono_coh ? "yes" : "no")};
}

Outcome closed_form_snr() {
  const TruncationPolicy pol;
  double worst = 0.0;
  for (double eta : {0.01, 0.05, 0.1, 0.15, 0.2})
    for (double n_th : {0.0, 0.5, 1.0, 5.0, 10.0}) {
      const StateVector v = coherent_probe_vector({cplx(std::sqrt(2.0)), cplx(std::sqrt(2.0))}, pol);
      worst = std::max(worst, rel(snr(v, eta, n_th).snr, snr_coherent_closed(4, 2, 0, eta, n_th)));
    }
  return {worst <= 1e-8, fmt("max rel err %.3e over 5x5 (eta, n_th) grid (tol 1e-8)", worst)};
}

Outcome fidelity_qfi_relation() {
  const TruncationPolicy pol;
  double worst_order = INFINITY;
  std::string detail;
  for (double n_th : {0.5, 2.0}) {
    const OptimResult r = optimize_npe_qfi(4, n_th, OptimOptions{});
    const NpeState s = NpeState::from_real(4, r.coeffs);
    const StateVector v = npe_vector(s);
    const DensityOperator r0 = apply_channel(v, {0.0, n_th, pol});
    auto residual = [&](double eta) {
      const double f = fidelity(r0, apply_channel(v, {eta, n_th, pol}));
      return std::abs((1 - f) - r.objective * eta * eta / 8);
    };
    const double big = residual(2e-2), small = residual(1e-2);
    const double order = std::log2(big / small);
    worst_order = std::min(worst_order, order);
    detail += fmt("n_th=%g: residual %.3e -> %.3e, order %.2f; ", n_th, big, small, order);
  }
  return {worst_order >= 1.8, detail + "need order >= 1.8"};
}

Outcome bound_sandwich() {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<std::size_t> dim(2, 12);
  int sandwich_bad = 0, chernoff_bad = 0, qfi_bad = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t d = dim(rng);
    std::uniform_int_distribution<std::size_t> rank(1, d);
    const Matrix a = random_density(d, rng, rank(rng));
    const Matrix b = random_density(d, rng, rank(rng));
    const auto fb = fidelity_error_bounds(fidelity(a, b), 1);
    const double p = helstrom_error(a, b);
    // Pure pairs meet the lower bound with equality; allow round-off there.
    sandwich_bad += !(fb.first <= p + 1e-12 && p <= fb.second + 1e-12);
    chernoff_bad += !(chernoff(a, b).q <= bhattacharyya(a, b));
  }
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> copies(1, 10000);
  for (int k = 0; k < 100; ++k) {
    const ErrorBounds e = error_bounds_from_qfi(20 * u01(rng), 0.5 * u01(rng) + 1e-4, copies(rng));
    qfi_bad += !(e.log_lower < e.log_upper);
  }
  return {sandwich_bad == 0 && chernoff_bad == 0 && qfi_bad == 0,
          fmt("violations over 100 random pairs: fidelity sandwich %d (round-off allowance 1e-12), Chernoff > "
              "Bhattacharyya %d; QFI bounds lower >= upper (log domain) %d/100",
              sandwich_bad, chernoff_bad, qfi_bad)};
}

Outcome monte_carlo() {
  const auto t0 = Clock::now();
  const McConfig c;
  const TruncationPolicy pol;
  const double eta = eta_for_snr(c.n_total, c.n_th, c.snr);
  const StateVector probe =
      npe_vector(NpeState::from_real(c.n_total, std::vector<double>(static_cast<std::size_t>(c.n_total) + 1, 1.0)));
  const OutcomePmf p0 = outcome_pmf(probe, 0.0, c.n_th, pol), p1 = outcome_pmf(probe, eta, c.n_th, pol);
  const double s = (p1.mean() - p0.mean()) / (std::sqrt(p0.variance()) + std::sqrt(p1.variance()));
  double worst = 0.0;
  std::string detail = fmt("SNR %.4f; ", s);
  for (int m : c.m) {
    const DetectionEstimate e = simulate_detection(p0, p1, m, c.trials, c.seed);
    const double target = p_err_gaussian(s, m);
    worst = std::max(worst, std::abs(e.p_err_hat - target));
    detail += fmt("M=%d: P_hat %.4f vs e^{-M SNR^2/2} %.4f; ", m, e.p_err_hat, target);
  }
  const double dt = seconds_since(t0);
  return {worst <= 0.02 && dt < 300.0,
          detail + fmt("max abs diff %.4f (tol 0.02), runtime %.1f s (limit 300 s)", worst, dt)};
}

Outcome chernoff_cross_check() {
  const double ns = 1.0, eta = 0.1, n_th = 10.0;
  const TruncationPolicy pol;
  const StateVector v = coherent_probe_vector(CoherentProbe{cplx(std::sqrt(ns))}, pol);
  const ChernoffResult c = chernoff(apply_channel(v, {0.0, n_th, pol}), apply_channel(v, {eta, n_th, pol}));
  const double expo = -std::log(c.q);
  const double ref = eta * eta * ns * std::pow(std::sqrt(1 + n_th) - std::sqrt(n_th), 2);
  return {std::abs(expo / ref - 1) <= 0.05,
          fmt("-ln q = %.6e vs %.6e, ratio %.4f (tol 5%%)", expo, ref, expo / ref)};
}

Outcome phase_optimality() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = -INFINITY;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 8;
    std::vector<double> mod(static_cast<std::size_t>(n) + 1);
    std::vector<cplx> phased(mod.size());
    for (std::size_t j = 0; j < mod.size(); ++j) {
      mod[j] = u01(rng) + 1e-3;
      phased[j] = std::polar(mod[j], 2 * M_PI * u01(rng));
    }
    const double eta = 0.1 * u01(rng) + 1e-4, n_th = 20 * u01(rng);
    worst = std::max(worst, snr(NpeState(n, phased), eta, n_th).snr - snr(NpeState::from_real(n, mod), eta, n_th).snr);
  }
  return {worst <= 1e-12, fmt("max SNR(phased) - SNR(real) = %.3e over 100 sets (tol 1e-12)", worst)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria{
    {1, "coherent QFI closed form", coherent_qfi_closed_form},
    {2, "zero-temperature optimum |4,0>", zero_temperature_optimum},
    {3, "coherent beats 4PE at equal N_S", coherent_beats_npe},
    {4, "signal energy of the 4PE optimum", signal_energy_behaviour},
    {5, "energy fraction", energy_fraction},
    {6, "SNR equivalence", snr_equivalence},
    {7, "closed-form SNR", closed_form_snr},
    {8, "fidelity-QFI relation", fidelity_qfi_relation},
    {9, "bound sandwich", bound_sandwich},
    {10, "Monte Carlo vs Gaussian scaling", monte_carlo},
    {11, "Chernoff cross-check", chernoff_cross_check},
    {12, "phase optimality", phase_optimality},
};

} // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.push_back(std::atoi(argv[k]));
  int failed = 0;
  for (const Criterion& c : kCriteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] criterion %2d  %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
