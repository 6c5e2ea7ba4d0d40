#pragma once

// Number-difference detection. The return mode r and the idler a_I are mixed
// on a 50:50 splitter, d = (r + a_I)/sqrt2, e = (r - a_I)/sqrt2, and
// M = d^dag d - e^dag e = eta X + sqrt(1 - eta^2) Y with
//   X = a_I^dag a_S + a_I a_S^dag,   Y = a_I^dag b + a_I b^dag.

#include <cstdint>
#include <vector>

#include "fock.hpp"
#include "states.hpp"

namespace illumina {

/// Dense M_eta on a space holding modes S, B and I.
Matrix m_operator(double eta, const ModeSpace& space);

struct MomentReport {
  double mean0 = 0.0, mean1 = 0.0;
  double sigma0 = 0.0, sigma1 = 0.0;
  /// (sigma1 mean0 + sigma0 mean1) / (sigma0 + sigma1); the midpoint when both vanish.
  double threshold = 0.0;
};

/// Exact moments of M under H0 (eta = 0) and H1 for a probe over {S, I}.
/// The bath enters through <Y^2> = (2 n_th + 1) <n_I> + n_th.
MomentReport moments(const StateVector& probe, double eta, double n_th);
/// Same quantity from NPE coefficients, where X is tridiagonal.
MomentReport moments(const NpeState& probe, double eta, double n_th);

struct SnrReport {
  double snr = 0.0;
  MomentReport moments;
  double eta = 0.0, n_th = 0.0;
  /// Both the separation and the noise vanish; snr is reported as 0.
  bool degenerate = false;
};

SnrReport snr(const StateVector& probe, double eta, double n_th);
SnrReport snr(const NpeState& probe, double eta, double n_th);
SnrReport snr_from_moments(const MomentReport& m, double eta, double n_th);

/// Product coherent probe with |alpha|^2 = N_S, |beta|^2 = N - N_S and
/// relative phase theta.
double snr_coherent_closed(double n_total, double n_signal, double theta, double eta, double n_th);

/// e^{-m snr^2 / 2}, the Gaussian scaling without prefactor.
double p_err_gaussian(double snr, int m);

/// Distribution of the outcome n_d - n_e.
struct OutcomePmf {
  std::vector<int> support; // ascending
  std::vector<double> probs;
  double tail_mass = 0.0;

  double mean() const;
  double variance() const;
};

OutcomePmf outcome_pmf(const StateVector& probe, double eta, double n_th, const TruncationPolicy& policy);

struct DetectionEstimate {
  double p_err_hat = 0.5;
  double stderr_ = 0.0;
  double p_false_alarm = 0.0; // H1 chosen under H0
  double p_miss = 0.0;        // H0 chosen under H1
  double threshold = 0.0;
  /// The two pmfs are identical, so no threshold can separate them.
  bool degenerate = false;
};

/// Threshold test on the sum of m i.i.d. draws, repeated `trials` times per
/// hypothesis. Trial t under hypothesis h draws from its own generator seeded
/// by (seed, t, h), so the estimate does not depend on `threads`.
DetectionEstimate simulate_detection(const OutcomePmf& pmf0, const OutcomePmf& pmf1, int m,
                                     std::int64_t trials, std::uint64_t seed, int threads = 1);

} // namespace illumina
