#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fock.hpp"

namespace illumina {

/// How aggressively an infinite-dimensional mode is cut off.
struct TruncationPolicy {
  double tail_tol = 1e-12;    // max discarded probability mass per mode
  std::size_t max_dim = 4096; // hard cap on the kept dimension

  void validate() const;
};

/// Truncated, renormalised thermal photon-number distribution.
struct ThermalDistribution {
  double n_th = 0.0;
  std::size_t cutoff = 0;       // highest kept Fock level
  std::vector<double> weights;  // renormalised p_0..p_cutoff
  double tail_mass = 0.0;       // (n_th/(1+n_th))^(cutoff+1), discarded before renormalising
};

/// Smallest cutoff k with (n_th/(1+n_th))^(k+1) <= tail_tol.
std::size_t thermal_cutoff(double n_th, double tail_tol);
double thermal_tail(double n_th, std::size_t cutoff);
/// Un-renormalised p_n = n_th^n / (1+n_th)^(n+1) for n = 0..cutoff.
std::vector<double> thermal_weights_raw(double n_th, std::size_t cutoff);
ThermalDistribution thermal_distribution(double n_th, const TruncationPolicy& policy);
DensityOperator thermal_density(double n_th, const TruncationPolicy& policy,
                                const std::string& label = "B");

/// sum_n a_n |N-n, n>_{SI}: definite total photon number N.
class NpeState {
public:
  /// Coefficients are renormalised; `coeffs.size()` must be N+1.
  NpeState(int total, std::vector<cplx> coeffs);
  static NpeState from_real(int total, const std::vector<double>& coeffs);

  int total() const noexcept { return total_; }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  /// |a_n|^2, the idler photon-number distribution.
  std::vector<double> probabilities() const;

private:
  int total_;
  std::vector<cplx> coeffs_;
};

/// Mean signal photon number sum_n |a_n|^2 (N-n).
double signal_energy(const NpeState& s);
double idler_energy(const NpeState& s);

/// Two-mode space {S, I} with both modes of dimension N+1.
ModeSpace npe_space(const NpeState& s);
StateVector npe_vector(const NpeState& s, const ModeSpace& space);
StateVector npe_vector(const NpeState& s);

/// Idler marginal; diagonal with |a_n|^2 at Fock level n.
DensityOperator idler_reduced(const NpeState& s);

/// Product coherent probe |alpha>_S |beta>_I.
struct CoherentProbe {
  cplx alpha;
  cplx beta{0.0, 0.0};

  double signal_energy() const { return std::norm(alpha); }
  double idler_energy() const { return std::norm(beta); }
};

/// Smallest cutoff whose discarded Poisson mass (mean `mean`) is <= tail_tol.
std::size_t coherent_cutoff(double mean, double tail_tol);
StateVector coherent_vector(cplx alpha, const TruncationPolicy& policy,
                            const std::string& label = "S");
/// Two-mode vector over {S, I}; the idler has dimension 1 when beta == 0.
StateVector coherent_probe_vector(const CoherentProbe& probe, const TruncationPolicy& policy);

/// Two-mode squeezed vacuum with signal energy N_S (sinh^2 r = N_S), over {S, I}.
StateVector tmsv_vector(double n_signal, const TruncationPolicy& policy);

} // namespace illumina
