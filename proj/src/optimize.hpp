#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "states.hpp"

namespace illumina {

struct OptimOptions {
  std::uint64_t seed = 20240611;
  int starts = 20;
  int max_iter = 2000;
  double f_tol = 1e-10;
  double x_tol = 1e-8;
  double fd_step = 1e-6;
  int threads = 1;
  /// Extra start ahead of the random ones (sweeps pass the previous optimum).
  std::optional<std::vector<double>> warm_start;

  void validate() const;
};

struct OptimResult {
  std::vector<double> coeffs; // unit norm
  double objective = 0.0;
  double n_signal = 0.0;
  int starts = 0;
  bool converged = false;
  std::uint64_t best_start_seed = 0;
  bool best_is_warm_start = false;
  /// Starts whose objective lies within 1e-6 relative of the best one.
  int agreeing_starts = 0;
};

/// Unit vector from N hyperspherical angles (N+1 components).
std::vector<double> sphere_point(const std::vector<double>& angles);
/// Inverse of sphere_point for a nonzero vector.
std::vector<double> sphere_angles(const std::vector<double>& x);

/// Multi-start maximisation of f over real unit vectors of length dim.
OptimResult maximize_on_sphere(const std::function<double(const std::vector<double>&)>& f,
                               std::size_t dim, const OptimOptions& opts);

/// Best NPE coefficients for the QFI at eta = 0 (fast product path).
/// Coefficients are reported as nonnegative moduli; signs live on the idler
/// and do not change the QFI.
OptimResult optimize_npe_qfi(int n_total, double n_th, const OptimOptions& opts,
                             const TruncationPolicy& policy = {});

/// Best NPE coefficients for the number-difference SNR. When
/// `signal_constraint` is set, N_S is held at that value by a quadratic penalty.
OptimResult optimize_npe_snr(int n_total, double eta, double n_th, const OptimOptions& opts,
                             std::optional<double> signal_constraint = std::nullopt);

struct CoherentSnrOptimum {
  double n_signal = 0.0;
  double snr = 0.0;
  /// snr below 1e-12: the maximiser is still reported but carries no signal.
  bool degenerate = false;
};

/// Maximises snr_coherent_closed(theta = 0) over N_S in [0, N].
CoherentSnrOptimum optimize_coherent_snr(double n_total, double eta, double n_th);

struct FractionCell {
  int n_total = 0;
  double n_th = 0.0;
  double fraction = 0.0;
  OptimResult result;
  bool ok = true;
  std::string error;
};

/// Optimised-QFI signal fraction N_S/N on an (N, n_th) grid. Each N walks its
/// n_th grid in order, warm-starting from the previous cell.
std::vector<FractionCell> energy_fraction_sweep(const std::vector<int>& n_list,
                                                const std::vector<double>& n_th_grid,
                                                const OptimOptions& opts,
                                                const TruncationPolicy& policy = {});

} // namespace illumina
