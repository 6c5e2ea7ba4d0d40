#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <variant>

#include "channel.hpp"
#include "fock.hpp"
#include "states.hpp"

namespace illumina {

enum class QfiMethod { generic, product_fast, closed_form };
std::string to_string(QfiMethod m);

struct QfiReport {
  double f_q = 0.0;
  std::size_t support_dim = 0;
  double pair_floor = kEigenFloor;
  QfiMethod method = QfiMethod::generic;
  /// Contribution of the kernel of rho_0 (second-order term); nonzero only
  /// where the support of rho_eta changes at eta = 0, e.g. n_th = 0.
  double kernel_term = 0.0;
  double tail_mass = 0.0;
};

/// QFI of rho_eta at eta = 0 from its expansion,
///   F = sum_{k,l in supp} 2|<k|rho'|l>|^2 / (l_k + l_l) + 2 sum_{k in ker} <k|rho''|k>.
/// On full-rank rho_0 the kernel term vanishes and this is the usual
/// eigendecomposition formula; at a rank change it gives the eta -> 0+ limit.
/// `second` may be empty, in which case the kernel term is skipped.
QfiReport qfi_at_zero(const Matrix& rho0, const Matrix& first, const Matrix& second = Matrix(),
                      double pair_floor = kEigenFloor);
QfiReport qfi_at_zero(const DensityOperator& rho0, const Matrix& first);

/// Generic path: channel expansion of an arbitrary {S, I} probe plus a dense eigensolve.
QfiReport qfi_generic(const StateVector& probe, double n_th, const TruncationPolicy& policy);

/// Probe whose idler marginal is diagonal in a known basis {|j>}:
///   q[j]     = <j|rho_I|j>,
///   w[j]     = sum_s s |<s, j|psi>|^2 (signal photons jointly with idler level j),
///   sigma    = Tr_S(a_S |psi><psi|) in that basis (sparse list).
/// NPE, TMSV and product coherent probes all fit this form.
struct DiagonalIdlerProbe {
  std::vector<double> q;
  std::vector<double> w;
  struct Entry {
    std::size_t row, col;
    cplx value;
  };
  std::vector<Entry> sigma;
};

DiagonalIdlerProbe diagonal_idler_form(const NpeState& s);
DiagonalIdlerProbe diagonal_idler_form(const CoherentProbe& c, const TruncationPolicy& policy);
/// Schmidt-diagonal sum_n c_n |n, n> with c_n^2 thermal of mean N_S.
DiagonalIdlerProbe tmsv_diagonal_idler_form(double n_signal, const TruncationPolicy& policy);

/// Same quantity as qfi_at_zero, evaluated in the known eigenbasis of
/// rho_0 = rho_th (x) rho_I without a dense eigensolve.
QfiReport qfi_product_fast(const DiagonalIdlerProbe& probe, const ThermalDistribution& thermal,
                           double pair_floor = kEigenFloor);
QfiReport qfi_product_fast(const NpeState& probe, double n_th, const TruncationPolicy& policy);
QfiReport qfi_product_fast(const CoherentProbe& probe, double n_th, const TruncationPolicy& policy);

/// 4 N_S / (1 + 2 n_th).
double qfi_coherent_closed(double n_signal, double n_th);

/// Root fidelity Tr sqrt(sqrt(rho1) rho0 sqrt(rho1)).
double fidelity(const DensityOperator& rho0, const DensityOperator& rho1);
double fidelity(const Matrix& rho0, const Matrix& rho1);

/// Helstrom minimum error 0.5 (1 - ||pi0 rho0 - pi1 rho1||_1).
double helstrom_error(const Matrix& rho0, const Matrix& rho1, double pi0 = 0.5, double pi1 = 0.5);
double helstrom_error(const DensityOperator& rho0, const DensityOperator& rho1, double pi0 = 0.5,
                      double pi1 = 0.5);

struct ChernoffResult {
  double q = 1.0;
  double s_star = 0.5;
};

/// min_{s in [0,1]} Tr(rho0^s rho1^(1-s)); 21-point grid then golden section.
ChernoffResult chernoff(const Matrix& rho0, const Matrix& rho1);
ChernoffResult chernoff(const DensityOperator& rho0, const DensityOperator& rho1);
double bhattacharyya(const Matrix& rho0, const Matrix& rho1);
double bhattacharyya(const DensityOperator& rho0, const DensityOperator& rho1);

struct DiscriminationReport {
  double p_err_helstrom = 0.5;
  double fidelity = 1.0;
  double chernoff_q = 1.0;
  double chernoff_s_star = 0.5;
  double bhattacharyya = 1.0;
  double pi0 = 0.5, pi1 = 0.5;
};

DiscriminationReport discriminate(const DensityOperator& rho0, const DensityOperator& rho1,
                                  double pi0 = 0.5, double pi1 = 0.5);

struct ErrorBounds {
  double lower = 0.25;
  double upper = 0.5;
  int m_copies = 1;
  double eta = 0.0;
  double f_q = 0.0;
  /// Natural logs of the bounds; stay finite when the bounds underflow.
  double log_lower = -std::log(4.0);
  double log_upper = -std::log(2.0);
};

/// e^{-M F eta^2 / 4} / 4 <~ P_err <~ e^{-M F eta^2 / 8} / 2.
ErrorBounds error_bounds_from_qfi(double f_q, double eta, int m);

/// ((1 - sqrt(1 - f^{2M})) / 2, f^M / 2).
std::pair<double, double> fidelity_error_bounds(double f, int m);

} // namespace illumina
