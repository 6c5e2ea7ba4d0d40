#pragma once

// Weakly reflective target in a thermal bath, modelled as a beam splitter
// between the signal S and the bath mode B.
//
// Sign convention: the generator is G = a_S b^dag - a_S^dag b and the
// splitter is exp(theta G) with theta = arcsin(eta). The kept (return) port R
// is the B output, whose Heisenberg operator is r = eta a_S + sqrt(1-eta^2) b.
// The S output is traced out. Channel outputs live on {R, I} with
// dim(R) = thermal cutoff + max signal photons + 1, which holds every photon
// that can reach the return port, so no extra truncation happens there.

#include "fock.hpp"
#include "states.hpp"

namespace illumina {

struct ChannelParams {
  double eta = 0.0;
  double n_th = 0.0;
  TruncationPolicy policy{};

  void validate() const;
};

/// Dense G on a space containing modes S and B (identity elsewhere).
Matrix generator(const ModeSpace& space);

/// Output space {R, I} for a probe on {S, I} and a given thermal cutoff.
ModeSpace channel_output_space(const StateVector& probe, std::size_t thermal_cutoff);

/// Exact rho_eta over {R, I}; the bath is handled by convex decomposition
/// over its Fock components with a fixed m-ascending summation order.
DensityOperator apply_channel(const StateVector& probe, const ChannelParams& params);

/// rho_0 together with the first and second eta-derivatives at eta = 0.
struct ChannelExpansion {
  ModeSpace space;
  Matrix rho0;
  Matrix first;  // Tr_S[G, rho_in]
  Matrix second; // Tr_S[G, [G, rho_in]]
  double tail_mass = 0.0;
};

ChannelExpansion channel_expansion_at_zero(const StateVector& probe, double n_th,
                                           const TruncationPolicy& policy);

/// d rho_eta / d eta at eta = 0 (traceless, Hermitian).
Matrix drho_deta_at_zero(const StateVector& probe, double n_th, const TruncationPolicy& policy);

} // namespace illumina
