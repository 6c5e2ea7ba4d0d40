#pragma once

// Shared oracles for the unit tests: seeded random states and a brute-force
// channel built from a dense matrix exponential.

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include <doctest.h>

#include "fock.hpp"
#include "states.hpp"

namespace testing_util {

using illumina::cplx;
using illumina::Matrix;
using illumina::Vector;

inline Matrix random_density(std::size_t d, std::mt19937_64& rng, std::size_t rank = 0) {
  std::normal_distribution<double> nd;
  const std::size_t r = rank == 0 ? d : rank;
  Matrix g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(r));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = cplx(nd(rng), nd(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline Vector random_vector(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(nd(rng), nd(rng));
  return v / v.norm();
}

inline Matrix random_unitary(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = cplx(nd(rng), nd(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

/// rho_eta on {R, I} from exp(asin(eta) G) on an explicit S (x) B (x) I space.
/// Both S and B get k_max + 1 levels, which is exact for total photon number <= k_max.
inline Matrix brute_force_channel(const illumina::StateVector& probe, double eta,
                                  const illumina::ThermalDistribution& th, std::size_t dR) {
  const auto& sp = probe.space();
  const std::size_t dS = sp.dim("S"), dI = sp.dim("I");
  const std::size_t k_max = dS - 1 + th.cutoff;
  const std::size_t d = k_max + 1;
  illumina::ModeSpace big({d, d, dI}, {"S", "B", "I"});
  const Matrix aS = illumina::embed(illumina::annihilation(d), "S", big);
  const Matrix b = illumina::embed(illumina::annihilation(d), "B", big);
  const Matrix G = aS * b.adjoint() - aS.adjoint() * b;
  const Matrix U = (std::asin(eta) * G).exp();

  Matrix rho_in = Matrix::Zero(static_cast<Eigen::Index>(big.total_dim()), static_cast<Eigen::Index>(big.total_dim()));
  for (std::size_t m = 0; m <= th.cutoff; ++m) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(big.total_dim()));
    for (std::size_t s = 0; s < dS; ++s)
      for (std::size_t i = 0; i < dI; ++i)
        v(static_cast<Eigen::Index>(big.flat_index({s, m, i}))) = probe.amp()(static_cast<Eigen::Index>(sp.flat_index({s, i})));
    rho_in += th.weights[m] * v * v.adjoint();
  }
  const Matrix out = U * rho_in * U.adjoint();
  const Matrix rb = illumina::partial_trace(out, big, {"B", "I"});
  REQUIRE(static_cast<std::size_t>(rb.rows()) == dR * dI);
  return rb;
}

} // namespace testing_util
