#include <doctest.h>

#include <cmath>
#include <random>

#include "channel.hpp"
#include "errors.hpp"
#include "helpers.hpp"
#include "metrology.hpp"

using namespace illumina;

namespace {

const TruncationPolicy kTight{1e-13, 4096};

NpeState random_npe(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cplx> c(static_cast<std::size_t>(n) + 1);
  for (auto& x : c) x = {nd(rng), nd(rng)};
  return NpeState(n, c);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Tr(rho0^s rho1^(1-s)) for rho0 thermal(n0) and rho1 a thermal(n1) displaced by alpha.
// rho^s of a thermal state is a rescaled thermal state with x -> x^s; the trace of two
// Gaussian states then has the closed form exp(-|alpha|^2 / (nA+nB+1)) / (nA+nB+1).
double gaussian_chernoff_trace(double s, double n0, double n1, double alpha2) {
  auto power = [](double n, double p, double& n_eff) {
    const double x = n / (1 + n);
    const double y = std::pow(x, p);
    n_eff = y / (1 - y);
    return std::pow(1 - x, p) / (1 - y);
  };
  double nA = 0, nB = 0;
  const double k = power(n0, s, nA) * power(n1, 1 - s, nB);
  return k * std::exp(-alpha2 / (nA + nB + 1)) / (nA + nB + 1);
}

} // namespace

TEST_CASE("QFI of a vanishing derivative is zero") {
  std::mt19937_64 rng(1);
  const Matrix rho = testing_util::random_density(4, rng);
  CHECK(qfi_at_zero(rho, Matrix::Zero(4, 4)).f_q == 0.0);
}

TEST_CASE("coherent QFI") {
  CHECK(qfi_coherent_closed(2.0, 0.0) == doctest::Approx(8.0));
  CHECK(qfi_coherent_closed(0.0, 3.0) == 0.0);
  CHECK(qfi_coherent_closed(4.0, 5.0) == doctest::Approx(16.0 / 11.0));

  const CoherentProbe sq2{cplx(std::sqrt(2.0))};
  CHECK(rel(qfi_generic(coherent_probe_vector(sq2, kTight), 1.0, kTight).f_q, 8.0 / 3.0) < 1e-8);
  CHECK(rel(qfi_product_fast(sq2, 1.0, kTight).f_q, 8.0 / 3.0) < 1e-8);
  CHECK(rel(qfi_product_fast(CoherentProbe{cplx(1.0)}, 0.5, kTight).f_q, 2.0) < 1e-8);

  // The idler of a product probe carries no information.
  const CoherentProbe with_idler{cplx(0.0, 1.2), cplx(0.7, -0.3)};
  CHECK(rel(qfi_generic(coherent_probe_vector(with_idler, kTight), 2.0, kTight).f_q,
            qfi_coherent_closed(1.44, 2.0)) < 1e-8);
}

TEST_CASE("NPE |N,0> at zero temperature gives 4N") {
  for (int n : {1, 2, 4, 6}) {
    CAPTURE(n);
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[0] = 1.0;
    const NpeState s = NpeState::from_real(n, c);
    const QfiReport fast = qfi_product_fast(s, 0.0, kTight);
    const QfiReport gen = qfi_generic(npe_vector(s), 0.0, kTight);
    CHECK(rel(fast.f_q, 4.0 * n) < 1e-10);
    CHECK(rel(gen.f_q, 4.0 * n) < 1e-10);
    CHECK(gen.kernel_term > 0.0);
  }
}

TEST_CASE("generic and product paths agree on random NPE probes") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 1 + trial % 5;
    const double n_th = 0.25 * trial;
    const NpeState s = random_npe(n, rng);
    CAPTURE(n);
    CAPTURE(n_th);
    const double gen = qfi_generic(npe_vector(s), n_th, kTight).f_q;
    const double fast = qfi_product_fast(s, n_th, kTight).f_q;
    CHECK(rel(fast, gen) < 1e-8);
    CHECK(fast <= 4.0 * signal_energy(s) + 1e-9);
  }
}

TEST_CASE("QFI is invariant under idler unitaries") {
  std::mt19937_64 rng(4);
  const NpeState s = random_npe(3, rng);
  const StateVector v = npe_vector(s);
  const Matrix u = testing_util::random_unitary(4, rng);
  Matrix full = Matrix::Zero(16, 16);
  for (int k = 0; k < 4; ++k) full.block(4 * k, 4 * k, 4, 4) = u;
  const StateVector w(v.space(), full * v.amp());
  const double n_th = 1.3;
  CHECK(rel(qfi_generic(w, n_th, kTight).f_q, qfi_generic(v, n_th, kTight).f_q) < 1e-8);
}

TEST_CASE("TMSV QFI matches its closed form") {
  for (double ns : {0.5, 1.0, 2.0})
    for (double n_th : {0.0, 1.0, 5.0}) {
      CAPTURE(ns);
      CAPTURE(n_th);
      const double closed = 4 * ns * (ns + 1) / (1 + ns + n_th + 2 * ns * n_th);
      const double fast =
          qfi_product_fast(tmsv_diagonal_idler_form(ns, kTight), thermal_distribution(n_th, kTight)).f_q;
      // Product eigenvalues below the 1e-12 support floor are dropped; at n_th = 5
      // that costs ~2e-8 relative, independent of the tail tolerance.
      CHECK(rel(fast, closed) < 5e-8);
    }
  const TruncationPolicy pol{1e-10, 4096};
  CHECK(rel(qfi_generic(tmsv_vector(0.5, pol), 1.0, pol).f_q, 3.0 / 3.5) < 1e-6);
}

TEST_CASE("QFI agrees with the fidelity at small eta") {
  const CoherentProbe c{cplx(1.0)};
  const StateVector v = coherent_probe_vector(c, kTight);
  const double eta = 1e-2, n_th = 1.0;
  const double f = fidelity(apply_channel(v, {0.0, n_th, kTight}), apply_channel(v, {eta, n_th, kTight}));
  CHECK(rel(8 * (1 - f) / (eta * eta), qfi_coherent_closed(1.0, n_th)) < 1e-3);
}

TEST_CASE("homodyne exponent equals the coherent QFI exponent") {
  for (double ns : {0.5, 2.0})
    for (double n_th : {0.0, 3.0}) {
      const double m = 1000, eta = 0.01;
      CHECK(rel(m * qfi_coherent_closed(ns, n_th) * eta * eta / 8, m * eta * eta * ns / (4 * n_th + 2)) < 1e-14);
    }
}

TEST_CASE("fidelity and Helstrom on simple pairs") {
  Matrix zero = Matrix::Zero(2, 2);
  zero(0, 0) = 1;
  Matrix one = Matrix::Zero(2, 2);
  one(1, 1) = 1;
  const Matrix mixed = Matrix::Identity(2, 2) / 2.0;

  CHECK(fidelity(zero, zero) == doctest::Approx(1.0));
  CHECK(std::abs(fidelity(zero, one)) < 1e-12);
  CHECK(fidelity(zero, mixed) == doctest::Approx(std::sqrt(0.5)));
  CHECK(helstrom_error(zero, zero) == doctest::Approx(0.5));
  CHECK(std::abs(helstrom_error(zero, one)) < 1e-15);
  CHECK(helstrom_error(zero, mixed) == doctest::Approx(0.25));
  CHECK(helstrom_error(zero, one, 0.9, 0.1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(helstrom_error(zero, one, 0.7, 0.7), InvalidArgument);
  CHECK_THROWS_AS(helstrom_error(zero, one, -0.1, 1.1), InvalidArgument);
}

TEST_CASE("random pairs satisfy the fidelity sandwich and Chernoff <= Bhattacharyya") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(trial % 7);
    const std::size_t rank = trial % 3 == 0 ? 1 + trial % 2 : 0;
    const Matrix a = testing_util::random_density(d, rng, rank);
    const Matrix b = testing_util::random_density(d, rng);
    const double f = fidelity(a, b);
    CHECK(std::abs(f - fidelity(b, a)) < 1e-10);
    const auto fb = fidelity_error_bounds(f, 1);
    const double p = helstrom_error(a, b);
    CHECK(fb.first <= p + 1e-12);
    CHECK(p <= fb.second + 1e-12);
    const ChernoffResult c = chernoff(a, b);
    CHECK(c.q <= bhattacharyya(a, b));
    CHECK(c.s_star >= 0.0);
    CHECK(c.s_star <= 1.0);
    CHECK(std::abs(bhattacharyya(a, b) - bhattacharyya(b, a)) < 1e-10);
  }
}

TEST_CASE("Chernoff trace trivial cases") {
  std::mt19937_64 rng(6);
  const Matrix a = testing_util::random_density(4, rng);
  CHECK(chernoff(a, a).q == doctest::Approx(1.0).epsilon(1e-10));
  Matrix zero = Matrix::Zero(2, 2), one = Matrix::Zero(2, 2);
  zero(0, 0) = 1;
  one(1, 1) = 1;
  CHECK(std::abs(chernoff(zero, one).q) < 1e-12);
}

TEST_CASE("Chernoff trace matches the Gaussian oracle for thermal vs displaced thermal") {
  const double n_th = 1.0, eta = 0.3, ns = 2.0;
  const StateVector v = coherent_probe_vector(CoherentProbe{cplx(std::sqrt(ns))}, kTight);
  const DensityOperator r0 = apply_channel(v, {0.0, n_th, kTight});
  const DensityOperator r1 = apply_channel(v, {eta, n_th, kTight});
  const double n1 = (1 - eta * eta) * n_th, a2 = eta * eta * ns;

  // Independent minimisation of the oracle on a fine grid.
  double best = 1.0;
  for (int k = 1; k < 20000; ++k) best = std::min(best, gaussian_chernoff_trace(k / 20000.0, n_th, n1, a2));
  const ChernoffResult c = chernoff(r0, r1);
  CHECK(rel(c.q, best) < 1e-8);
  CHECK(rel(gaussian_chernoff_trace(c.s_star, n_th, n1, a2), c.q) < 1e-9);
  CHECK(rel(bhattacharyya(r0, r1), gaussian_chernoff_trace(0.5, n_th, n1, a2)) < 1e-9);
}

TEST_CASE("discriminate bundles the measures") {
  const StateVector v = npe_vector(NpeState::from_real(2, {1, 1, 1}));
  const TruncationPolicy pol{1e-10, 4096};
  const DiscriminationReport d = discriminate(apply_channel(v, {0.0, 0.5, pol}), apply_channel(v, {0.4, 0.5, pol}));
  CHECK(d.chernoff_q <= d.bhattacharyya);
  CHECK(d.p_err_helstrom <= 0.5 * d.chernoff_q + 1e-12);
  CHECK(d.fidelity <= 1.0 + 1e-12);
  CHECK(d.fidelity > 0.0);
}

TEST_CASE("error bounds from the QFI") {
  const ErrorBounds zero = error_bounds_from_qfi(0.0, 0.1, 10);
  CHECK(zero.lower == doctest::Approx(0.25));
  CHECK(zero.upper == doctest::Approx(0.5));
  const ErrorBounds b = error_bounds_from_qfi(8.0, 0.5, 4);
  CHECK(b.upper == doctest::Approx(0.5 * std::exp(-1.0)));
  CHECK(b.lower == doctest::Approx(0.25 * std::exp(-2.0)));
  CHECK(b.lower < b.upper);
  const ErrorBounds deep = error_bounds_from_qfi(20.0, 0.5, 10000);
  CHECK(deep.upper == 0.0);
  CHECK(deep.log_lower == doctest::Approx(-12500.0 - std::log(4.0)));
  CHECK(deep.log_lower < deep.log_upper);
  CHECK_THROWS_AS(error_bounds_from_qfi(-1.0, 0.1, 1), InvalidArgument);
  CHECK_THROWS_AS(error_bounds_from_qfi(1.0, 0.1, 0), InvalidArgument);

  const auto one = fidelity_error_bounds(1.0, 5);
  CHECK(one.first == doctest::Approx(0.5));
  CHECK(one.second == doctest::Approx(0.5));
  const auto none = fidelity_error_bounds(0.0, 5);
  CHECK(none.first == 0.0);
  CHECK(none.second == 0.0);
}
