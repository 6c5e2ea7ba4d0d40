#include <doctest.h>

#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "helpers.hpp"
#include "states.hpp"

using namespace illumina;

TEST_CASE("thermal cutoff is the smallest one meeting the tolerance") {
  for (double n : {0.1, 1.0, 5.0, 20.0})
    for (double tol : {1e-6, 1e-12}) {
      const std::size_t k = thermal_cutoff(n, tol);
      CHECK(thermal_tail(n, k) <= tol);
      if (k > 0) CHECK(thermal_tail(n, k - 1) > tol);
    }
  CHECK(thermal_cutoff(0.0, 1e-12) == 0);
}

TEST_CASE("thermal distribution is normalised with the right mean") {
  const ThermalDistribution th = thermal_distribution(2.0, {1e-14, 4096});
  const double total = std::accumulate(th.weights.begin(), th.weights.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  double mean = 0.0;
  for (std::size_t n = 0; n < th.weights.size(); ++n) mean += static_cast<double>(n) * th.weights[n];
  CHECK(mean == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(th.tail_mass == doctest::Approx(std::pow(2.0 / 3.0, th.cutoff + 1)));
}

TEST_CASE("truncation overflow reports the dimension it needed") {
  try {
    (void)thermal_distribution(20.0, {1e-12, 16});
    FAIL("expected TruncationOverflow");
  } catch (const TruncationOverflow& e) {
    CHECK(e.required_dim() == thermal_cutoff(20.0, 1e-12) + 1);
  }
  CHECK_THROWS_AS((TruncationPolicy{0.0, 10}.validate()), InvalidArgument);
}

TEST_CASE("NPE states") {
  const NpeState s = NpeState::from_real(3, {1, 1, 0, 2});
  double norm = 0;
  for (auto c : s.coeffs()) norm += std::norm(c);
  CHECK(norm == doctest::Approx(1.0));
  // |3,0>, |2,1>, |0,3> with weights 1/6, 1/6, 4/6.
  CHECK(signal_energy(s) == doctest::Approx((3 + 2) / 6.0));
  CHECK(idler_energy(s) == doctest::Approx((1 + 12) / 6.0));
  CHECK(signal_energy(s) + idler_energy(s) == doctest::Approx(3.0));

  const StateVector v = npe_vector(s);
  CHECK(std::abs(v.amp()(static_cast<Eigen::Index>(v.space().flat_index({0, 3}))) - 2.0 / std::sqrt(6.0)) < 1e-15);
  const DensityOperator ri = idler_reduced(s);
  CHECK(ri.mat()(3, 3).real() == doctest::Approx(4.0 / 6.0));

  CHECK_THROWS_AS(NpeState::from_real(2, {1, 1}), DimensionError);
  CHECK_THROWS_AS(NpeState::from_real(1, {0, 0}), InvalidArgument);
}

TEST_CASE("coherent states") {
  const TruncationPolicy pol{1e-13, 4096};
  const StateVector v = coherent_vector(cplx(1.5, -0.5), pol);
  const Matrix n = number_operator(v.space().dims()[0]);
  CHECK(std::abs(expectation(n, v) - 2.5) < 1e-10);
  CHECK(v.tail_mass() <= 1e-13);
  CHECK(v.tail_mass() >= 0.0);

  const StateVector p = coherent_probe_vector({cplx(1.0), cplx(0.0)}, pol);
  CHECK(p.space().dim("I") == 1);
}

TEST_CASE("TMSV marginals are thermal with mean N_S") {
  const StateVector v = tmsv_vector(0.7, {1e-14, 4096});
  const DensityOperator rs = partial_trace(v.density(), {"S"});
  const double x = 0.7 / 1.7;
  for (Eigen::Index n = 0; n < 6; ++n) CHECK(rs.mat()(n, n).real() == doctest::Approx(std::pow(x, n) / 1.7).epsilon(1e-12));
  CHECK(std::abs(rs.mat()(0, 1)) < 1e-15);
}
