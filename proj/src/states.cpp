#include "states.hpp"

#include <cmath>
#include <numeric>

#include "errors.hpp"

namespace illumina {

void TruncationPolicy::validate() const {
  if (!(tail_tol > 0.0 && tail_tol < 1.0))
    throw InvalidArgument("TruncationPolicy: tail_tol must lie in (0, 1)");
  if (max_dim < 2) throw InvalidArgument("TruncationPolicy: max_dim must be at least 2");
}

double thermal_tail(double n_th, std::size_t cutoff) {
  if (n_th <= 0.0) return 0.0;
  return std::pow(n_th / (1.0 + n_th), static_cast<double>(cutoff + 1));
}

std::size_t thermal_cutoff(double n_th, double tail_tol) {
  if (!(n_th >= 0.0) || !std::isfinite(n_th))
    throw InvalidArgument("thermal: n_th must be finite and nonnegative");
  if (n_th == 0.0) return 0;
  const double ratio = n_th / (1.0 + n_th);
  double guess = std::ceil(std::log(tail_tol) / std::log(ratio)) - 1.0;
  auto k = static_cast<std::size_t>(std::max(0.0, guess));
  while (thermal_tail(n_th, k) > tail_tol) ++k;
  while (k > 0 && thermal_tail(n_th, k - 1) <= tail_tol) --k;
  return k;
}

std::vector<double> thermal_weights_raw(double n_th, std::size_t cutoff) {
  std::vector<double> p(cutoff + 1);
  const double ratio = n_th / (1.0 + n_th);
  double v = 1.0 / (1.0 + n_th);
  for (std::size_t n = 0; n <= cutoff; ++n) {
    p[n] = v;
    v *= ratio;
  }
  return p;
}

ThermalDistribution thermal_distribution(double n_th, const TruncationPolicy& policy) {
  policy.validate();
  ThermalDistribution t;
  t.n_th = n_th;
  t.cutoff = thermal_cutoff(n_th, policy.tail_tol);
  if (t.cutoff + 1 > policy.max_dim)
    throw TruncationOverflow("thermal state exceeds max_dim", t.cutoff + 1);
  t.weights = thermal_weights_raw(n_th, t.cutoff);
  t.tail_mass = thermal_tail(n_th, t.cutoff);
  const double kept = std::accumulate(t.weights.begin(), t.weights.end(), 0.0);
  for (double& w : t.weights) w /= kept;
  return t;
}

DensityOperator thermal_density(double n_th, const TruncationPolicy& policy,
                                const std::string& label) {
  const ThermalDistribution t = thermal_distribution(n_th, policy);
  const auto d = static_cast<Eigen::Index>(t.weights.size());
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) m(n, n) = t.weights[n];
  return DensityOperator(ModeSpace({t.weights.size()}, {label}), std::move(m), t.tail_mass);
}

NpeState::NpeState(int total, std::vector<cplx> coeffs) : total_(total), coeffs_(std::move(coeffs)) {
  if (total_ < 0) throw InvalidArgument("NpeState: N must be nonnegative");
  if (coeffs_.size() != static_cast<std::size_t>(total_) + 1)
    throw DimensionError("NpeState: expected N+1 coefficients");
  double norm2 = 0.0;
  for (const cplx& c : coeffs_) norm2 += std::norm(c);
  if (!(norm2 > 0.0) || !std::isfinite(norm2))
    throw InvalidArgument("NpeState: coefficients must have finite nonzero norm");
  const double inv = 1.0 / std::sqrt(norm2);
  for (cplx& c : coeffs_) c *= inv;
}

NpeState NpeState::from_real(int total, const std::vector<double>& coeffs) {
  return NpeState(total, std::vector<cplx>(coeffs.begin(), coeffs.end()));
}

std::vector<double> NpeState::probabilities() const {
  std::vector<double> q(coeffs_.size());
  for (std::size_t n = 0; n < q.size(); ++n) q[n] = std::norm(coeffs_[n]);
  return q;
}

double signal_energy(const NpeState& s) {
  double ns = 0.0;
  const auto q = s.probabilities();
  for (std::size_t n = 0; n < q.size(); ++n) ns += q[n] * static_cast<double>(s.total() - static_cast<int>(n));
  return ns;
}

double idler_energy(const NpeState& s) { return static_cast<double>(s.total()) - signal_energy(s); }

ModeSpace npe_space(const NpeState& s) {
  const auto d = static_cast<std::size_t>(s.total()) + 1;
  return ModeSpace({d, d}, {"S", "I"});
}

StateVector npe_vector(const NpeState& s, const ModeSpace& space) {
  const std::size_t iS = space.index_of("S");
  const std::size_t iI = space.index_of("I");
  if (space.modes() != 2) throw DimensionError("npe_vector: space must hold exactly modes S and I");
  const auto need = static_cast<std::size_t>(s.total()) + 1;
  if (space.dims()[iS] < need || space.dims()[iI] < need)
    throw DimensionError("npe_vector: mode dimensions must be at least N+1");
  Vector amp = Vector::Zero(space.total_dim());
  const int N = s.total();
  for (int n = 0; n <= N; ++n) {
    const std::size_t idx = static_cast<std::size_t>(N - n) * space.stride(iS) +
                            static_cast<std::size_t>(n) * space.stride(iI);
    amp(idx) = s.coeffs()[n];
  }
  return StateVector(space, std::move(amp));
}

StateVector npe_vector(const NpeState& s) { return npe_vector(s, npe_space(s)); }

DensityOperator idler_reduced(const NpeState& s) {
  const auto q = s.probabilities();
  const auto d = static_cast<Eigen::Index>(q.size());
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) m(n, n) = q[n];
  return DensityOperator(ModeSpace({q.size()}, {"I"}), std::move(m));
}

namespace {

double log_poisson(double mean, std::size_t n) {
  const double dn = static_cast<double>(n);
  return -mean + dn * std::log(mean) - std::lgamma(dn + 1.0);
}

// Discarded mass sum_{n > k} Poisson(n; mean), summed from the far tail down.
double poisson_tail(double mean, std::size_t k) {
  const double top = mean + 40.0 * std::sqrt(mean) + 60.0;
  auto hi = static_cast<std::size_t>(std::max(top, static_cast<double>(k) + 1.0));
  double tail = 0.0;
  for (std::size_t n = hi; n > k; --n) tail += std::exp(log_poisson(mean, n));
  return tail;
}

} // namespace

std::size_t coherent_cutoff(double mean, double tail_tol) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw InvalidArgument("coherent: |alpha|^2 must be finite");
  if (mean == 0.0) return 0;
  std::size_t k = static_cast<std::size_t>(std::max(0.0, std::floor(mean)));
  while (poisson_tail(mean, k) > tail_tol) ++k;
  while (k > 0 && poisson_tail(mean, k - 1) <= tail_tol) --k;
  return k;
}

StateVector coherent_vector(cplx alpha, const TruncationPolicy& policy, const std::string& label) {
  policy.validate();
  const double mean = std::norm(alpha);
  const std::size_t k = coherent_cutoff(mean, policy.tail_tol);
  if (k + 1 > policy.max_dim) throw TruncationOverflow("coherent state exceeds max_dim", k + 1);
  Vector amp(static_cast<Eigen::Index>(k + 1));
  const double phase = std::arg(alpha);
  for (std::size_t n = 0; n <= k; ++n) {
    const double mag = mean == 0.0 ? (n == 0 ? 1.0 : 0.0) : std::exp(0.5 * log_poisson(mean, n));
    amp(static_cast<Eigen::Index>(n)) = std::polar(mag, phase * static_cast<double>(n));
  }
  const double tail = mean == 0.0 ? 0.0 : poisson_tail(mean, k);
  return StateVector(ModeSpace({k + 1}, {label}), std::move(amp), tail);
}

StateVector coherent_probe_vector(const CoherentProbe& probe, const TruncationPolicy& policy) {
  return tensor(coherent_vector(probe.alpha, policy, "S"), coherent_vector(probe.beta, policy, "I"));
}

StateVector tmsv_vector(double n_signal, const TruncationPolicy& policy) {
  const ThermalDistribution t = thermal_distribution(n_signal, policy);
  const std::size_t d = t.cutoff + 1;
  ModeSpace space({d, d}, {"S", "I"});
  Vector amp = Vector::Zero(static_cast<Eigen::Index>(d * d));
  for (std::size_t n = 0; n < d; ++n) amp(static_cast<Eigen::Index>(n * d + n)) = std::sqrt(t.weights[n]);
  return StateVector(std::move(space), std::move(amp), t.tail_mass);
}

} // namespace illumina
