#include "metrology.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/SVD>

#include "errors.hpp"

namespace illumina {

std::string to_string(QfiMethod m) {
  switch (m) {
  case QfiMethod::generic: return "generic";
  case QfiMethod::product_fast: return "product_fast";
  case QfiMethod::closed_form: return "closed_form";
  }
  return "unknown";
}

QfiReport qfi_at_zero(const Matrix& rho0, const Matrix& first, const Matrix& second,
                      double pair_floor) {
  if (rho0.rows() != first.rows() || rho0.cols() != first.cols())
    throw DimensionError("qfi_at_zero: rho0 and its derivative differ in size");
  if (second.size() != 0 && (second.rows() != rho0.rows() || second.cols() != rho0.cols()))
    throw DimensionError("qfi_at_zero: second derivative has the wrong size");
  if (!is_hermitian(first)) throw NumericalError("qfi_at_zero: derivative is not Hermitian");

  const EigenSystem es = hermitian_eigen(rho0);
  std::vector<Eigen::Index> supp;
  std::vector<Eigen::Index> kernel;
  for (Eigen::Index k = 0; k < es.values.size(); ++k)
    (es.values(k) > pair_floor ? supp : kernel).push_back(k);

  QfiReport r;
  r.method = QfiMethod::generic;
  r.pair_floor = pair_floor;
  r.support_dim = supp.size();

  const auto ns = static_cast<Eigen::Index>(supp.size());
  Matrix vs(es.vectors.rows(), ns);
  for (Eigen::Index a = 0; a < ns; ++a) vs.col(a) = es.vectors.col(supp[a]);
  const Matrix d = vs.adjoint() * first * vs;
  double f = 0.0;
  for (Eigen::Index a = 0; a < ns; ++a)
    for (Eigen::Index b = 0; b < ns; ++b)
      f += 2.0 * std::norm(d(a, b)) / (es.values(supp[a]) + es.values(supp[b]));

  if (second.size() != 0 && !kernel.empty()) {
    double kt = 0.0;
    for (Eigen::Index k : kernel) {
      const auto v = es.vectors.col(k);
      kt += v.dot(second * v).real();
    }
    r.kernel_term = 2.0 * kt;
    f += r.kernel_term;
  }
  r.f_q = std::max(0.0, f);
  return r;
}

QfiReport qfi_at_zero(const DensityOperator& rho0, const Matrix& first) {
  return qfi_at_zero(rho0.mat(), first);
}

QfiReport qfi_generic(const StateVector& probe, double n_th, const TruncationPolicy& policy) {
  const ChannelExpansion ex = channel_expansion_at_zero(probe, n_th, policy);
  QfiReport r = qfi_at_zero(ex.rho0, ex.first, ex.second);
  r.tail_mass = ex.tail_mass;
  return r;
}

DiagonalIdlerProbe diagonal_idler_form(const NpeState& s) {
  const int N = s.total();
  DiagonalIdlerProbe p;
  p.q = s.probabilities();
  p.w.resize(p.q.size());
  for (int n = 0; n <= N; ++n) p.w[n] = p.q[n] * (N - n);
  for (int n = 0; n < N; ++n) {
    const cplx v = s.coeffs()[n] * std::conj(s.coeffs()[n + 1]) * std::sqrt(static_cast<double>(N - n));
    if (v != cplx(0.0)) p.sigma.push_back({static_cast<std::size_t>(n), static_cast<std::size_t>(n + 1), v});
  }
  return p;
}

DiagonalIdlerProbe diagonal_idler_form(const CoherentProbe& c, const TruncationPolicy& policy) {
  // The idler is pure, so a single eigen-level carries all of rho_I.
  const StateVector sig = coherent_vector(c.alpha, policy, "S");
  const Vector& a = sig.amp();
  cplx mean_a = 0.0;
  double mean_n = 0.0;
  for (Eigen::Index n = 1; n < a.size(); ++n) {
    mean_a += std::conj(a(n - 1)) * a(n) * std::sqrt(static_cast<double>(n));
    mean_n += std::norm(a(n)) * static_cast<double>(n);
  }
  DiagonalIdlerProbe p;
  p.q = {1.0};
  p.w = {mean_n};
  if (mean_a != cplx(0.0)) p.sigma.push_back({0, 0, mean_a});
  return p;
}

DiagonalIdlerProbe tmsv_diagonal_idler_form(double n_signal, const TruncationPolicy& policy) {
  const ThermalDistribution t = thermal_distribution(n_signal, policy);
  DiagonalIdlerProbe p;
  p.q = t.weights;
  p.w.resize(p.q.size());
  for (std::size_t n = 0; n < p.q.size(); ++n) p.w[n] = p.q[n] * static_cast<double>(n);
  for (std::size_t n = 1; n < p.q.size(); ++n)
    p.sigma.push_back({n, n - 1, std::sqrt(p.q[n] * p.q[n - 1] * static_cast<double>(n))});
  return p;
}

QfiReport qfi_product_fast(const DiagonalIdlerProbe& probe, const ThermalDistribution& thermal,
                           double pair_floor) {
  if (probe.q.size() != probe.w.size()) throw DimensionError("qfi_product_fast: q and w differ in size");
  // Bath levels 0..cutoff+1; the extra empty level receives one reflected photon.
  std::vector<double> p = thermal.weights;
  p.push_back(0.0);
  const std::size_t nm = p.size();
  auto pm = [&](long m) { return (m < 0 || m >= static_cast<long>(nm)) ? 0.0 : p[static_cast<std::size_t>(m)]; };

  QfiReport r;
  r.method = QfiMethod::product_fast;
  r.pair_floor = pair_floor;
  r.tail_mass = thermal.tail_mass;

  double f = 0.0;
  for (std::size_t m = 1; m < nm; ++m) {
    const double a = p[m - 1] - p[m];
    const double coupling = static_cast<double>(m) * a * a;
    if (coupling == 0.0) continue;
    for (const auto& e : probe.sigma) {
      const double lk = p[m] * probe.q[e.row];
      const double ll = p[m - 1] * probe.q[e.col];
      if (lk <= pair_floor || ll <= pair_floor) continue;
      f += 4.0 * coupling * std::norm(e.value) / (lk + ll);
    }
  }

  double kt = 0.0;
  std::size_t supp = 0;
  for (std::size_t m = 0; m < nm; ++m) {
    const auto lm = static_cast<long>(m);
    const double dm = static_cast<double>(m);
    const double hop = dm * pm(lm - 1) + (dm + 1.0) * pm(lm + 1) - (2.0 * dm + 1.0) * pm(lm);
    const double cool = (dm + 1.0) * pm(lm + 1) - dm * pm(lm);
    for (std::size_t j = 0; j < probe.q.size(); ++j) {
      if (p[m] * probe.q[j] > pair_floor) {
        ++supp;
        continue;
      }
      kt += 2.0 * (probe.w[j] * hop + probe.q[j] * cool);
    }
  }
  r.kernel_term = 2.0 * kt;
  r.support_dim = supp;
  r.f_q = std::max(0.0, f + r.kernel_term);
  return r;
}

QfiReport qfi_product_fast(const NpeState& probe, double n_th, const TruncationPolicy& policy) {
  return qfi_product_fast(diagonal_idler_form(probe), thermal_distribution(n_th, policy));
}

QfiReport qfi_product_fast(const CoherentProbe& probe, double n_th, const TruncationPolicy& policy) {
  return qfi_product_fast(diagonal_idler_form(probe, policy), thermal_distribution(n_th, policy));
}

double qfi_coherent_closed(double n_signal, double n_th) {
  if (!(n_signal >= 0.0) || !(n_th >= 0.0))
    throw InvalidArgument("qfi_coherent_closed: N_S and n_th must be nonnegative");
  return 4.0 * n_signal / (1.0 + 2.0 * n_th);
}

namespace {

// Eigensystem of a density matrix with round-off negatives clipped to zero;
// anything below -1e-10 is a genuine error.
EigenSystem psd_eigen(const Matrix& rho, const char* who) {
  EigenSystem es = hermitian_eigen(rho);
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    if (es.values(k) < -1e-10)
      throw NumericalError(std::string(who) + ": matrix has a negative eigenvalue " +
                           std::to_string(es.values(k)));
    es.values(k) = std::max(0.0, es.values(k));
  }
  return es;
}

void check_pair(const Matrix& a, const Matrix& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw DimensionError(std::string(who) + ": operators differ in size");
}

} // namespace

double fidelity(const Matrix& rho0, const Matrix& rho1) {
  check_pair(rho0, rho1, "fidelity");
  // Tr sqrt(sqrt(rho1) rho0 sqrt(rho1)) is the nuclear norm of sqrt(rho0) sqrt(rho1);
  // take singular values of L0^dag L1 with L = V sqrt(Lambda) rather than
  // square-rooting tiny eigenvalues of the product.
  const EigenSystem e0 = psd_eigen(rho0, "fidelity");
  const EigenSystem e1 = psd_eigen(rho1, "fidelity");
  const Matrix l0 = e0.vectors * e0.values.cwiseSqrt().cast<cplx>().asDiagonal();
  const Matrix l1 = e1.vectors * e1.values.cwiseSqrt().cast<cplx>().asDiagonal();
  const Matrix b = l0.adjoint() * l1;
  Eigen::BDCSVD<Matrix> svd(b);
  const double f = svd.singularValues().sum();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityOperator& rho0, const DensityOperator& rho1) {
  if (!(rho0.space() == rho1.space())) throw DimensionError("fidelity: states live on different spaces");
  return fidelity(rho0.mat(), rho1.mat());
}

double helstrom_error(const Matrix& rho0, const Matrix& rho1, double pi0, double pi1) {
  check_pair(rho0, rho1, "helstrom_error");
  if (!(pi0 >= 0.0 && pi1 >= 0.0) || std::abs(pi0 + pi1 - 1.0) > 1e-12)
    throw InvalidArgument("helstrom_error: priors must be nonnegative and sum to 1");
  const double tn = trace_norm(pi0 * rho0 - pi1 * rho1);
  return std::clamp(0.5 * (1.0 - tn), 0.0, std::max(pi0, pi1));
}

double helstrom_error(const DensityOperator& rho0, const DensityOperator& rho1, double pi0, double pi1) {
  if (!(rho0.space() == rho1.space())) throw DimensionError("helstrom_error: states live on different spaces");
  return helstrom_error(rho0.mat(), rho1.mat(), pi0, pi1);
}

namespace {

// Tr(rho0^s rho1^(1-s)) = sum_jk l_j^s m_k^(1-s) |<v_j|w_k>|^2 over the supports.
class ChernoffTrace {
public:
  ChernoffTrace(const Matrix& rho0, const Matrix& rho1) {
    const EigenSystem e0 = psd_eigen(rho0, "chernoff");
    const EigenSystem e1 = psd_eigen(rho1, "chernoff");
    std::vector<Eigen::Index> s0, s1;
    for (Eigen::Index k = 0; k < e0.values.size(); ++k)
      if (e0.values(k) > kEigenFloor) s0.push_back(k);
    for (Eigen::Index k = 0; k < e1.values.size(); ++k)
      if (e1.values(k) > kEigenFloor) s1.push_back(k);
    const auto n0 = static_cast<Eigen::Index>(s0.size());
    const auto n1 = static_cast<Eigen::Index>(s1.size());
    Matrix v0(rho0.rows(), n0), v1(rho1.rows(), n1);
    log0_.resize(n0);
    log1_.resize(n1);
    for (Eigen::Index a = 0; a < n0; ++a) {
      v0.col(a) = e0.vectors.col(s0[a]);
      log0_(a) = std::log(e0.values(s0[a]));
    }
    for (Eigen::Index b = 0; b < n1; ++b) {
      v1.col(b) = e1.vectors.col(s1[b]);
      log1_(b) = std::log(e1.values(s1[b]));
    }
    overlap_ = (v0.adjoint() * v1).cwiseAbs2();
  }

  double operator()(double s) const {
    const RealVector a = (s * log0_).array().exp().matrix();
    const RealVector b = ((1.0 - s) * log1_).array().exp().matrix();
    return a.dot(overlap_ * b);
  }

private:
  RealVector log0_, log1_;
  Eigen::MatrixXd overlap_;
};

} // namespace

ChernoffResult chernoff(const Matrix& rho0, const Matrix& rho1) {
  check_pair(rho0, rho1, "chernoff");
  const ChernoffTrace f(rho0, rho1);
  constexpr int kGrid = 21;
  std::array<double, kGrid> vals{};
  int best = 0;
  for (int g = 0; g < kGrid; ++g) {
    vals[g] = f(g / 20.0);
    if (vals[g] < vals[best]) best = g;
  }
  double lo = std::max(0, best - 1) / 20.0;
  double hi = std::min(kGrid - 1, best + 1) / 20.0;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-6) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  ChernoffResult r;
  const double mid = 0.5 * (lo + hi);
  r.s_star = mid;
  r.q = f(mid);
  if (vals[best] < r.q) {
    r.q = vals[best];
    r.s_star = best / 20.0;
  }
  r.q = std::clamp(r.q, 0.0, 1.0);
  return r;
}

ChernoffResult chernoff(const DensityOperator& rho0, const DensityOperator& rho1) {
  if (!(rho0.space() == rho1.space())) throw DimensionError("chernoff: states live on different spaces");
  return chernoff(rho0.mat(), rho1.mat());
}

double bhattacharyya(const Matrix& rho0, const Matrix& rho1) {
  check_pair(rho0, rho1, "bhattacharyya");
  return std::clamp(ChernoffTrace(rho0, rho1)(0.5), 0.0, 1.0);
}

double bhattacharyya(const DensityOperator& rho0, const DensityOperator& rho1) {
  if (!(rho0.space() == rho1.space())) throw DimensionError("bhattacharyya: states live on different spaces");
  return bhattacharyya(rho0.mat(), rho1.mat());
}

DiscriminationReport discriminate(const DensityOperator& rho0, const DensityOperator& rho1,
                                  double pi0, double pi1) {
  DiscriminationReport r;
  r.pi0 = pi0;
  r.pi1 = pi1;
  r.p_err_helstrom = helstrom_error(rho0, rho1, pi0, pi1);
  r.fidelity = fidelity(rho0, rho1);
  const ChernoffResult c = chernoff(rho0, rho1);
  r.chernoff_q = c.q;
  r.chernoff_s_star = c.s_star;
  r.bhattacharyya = std::max(bhattacharyya(rho0, rho1), c.q);
  return r;
}

ErrorBounds error_bounds_from_qfi(double f_q, double eta, int m) {
  if (!(f_q >= 0.0)) throw InvalidArgument("error_bounds_from_qfi: F_Q must be nonnegative");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("error_bounds_from_qfi: eta outside [0, 1]");
  if (m < 1) throw InvalidArgument("error_bounds_from_qfi: M must be at least 1");
  const double x = static_cast<double>(m) * f_q * eta * eta;
  const double log_lower = -x / 4.0 - std::log(4.0), log_upper = -x / 8.0 - std::log(2.0);
  return ErrorBounds{std::exp(log_lower), std::exp(log_upper), m, eta, f_q, log_lower, log_upper};
}

std::pair<double, double> fidelity_error_bounds(double f, int m) {
  if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("fidelity_error_bounds: fidelity outside [0, 1]");
  if (m < 1) throw InvalidArgument("fidelity_error_bounds: M must be at least 1");
  const double fm = std::pow(f, m);
  return {0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - fm * fm))), 0.5 * fm};
}

} // namespace illumina
