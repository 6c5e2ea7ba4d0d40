#include "measurement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include "channel.hpp"
#include "errors.hpp"

namespace illumina {

Matrix m_operator(double eta, const ModeSpace& space) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("m_operator: eta must lie in [0, 1]");
  if (!space.has("S") || !space.has("B") || !space.has("I"))
    throw InvalidArgument("m_operator: space must contain modes S, B and I");
  const Matrix aS = embed(annihilation(space.dim("S")), "S", space);
  const Matrix b = embed(annihilation(space.dim("B")), "B", space);
  const Matrix aI = embed(annihilation(space.dim("I")), "I", space);
  const Matrix x = aI.adjoint() * aS + aI * aS.adjoint();
  const Matrix y = aI.adjoint() * b + aI * b.adjoint();
  return eta * x + std::sqrt(1.0 - eta * eta) * y;
}

namespace {

void check_params(double eta, double n_th) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in [0, 1]");
  if (!(n_th >= 0.0) || !std::isfinite(n_th)) throw InvalidArgument("n_th must be finite and >= 0");
}

// <X>, <X^2>, <n_I> assembled into the two hypotheses' moments.
MomentReport assemble(double x1, double x2, double n_idler, double eta, double n_th) {
  const double y2 = (2.0 * n_th + 1.0) * n_idler + n_th;
  const double e2 = eta * eta;
  MomentReport r;
  r.mean0 = 0.0;
  r.mean1 = eta * x1;
  r.sigma0 = std::sqrt(std::max(0.0, y2));
  r.sigma1 = std::sqrt(std::max(0.0, e2 * (x2 - x1 * x1) + (1.0 - e2) * y2));
  const double den = r.sigma0 + r.sigma1;
  r.threshold = den > 0.0 ? (r.sigma1 * r.mean0 + r.sigma0 * r.mean1) / den : 0.5 * (r.mean0 + r.mean1);
  return r;
}

} // namespace

MomentReport moments(const StateVector& probe, double eta, double n_th) {
  check_params(eta, n_th);
  const ModeSpace& sp = probe.space();
  if (sp.modes() != 2 || !sp.has("S") || !sp.has("I"))
    throw InvalidArgument("moments: probe must live on modes {S, I}");
  const std::size_t iS = sp.index_of("S"), iI = sp.index_of("I");
  const std::size_t dS = sp.dims()[iS], dI = sp.dims()[iI];
  const Vector& amp = probe.amp();
  auto in = [&](std::size_t s, std::size_t i) { return amp(static_cast<Eigen::Index>(s * sp.stride(iS) + i * sp.stride(iI))); };

  // X psi on a grid one level larger in each mode, so nothing is cut off.
  const std::size_t eS = dS + 1, eI = dI + 1;
  Vector xpsi = Vector::Zero(static_cast<Eigen::Index>(eS * eI));
  auto out = [&](std::size_t s, std::size_t i) -> cplx& { return xpsi(static_cast<Eigen::Index>(s * eI + i)); };
  double n_idler = 0.0;
  for (std::size_t s = 0; s < dS; ++s)
    for (std::size_t i = 0; i < dI; ++i) {
      const cplx a = in(s, i);
      if (a == cplx(0.0)) continue;
      n_idler += std::norm(a) * static_cast<double>(i);
      if (s >= 1) out(s - 1, i + 1) += std::sqrt(static_cast<double>(s * (i + 1))) * a;
      if (i >= 1) out(s + 1, i - 1) += std::sqrt(static_cast<double>((s + 1) * i)) * a;
    }
  cplx x1 = 0.0;
  for (std::size_t s = 0; s < dS; ++s)
    for (std::size_t i = 0; i < dI; ++i) x1 += std::conj(in(s, i)) * out(s, i);
  return assemble(x1.real(), xpsi.squaredNorm(), n_idler, eta, n_th);
}

MomentReport moments(const NpeState& probe, double eta, double n_th) {
  check_params(eta, n_th);
  const int N = probe.total();
  const auto& a = probe.coeffs();
  double x1 = 0.0, x2 = 0.0, n_idler = 0.0;
  for (int n = 0; n <= N; ++n) {
    cplx xn = 0.0;
    if (n >= 1) xn += a[n - 1] * std::sqrt(static_cast<double>((N - n + 1) * n));
    if (n < N) xn += a[n + 1] * std::sqrt(static_cast<double>((n + 1) * (N - n)));
    x1 += (std::conj(a[n]) * xn).real();
    x2 += std::norm(xn);
    n_idler += std::norm(a[n]) * n;
  }
  return assemble(x1, x2, n_idler, eta, n_th);
}

SnrReport snr_from_moments(const MomentReport& m, double eta, double n_th) {
  SnrReport r;
  r.moments = m;
  r.eta = eta;
  r.n_th = n_th;
  const double den = m.sigma0 + m.sigma1;
  if (den > 0.0) {
    r.snr = (m.mean1 - m.mean0) / den;
  } else {
    r.degenerate = true;
  }
  return r;
}

SnrReport snr(const StateVector& probe, double eta, double n_th) {
  return snr_from_moments(moments(probe, eta, n_th), eta, n_th);
}

SnrReport snr(const NpeState& probe, double eta, double n_th) {
  return snr_from_moments(moments(probe, eta, n_th), eta, n_th);
}

double snr_coherent_closed(double n_total, double n_signal, double theta, double eta, double n_th) {
  check_params(eta, n_th);
  if (!(n_total >= 0.0) || !(n_signal >= 0.0 && n_signal <= n_total))
    throw InvalidArgument("snr_coherent_closed: N_S must lie in [0, N]");
  const double n_idler = n_total - n_signal;
  const double t = 1.0 - eta * eta;
  const double num = 2.0 * eta * std::sqrt(n_signal * n_idler) * std::cos(theta);
  const double var1 = n_total - t * n_signal + (2.0 * n_idler + 1.0) * t * n_th;
  const double var0 = (2.0 * n_th + 1.0) * n_idler + n_th;
  const double den = std::sqrt(std::max(0.0, var1)) + std::sqrt(std::max(0.0, var0));
  return den > 0.0 ? num / den : 0.0;
}

double p_err_gaussian(double snr, int m) {
  if (m < 1) throw InvalidArgument("p_err_gaussian: m must be at least 1");
  return std::exp(-static_cast<double>(m) * snr * snr / 2.0);
}

double OutcomePmf::mean() const {
  double mu = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) mu += probs[k] * support[k];
  return mu;
}

double OutcomePmf::variance() const {
  const double mu = mean();
  double v = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) v += probs[k] * (support[k] - mu) * (support[k] - mu);
  return v;
}

OutcomePmf outcome_pmf(const StateVector& probe, double eta, double n_th, const TruncationPolicy& policy) {
  const DensityOperator rho = apply_channel(probe, ChannelParams{eta, n_th, policy});
  const std::size_t dR = rho.space().dims()[0], dI = rho.space().dims()[1];
  const Matrix& m = rho.mat();
  const std::size_t k_max = dR + dI - 2;
  const double h = 1.0 / std::sqrt(2.0);

  // cols[b] holds (r^dag)^b (a^dag)^(K-b) |0> / sqrt(b! (K-b)!) over n_d = 0..K.
  std::vector<std::vector<double>> prev(dR), cur(dR);
  prev[0] = {1.0};
  std::map<int, double> acc;
  auto lift = [&](const std::vector<double>& v, std::size_t K, double sign) {
    std::vector<double> o(K + 1, 0.0);
    for (std::size_t n = 0; n < K; ++n) {
      o[n + 1] += h * std::sqrt(static_cast<double>(n + 1)) * v[n];
      o[n] += sign * h * std::sqrt(static_cast<double>(K - n)) * v[n];
    }
    return o;
  };

  for (std::size_t K = 0; K <= k_max; ++K) {
    const std::size_t lo = K >= dI ? K - dI + 1 : 0;
    const std::size_t hi = std::min(K, dR - 1);
    if (K > 0) {
      for (std::size_t b = lo; b <= hi; ++b) {
        if (b == 0) {
          cur[0] = lift(prev[0], K, -1.0);
          for (double& x : cur[0]) x /= std::sqrt(static_cast<double>(K));
        } else {
          cur[b] = lift(prev[b - 1], K, 1.0);
          for (double& x : cur[b]) x /= std::sqrt(static_cast<double>(b));
        }
      }
      std::swap(prev, cur);
    }
    const auto nb = static_cast<Eigen::Index>(hi - lo + 1);
    Eigen::MatrixXd B(static_cast<Eigen::Index>(K + 1), nb);
    Matrix blk(nb, nb);
    for (Eigen::Index u = 0; u < nb; ++u) {
      const std::size_t bu = lo + static_cast<std::size_t>(u);
      for (std::size_t n = 0; n <= K; ++n) B(static_cast<Eigen::Index>(n), u) = prev[bu][n];
      for (Eigen::Index w = 0; w < nb; ++w) {
        const std::size_t bw = lo + static_cast<std::size_t>(w);
        blk(u, w) = m(static_cast<Eigen::Index>(bu * dI + (K - bu)), static_cast<Eigen::Index>(bw * dI + (K - bw)));
      }
    }
    const Matrix bc = B.cast<cplx>();
    const Matrix t = bc * blk;
    for (std::size_t n = 0; n <= K; ++n) {
      const double p = t.row(static_cast<Eigen::Index>(n)).dot(bc.row(static_cast<Eigen::Index>(n)).conjugate()).real();
      acc[2 * static_cast<int>(n) - static_cast<int>(K)] += p;
    }
  }

  OutcomePmf pmf;
  pmf.tail_mass = rho.tail_mass();
  for (const auto& [d, p] : acc) {
    if (p < -1e-12) throw NumericalError("outcome_pmf: negative probability " + std::to_string(p));
    if (p <= 0.0) continue;
    pmf.support.push_back(d);
    pmf.probs.push_back(p);
  }
  return pmf;
}

namespace {

// Vose alias table; one 53-bit uniform picks the column and the coin.
class AliasSampler {
public:
  explicit AliasSampler(const OutcomePmf& pmf) : values_(pmf.support) {
    const std::size_t n = pmf.probs.size();
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    double total = 0.0;
    for (double p : pmf.probs) total += p;
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t k = 0; k < n; ++k) {
      scaled[k] = pmf.probs[k] / total * static_cast<double>(n);
      (scaled[k] < 1.0 ? small : large).push_back(k);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back(), l = large.back();
      small.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::size_t k : large) prob_[k] = 1.0;
    for (std::size_t k : small) prob_[k] = 1.0;
  }

  int draw(std::mt19937_64& rng) const {
    const double x = static_cast<double>(rng() >> 11) * 0x1.0p-53 * static_cast<double>(prob_.size());
    const auto k = std::min(static_cast<std::size_t>(x), prob_.size() - 1);
    return (x - static_cast<double>(k) < prob_[k]) ? values_[k] : values_[alias_[k]];
  }

private:
  std::vector<int> values_;
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

std::mt19937_64 trial_stream(std::uint64_t seed, std::int64_t trial, unsigned hypothesis) {
  const auto t = static_cast<std::uint64_t>(trial);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32), hypothesis};
  return std::mt19937_64(seq);
}

void check_pmf(const OutcomePmf& p) {
  if (p.support.empty() || p.support.size() != p.probs.size())
    throw InvalidArgument("simulate_detection: malformed pmf");
  double total = 0.0;
  for (double q : p.probs) {
    if (!(q >= 0.0)) throw InvalidArgument("simulate_detection: negative probability");
    total += q;
  }
  if (std::abs(total - 1.0) > 1e-9 + p.tail_mass) throw InvalidArgument("simulate_detection: pmf does not sum to 1");
}

} // namespace

DetectionEstimate simulate_detection(const OutcomePmf& pmf0, const OutcomePmf& pmf1, int m,
                                     std::int64_t trials, std::uint64_t seed, int threads) {
  if (m < 1) throw InvalidArgument("simulate_detection: m must be at least 1");
  if (trials < 1) throw InvalidArgument("simulate_detection: trials must be at least 1");
  check_pmf(pmf0);
  check_pmf(pmf1);

  DetectionEstimate est;
  est.degenerate = pmf0.support == pmf1.support && pmf0.probs == pmf1.probs;
  const double mu0 = pmf0.mean(), mu1 = pmf1.mean();
  const double s0 = std::sqrt(pmf0.variance()), s1 = std::sqrt(pmf1.variance());
  est.threshold = (s0 + s1) > 0.0 ? (s1 * mu0 + s0 * mu1) / (s0 + s1) : 0.5 * (mu0 + mu1);
  // H0 is chosen when the sample mean falls on the mu0 side of the threshold.
  const double dir = mu1 >= mu0 ? 1.0 : -1.0;
  const double cut = static_cast<double>(m) * est.threshold;

  const AliasSampler a0(pmf0), a1(pmf1);
  const int nt = std::max(1, threads);
  std::vector<std::int64_t> false_alarms(nt, 0), misses(nt, 0);
  auto work = [&](int w) {
    const std::int64_t begin = trials * w / nt, end = trials * (w + 1) / nt;
    for (std::int64_t t = begin; t < end; ++t) {
      for (unsigned h = 0; h < 2; ++h) {
        std::mt19937_64 rng = trial_stream(seed, t, h);
        const AliasSampler& a = h == 0 ? a0 : a1;
        std::int64_t sum = 0;
        for (int k = 0; k < m; ++k) sum += a.draw(rng);
        const bool choose_h0 = dir * (static_cast<double>(sum) - cut) < 0.0;
        if (h == 0 && !choose_h0) ++false_alarms[w];
        if (h == 1 && choose_h0) ++misses[w];
      }
    }
  };
  if (nt == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  std::int64_t fa = 0, mi = 0;
  for (int w = 0; w < nt; ++w) {
    fa += false_alarms[w];
    mi += misses[w];
  }
  const double T = static_cast<double>(trials);
  est.p_false_alarm = static_cast<double>(fa) / T;
  est.p_miss = static_cast<double>(mi) / T;
  est.p_err_hat = 0.5 * (est.p_false_alarm + est.p_miss);
  est.stderr_ = 0.5 * std::sqrt(est.p_false_alarm * (1.0 - est.p_false_alarm) / T +
                                est.p_miss * (1.0 - est.p_miss) / T);
  return est;
}

} // namespace illumina
