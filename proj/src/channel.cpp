#include "channel.hpp"

#include <cmath>

#include "errors.hpp"

namespace illumina {

void ChannelParams::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("channel: eta must lie in [0, 1]");
  if (!(n_th >= 0.0) || !std::isfinite(n_th)) throw InvalidArgument("channel: n_th must be >= 0");
  policy.validate();
}

Matrix generator(const ModeSpace& space) {
  if (!space.has("S") || !space.has("B"))
    throw InvalidArgument("generator: space must contain modes S and B");
  const Matrix aS = embed(annihilation(space.dim("S")), "S", space);
  const Matrix b = embed(annihilation(space.dim("B")), "B", space);
  return aS * b.adjoint() - aS.adjoint() * b;
}

namespace {

struct ProbeLayout {
  std::size_t dS, dI, strideS, strideI;
};

ProbeLayout layout_of(const StateVector& probe) {
  const ModeSpace& sp = probe.space();
  if (sp.modes() != 2 || !sp.has("S") || !sp.has("I"))
    throw InvalidArgument("channel: probe must live on modes {S, I}");
  const std::size_t iS = sp.index_of("S"), iI = sp.index_of("I");
  return {sp.dims()[iS], sp.dims()[iI], sp.stride(iS), sp.stride(iI)};
}

// U|0, m> over the sector basis |j, m-j>, j = 0..m.
std::vector<double> vacuum_column(std::size_t m, double c, double sn) {
  std::vector<double> out(m + 1, 0.0);
  if (sn == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (c == 0.0) {
    out[m] = (m % 2 == 0) ? 1.0 : -1.0;
    return out;
  }
  const double lc = std::log(c), ls = std::log(sn);
  const double dm = static_cast<double>(m);
  for (std::size_t j = 0; j <= m; ++j) {
    const double dj = static_cast<double>(j);
    const double lbin = std::lgamma(dm + 1.0) - std::lgamma(dj + 1.0) - std::lgamma(dm - dj + 1.0);
    const double mag = std::exp(0.5 * lbin + dj * ls + (dm - dj) * lc);
    out[j] = (j % 2 == 0) ? mag : -mag;
  }
  return out;
}

} // namespace

ModeSpace channel_output_space(const StateVector& probe, std::size_t thermal_cutoff) {
  const ProbeLayout L = layout_of(probe);
  return ModeSpace({thermal_cutoff + L.dS, L.dI}, {"R", "I"});
}

DensityOperator apply_channel(const StateVector& probe, const ChannelParams& params) {
  params.validate();
  const ProbeLayout L = layout_of(probe);
  const ThermalDistribution th = thermal_distribution(params.n_th, params.policy);
  ModeSpace out_space = channel_output_space(probe, th.cutoff);
  if (out_space.dims()[0] > params.policy.max_dim)
    throw TruncationOverflow("return mode exceeds max_dim", out_space.dims()[0]);
  const std::size_t dR = out_space.dims()[0];
  const auto total = static_cast<Eigen::Index>(dR * L.dI);
  const std::size_t s_max = L.dS - 1;

  const double theta = std::asin(params.eta);
  const double c = params.eta == 1.0 ? 0.0 : std::cos(theta);
  const double sn = params.eta;

  Matrix rho = Matrix::Zero(total, total);
  const Vector& amp = probe.amp();
  auto coef = [&](std::size_t s, std::size_t i) { return amp(static_cast<Eigen::Index>(s * L.strideS + i * L.strideI)); };

  std::vector<std::vector<double>> cols(L.dS);
  for (std::size_t m = 0; m <= th.cutoff; ++m) {
    const double p = th.weights[m];
    if (p == 0.0) continue;
    // cols[s] = U|s, m> in sector K = s + m, indexed by the S-output count j.
    cols[0] = vacuum_column(m, c, sn);
    for (std::size_t s = 0; s < s_max; ++s) {
      const std::size_t K = s + m;
      const std::vector<double>& old = cols[s];
      std::vector<double> nxt(K + 2, 0.0);
      for (std::size_t j = 0; j <= K + 1; ++j) {
        double v = 0.0;
        if (j >= 1) v += c * std::sqrt(static_cast<double>(j)) * old[j - 1];
        if (j <= K) v += sn * std::sqrt(static_cast<double>(K + 1 - j)) * old[j];
        nxt[j] = v / std::sqrt(static_cast<double>(s + 1));
      }
      cols[s + 1] = std::move(nxt);
    }
    // Trace over the S output j: for fixed j the return occupation b = s + m - j
    // is contiguous in s, so each slice is one dense segment of the (R, I) index.
    for (std::size_t j = 0; j <= s_max + m; ++j) {
      const std::size_t s_lo = j > m ? j - m : 0;
      const std::size_t b_lo = s_lo + m - j;
      const std::size_t len = (s_max - s_lo + 1) * L.dI;
      Vector y = Vector::Zero(static_cast<Eigen::Index>(len));
      bool any = false;
      for (std::size_t s = s_lo; s <= s_max; ++s) {
        const double u = cols[s][j];
        if (u == 0.0) continue;
        for (std::size_t i = 0; i < L.dI; ++i) {
          const cplx a = coef(s, i);
          if (a == cplx(0.0)) continue;
          y(static_cast<Eigen::Index>((s - s_lo) * L.dI + i)) = a * u;
          any = true;
        }
      }
      if (!any) continue;
      const auto start = static_cast<Eigen::Index>(b_lo * L.dI);
      rho.block(start, start, y.size(), y.size()).noalias() += p * (y * y.adjoint());
    }
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityOperator(std::move(out_space), std::move(rho), th.tail_mass + probe.tail_mass());
}

ChannelExpansion channel_expansion_at_zero(const StateVector& probe, double n_th,
                                           const TruncationPolicy& policy) {
  const ProbeLayout L = layout_of(probe);
  const ThermalDistribution th = thermal_distribution(n_th, policy);
  ModeSpace out_space = channel_output_space(probe, th.cutoff);
  if (out_space.dims()[0] > policy.max_dim)
    throw TruncationOverflow("return mode exceeds max_dim", out_space.dims()[0]);
  const std::size_t dR = out_space.dims()[0];
  const auto total = static_cast<Eigen::Index>(dR * L.dI);

  ChannelExpansion ex{out_space, Matrix::Zero(total, total), Matrix::Zero(total, total),
                      Matrix::Zero(total, total), th.tail_mass + probe.tail_mass()};

  // Local representation for one bath component m: indices (s, b - m + 2, i)
  // with s in [0, dS + 1] and b - m in [-2, 2].
  const std::size_t nS = L.dS + 2;
  const std::size_t W = 5 * L.dI;
  auto at = [&](std::size_t s, int d, std::size_t i) { return static_cast<Eigen::Index>(s * W + static_cast<std::size_t>(d + 2) * L.dI + i); };

  auto apply_g = [&](const Vector& v, std::size_t m) {
    Vector out = Vector::Zero(v.size());
    for (std::size_t s = 0; s < nS; ++s)
      for (int d = -2; d <= 2; ++d) {
        const long b = static_cast<long>(m) + d;
        if (b < 0) continue;
        for (std::size_t i = 0; i < L.dI; ++i) {
          const cplx x = v(at(s, d, i));
          if (x == cplx(0.0)) continue;
          // a b^dag |s, b> = sqrt(s (b+1)) |s-1, b+1>
          if (s >= 1) {
            if (d + 1 > 2) throw NumericalError("channel expansion: bath window exceeded");
            out(at(s - 1, d + 1, i)) += std::sqrt(static_cast<double>(s) * static_cast<double>(b + 1)) * x;
          }
          // -a^dag b |s, b> = -sqrt((s+1) b) |s+1, b-1>
          if (b >= 1) {
            if (s + 1 >= nS || d - 1 < -2) throw NumericalError("channel expansion: window exceeded");
            out(at(s + 1, d - 1, i)) -= std::sqrt(static_cast<double>(s + 1) * static_cast<double>(b)) * x;
          }
        }
      }
    return out;
  };

  const Vector& amp = probe.amp();
  for (std::size_t m = 0; m <= th.cutoff; ++m) {
    const double p = th.weights[m];
    if (p == 0.0) continue;
    Vector v = Vector::Zero(static_cast<Eigen::Index>(nS * W));
    for (std::size_t s = 0; s < L.dS; ++s)
      for (std::size_t i = 0; i < L.dI; ++i)
        v(at(s, 0, i)) = amp(static_cast<Eigen::Index>(s * L.strideS + i * L.strideI));
    const Vector g1 = apply_g(v, m);
    const Vector g2 = apply_g(g1, m);

    const int d_lo = std::max(-2, -static_cast<int>(m));
    const int d_hi = std::min(2, static_cast<int>(dR) - 1 - static_cast<int>(m));
    const auto start = static_cast<Eigen::Index>((static_cast<long>(m) + d_lo) * static_cast<long>(L.dI));
    const auto len = static_cast<Eigen::Index>((d_hi - d_lo + 1) * static_cast<int>(L.dI));
    const auto off = static_cast<Eigen::Index>((d_lo + 2) * static_cast<int>(L.dI));
    for (std::size_t s = 0; s < nS; ++s) {
      const auto base = static_cast<Eigen::Index>(s * W);
      const Vector x0 = v.segment(base + off, len);
      const Vector x1 = g1.segment(base + off, len);
      const Vector x2 = g2.segment(base + off, len);
      if (x0.squaredNorm() + x1.squaredNorm() + x2.squaredNorm() == 0.0) continue;
      auto b0 = ex.rho0.block(start, start, len, len);
      auto b1 = ex.first.block(start, start, len, len);
      auto b2 = ex.second.block(start, start, len, len);
      b0.noalias() += p * (x0 * x0.adjoint());
      b1.noalias() += p * (x1 * x0.adjoint() + x0 * x1.adjoint());
      b2.noalias() += p * (x2 * x0.adjoint() + 2.0 * (x1 * x1.adjoint()) + x0 * x2.adjoint());
    }
  }
  ex.rho0 = 0.5 * (ex.rho0 + ex.rho0.adjoint()).eval();
  ex.first = 0.5 * (ex.first + ex.first.adjoint()).eval();
  ex.second = 0.5 * (ex.second + ex.second.adjoint()).eval();
  return ex;
}

Matrix drho_deta_at_zero(const StateVector& probe, double n_th, const TruncationPolicy& policy) {
  return channel_expansion_at_zero(probe, n_th, policy).first;
}

} // namespace illumina
