#include "optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "errors.hpp"
#include "measurement.hpp"
#include "metrology.hpp"

namespace illumina {

void OptimOptions::validate() const {
  if (starts < 1) throw InvalidArgument("optimizer: starts must be at least 1");
  if (max_iter < 1) throw InvalidArgument("optimizer: max_iter must be at least 1");
  if (!(f_tol > 0.0) || !(x_tol > 0.0) || !(fd_step > 0.0))
    throw InvalidArgument("optimizer: tolerances and step must be positive");
}

std::vector<double> sphere_point(const std::vector<double>& angles) {
  std::vector<double> x(angles.size() + 1);
  double run = 1.0;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    x[k] = run * std::cos(angles[k]);
    run *= std::sin(angles[k]);
  }
  x.back() = run;
  return x;
}

std::vector<double> sphere_angles(const std::vector<double>& x) {
  if (x.size() < 2) return {};
  const std::size_t n = x.size() - 1;
  std::vector<double> tail(x.size() + 1, 0.0);
  for (std::size_t k = x.size(); k-- > 0;) tail[k] = tail[k + 1] + x[k] * x[k];
  std::vector<double> a(n);
  for (std::size_t k = 0; k + 1 < n; ++k) a[k] = std::atan2(std::sqrt(tail[k + 1]), x[k]);
  a[n - 1] = std::atan2(x[n], x[n - 1]);
  return a;
}

namespace {

using Point = std::vector<double>;
using Objective = std::function<double(const Point&)>;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct LocalResult {
  Point x;
  double f = -INFINITY;
  bool converged = false;
};

// Nelder-Mead on g = -f (so it minimises).
LocalResult nelder_mead(const Objective& f, Point x0, const OptimOptions& o) {
  const std::size_t n = x0.size();
  std::vector<Point> s(n + 1, x0);
  std::vector<double> g(n + 1);
  for (std::size_t k = 0; k < n; ++k) s[k + 1][k] += 0.25;
  for (std::size_t k = 0; k <= n; ++k) g[k] = -f(s[k]);

  std::vector<std::size_t> order(n + 1);
  LocalResult r;
  for (int it = 0; it < o.max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] < g[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double fspread = g[worst] - g[best];
    double diam = 0.0;
    for (std::size_t k = 0; k <= n; ++k)
      for (std::size_t j = 0; j < n; ++j) diam = std::max(diam, std::abs(s[k][j] - s[best][j]));
    if (fspread <= o.f_tol * std::max(1.0, std::abs(g[best])) && diam <= o.x_tol) {
      r.converged = true;
      break;
    }

    Point c(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k)
      if (k != worst)
        for (std::size_t j = 0; j < n; ++j) c[j] += s[k][j] / static_cast<double>(n);
    auto along = [&](double t) {
      Point p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = c[j] + t * (s[worst][j] - c[j]);
      return p;
    };
    Point xr = along(-1.0);
    const double gr = -f(xr);
    if (gr < g[best]) {
      Point xe = along(-2.0);
      const double ge = -f(xe);
      if (ge < gr) {
        s[worst] = std::move(xe);
        g[worst] = ge;
      } else {
        s[worst] = std::move(xr);
        g[worst] = gr;
      }
    } else if (gr < g[second]) {
      s[worst] = std::move(xr);
      g[worst] = gr;
    } else {
      const bool outside = gr < g[worst];
      Point xc = along(outside ? -0.5 : 0.5);
      const double gc = -f(xc);
      if (gc < (outside ? gr : g[worst])) {
        s[worst] = std::move(xc);
        g[worst] = gc;
      } else {
        for (std::size_t k = 0; k <= n; ++k) {
          if (k == best) continue;
          for (std::size_t j = 0; j < n; ++j) s[k][j] = s[best][j] + 0.5 * (s[k][j] - s[best][j]);
          g[k] = -f(s[k]);
        }
      }
    }
  }
  const auto b = static_cast<std::size_t>(std::min_element(g.begin(), g.end()) - g.begin());
  r.x = s[b];
  r.f = -g[b];
  return r;
}

Point gradient(const Objective& f, const Point& x, double h) {
  Point gr(x.size());
  Point y = x;
  for (std::size_t j = 0; j < x.size(); ++j) {
    y[j] = x[j] + h;
    const double fp = f(y);
    y[j] = x[j] - h;
    const double fm = f(y);
    y[j] = x[j];
    gr[j] = (fp - fm) / (2.0 * h);
  }
  return gr;
}

// BFGS ascent with central-difference gradients and backtracking.
LocalResult bfgs_polish(const Objective& f, LocalResult start, const OptimOptions& o) {
  const auto n = static_cast<Eigen::Index>(start.x.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  Point x = start.x;
  double fx = start.f;
  Point gx = gradient(f, x, o.fd_step);
  auto vec = [](const Point& p) { return Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())); };

  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd g = vec(gx);
    if (g.norm() <= 1e-7 * std::max(1.0, std::abs(fx))) {
      converged = true;
      break;
    }
    Eigen::VectorXd d = H * g;
    if (d.dot(g) <= 0.0) {
      H.setIdentity();
      d = g;
    }
    double t = 1.0;
    Point xn(x.size());
    double fn = fx;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t j = 0; j < x.size(); ++j) xn[j] = x[j] + t * d(static_cast<Eigen::Index>(j));
      fn = f(xn);
      if (fn >= fx + 1e-4 * t * d.dot(g)) {
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
    const Point gn = gradient(f, xn, o.fd_step);
    const Eigen::VectorXd sv = vec(xn) - vec(x);
    const Eigen::VectorXd yv = -(vec(gn) - g); // curvature of -f
    const double df = fn - fx;
    x = xn;
    gx = gn;
    fx = fn;
    const double sy = sv.dot(yv);
    if (sy > 1e-300) {
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      const Eigen::MatrixXd A = I - sv * yv.transpose() / sy;
      H = A * H * A.transpose() + sv * sv.transpose() / sy;
    }
    if (df <= o.f_tol * std::max(1.0, std::abs(fx)) && sv.cwiseAbs().maxCoeff() <= o.x_tol) {
      converged = true;
      break;
    }
  }
  if (fx >= start.f) {
    start.x = x;
    start.f = fx;
  }
  start.converged = start.converged || converged;
  return start;
}

Point random_sphere(std::uint64_t seed, std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Point x(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& v : x) {
      v = nd(rng);
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  for (double& v : x) v /= std::sqrt(norm2);
  return x;
}

} // namespace

OptimResult maximize_on_sphere(const Objective& f, std::size_t dim, const OptimOptions& opts) {
  opts.validate();
  if (dim < 2) throw InvalidArgument("maximize_on_sphere: need at least two coefficients");
  auto f_angles = [&](const Point& a) { return f(sphere_point(a)); };

  struct Start {
    Point x0;
    std::uint64_t seed;
    bool warm;
  };
  std::vector<Start> starts;
  if (opts.warm_start) {
    if (opts.warm_start->size() != dim) throw DimensionError("optimizer: warm start has the wrong length");
    starts.push_back({*opts.warm_start, opts.seed, true});
  }
  for (int k = 0; k < opts.starts; ++k) {
    const std::uint64_t s = splitmix64(opts.seed + static_cast<std::uint64_t>(k));
    starts.push_back({random_sphere(s, dim), s, false});
  }

  std::vector<LocalResult> results(starts.size());
  auto run = [&](std::size_t k) {
    LocalResult r = nelder_mead(f_angles, sphere_angles(starts[k].x0), opts);
    results[k] = bfgs_polish(f_angles, std::move(r), opts);
  };
  const std::size_t nt = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, opts.threads)), 1, starts.size());
  if (nt == 1) {
    for (std::size_t k = 0; k < starts.size(); ++k) run(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nt; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < starts.size(); k += nt) run(k);
      });
    for (auto& t : pool) t.join();
  }

  std::size_t best = 0;
  bool any_converged = false;
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (!std::isfinite(results[k].f)) continue;
    any_converged = any_converged || results[k].converged;
    if (!std::isfinite(results[best].f) || results[k].f > results[best].f) best = k;
  }
  if (!std::isfinite(results[best].f)) throw NumericalError("optimizer: objective is not finite at any start");

  OptimResult out;
  out.coeffs = sphere_point(results[best].x);
  const double norm = std::sqrt(std::inner_product(out.coeffs.begin(), out.coeffs.end(), out.coeffs.begin(), 0.0));
  for (double& c : out.coeffs) c /= norm;
  out.objective = f(out.coeffs);
  out.starts = static_cast<int>(starts.size());
  out.converged = any_converged;
  out.best_start_seed = starts[best].seed;
  out.best_is_warm_start = starts[best].warm;
  for (const auto& r : results)
    if (std::abs(r.f - results[best].f) <= 1e-6 * std::max(1e-300, std::abs(results[best].f))) ++out.agreeing_starts;
  return out;
}

OptimResult optimize_npe_qfi(int n_total, double n_th, const OptimOptions& opts, const TruncationPolicy& policy) {
  if (n_total < 1) throw InvalidArgument("optimize_npe_qfi: N must be at least 1");
  const ThermalDistribution th = thermal_distribution(n_th, policy);
  auto f = [&](const Point& x) {
    return qfi_product_fast(diagonal_idler_form(NpeState::from_real(n_total, x)), th).f_q;
  };
  OptimResult r = maximize_on_sphere(f, static_cast<std::size_t>(n_total) + 1, opts);
  for (double& c : r.coeffs) c = std::abs(c);
  r.objective = f(r.coeffs);
  r.n_signal = signal_energy(NpeState::from_real(n_total, r.coeffs));
  return r;
}

OptimResult optimize_npe_snr(int n_total, double eta, double n_th, const OptimOptions& opts,
                             std::optional<double> signal_constraint) {
  if (n_total < 1) throw InvalidArgument("optimize_npe_snr: N must be at least 1");
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("optimize_npe_snr: eta must lie in (0, 1)");
  if (signal_constraint && !(*signal_constraint >= 0.0 && *signal_constraint <= n_total))
    throw InvalidArgument("optimize_npe_snr: constrained N_S must lie in [0, N]");
  auto snr_of = [&](const Point& x) { return snr(NpeState::from_real(n_total, x), eta, n_th).snr; };
  auto f = [&](const Point& x) {
    double v = snr_of(x);
    if (signal_constraint) {
      const double gap = signal_energy(NpeState::from_real(n_total, x)) - *signal_constraint;
      v -= 1e2 * gap * gap;
    }
    return v;
  };
  OptimResult r = maximize_on_sphere(f, static_cast<std::size_t>(n_total) + 1, opts);
  if (std::accumulate(r.coeffs.begin(), r.coeffs.end(), 0.0) < 0.0)
    for (double& c : r.coeffs) c = -c;
  r.objective = snr_of(r.coeffs);
  r.n_signal = signal_energy(NpeState::from_real(n_total, r.coeffs));
  return r;
}

CoherentSnrOptimum optimize_coherent_snr(double n_total, double eta, double n_th) {
  if (!(n_total > 0.0)) throw InvalidArgument("optimize_coherent_snr: N must be positive");
  auto f = [&](double ns) { return snr_coherent_closed(n_total, std::clamp(ns, 0.0, n_total), 0.0, eta, n_th); };
  constexpr int kGrid = 400;
  int best = 0;
  double fbest = f(0.0);
  for (int k = 1; k <= kGrid; ++k) {
    const double v = f(n_total * k / kGrid);
    if (v > fbest) {
      fbest = v;
      best = k;
    }
  }
  double lo = n_total * std::max(0, best - 1) / kGrid;
  double hi = n_total * std::min(kGrid, best + 1) / kGrid;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-8 * std::max(1.0, n_total)) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  CoherentSnrOptimum out;
  out.n_signal = 0.5 * (lo + hi);
  out.snr = f(out.n_signal);
  if (fbest > out.snr) {
    out.n_signal = n_total * best / kGrid;
    out.snr = fbest;
  }
  out.degenerate = out.snr < 1e-12;
  return out;
}

std::vector<FractionCell> energy_fraction_sweep(const std::vector<int>& n_list, const std::vector<double>& n_th_grid,
                                                const OptimOptions& opts, const TruncationPolicy& policy) {
  if (n_list.empty() || n_th_grid.empty()) throw InvalidArgument("energy_fraction_sweep: empty grid");
  std::vector<FractionCell> cells;
  for (int n : n_list) {
    OptimOptions o = opts;
    o.warm_start.reset();
    for (double t : n_th_grid) {
      FractionCell c;
      c.n_total = n;
      c.n_th = t;
      try {
        c.result = optimize_npe_qfi(n, t, o, policy);
        c.fraction = c.result.n_signal / n;
        c.ok = c.result.converged;
        if (!c.ok) c.error = "no start converged";
        o.warm_start = c.result.coeffs;
      } catch (const Error& e) {
        c.ok = false;
        c.error = e.what();
      }
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

} // namespace illumina
