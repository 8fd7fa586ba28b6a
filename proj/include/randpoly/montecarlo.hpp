#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "randpoly/core.hpp"
#include "randpoly/ensembles.hpp"
#include "randpoly/kernel.hpp"

namespace randpoly {

struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error " + std::to_string(achieved) + ")"),
        achieved_error(achieved) {}
  double achieved_error;
};

/// Worker threads for trial and grid maps; RANDPOLY_THREADS caps the count.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RANDPOLY_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

// Root finding ----------------------------------------------------------------

struct RootSet {
  std::vector<cplx> roots;
  std::vector<double> residuals;  // |p(z)| for |z| <= 1, |z^-N p(z)| otherwise
  std::uint64_t trial = 0;
  int sweeps = 0;
  bool converged = false;

  double max_residual() const {
    return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
  }
};

struct AberthOptions {
  int max_sweeps = 1000;
  double tolerance = 1e-13;  // relative correction size
  double residual_factor = 1e-8;
};

namespace detail {

// Newton correction p/p' at z. Outside the unit disk the reversed polynomial
// q(w) = w^N p(1/w) is used, which keeps the arithmetic bounded.
inline cplx newton_correction(std::span<const cplx> c, cplx z) {
  const int N = static_cast<int>(c.size()) - 1;
  if (std::abs(z) <= 1.0) {
    cplx p = c[N], dp = 0.0;
    for (int k = N - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + c[k];
    }
    return p / dp;
  }
  const cplx w = 1.0 / z;
  cplx q = c[0], dq = 0.0;
  for (int k = 1; k <= N; ++k) {
    dq = dq * w + q;
    q = q * w + c[k];
  }
  // p'/p = w (N - w q'/q)
  return 1.0 / (w * (static_cast<double>(N) - w * dq / q));
}

inline double root_residual(std::span<const cplx> c, cplx z) {
  const int N = static_cast<int>(c.size()) - 1;
  cplx acc = 0.0;
  if (std::abs(z) <= 1.0) {
    for (int k = N; k >= 0; --k) acc = acc * z + c[k];
  } else {
    const cplx w = 1.0 / z;
    for (int k = 0; k <= N; ++k) acc = acc * w + c[k];
  }
  return std::abs(acc);
}

}  // namespace detail

/// All roots of sum_k c_k z^k (ascending coefficients) by Aberth-Ehrlich
/// iteration started on the circle of radius 1 + max |c_k/c_N|^{1/(N-k)}.
inline RootSet find_roots(std::span<const cplx> c, const AberthOptions& opt = {}) {
  const int N = static_cast<int>(c.size()) - 1;
  if (N < 1) throw DomainError("find_roots: degree must be >= 1");
  if (c[N] == 0.0) throw DomainError("find_roots: leading coefficient is zero");

  double radius = 0.0;
  for (int k = 0; k < N; ++k)
    radius = std::max(radius, std::pow(std::abs(c[k] / c[N]), 1.0 / (N - k)));
  radius += 1.0;

  RootSet rs;
  rs.roots.resize(N);
  const double golden = 2.0 * pi * (1.0 - 1.0 / std::numbers::phi);
  for (int i = 0; i < N; ++i) rs.roots[i] = std::polar(radius, 0.4 + golden * i);

  std::vector<bool> done(N, false);
  int remaining = N;
  for (rs.sweeps = 0; rs.sweeps < opt.max_sweeps && remaining > 0; ++rs.sweeps) {
    for (int i = 0; i < N; ++i) {
      if (done[i]) continue;
      const cplx zi = rs.roots[i];
      const cplx ratio = detail::newton_correction(c, zi);
      cplx sum = 0.0;
      for (int j = 0; j < N; ++j)
        if (j != i) sum += 1.0 / (zi - rs.roots[j]);
      const cplx step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
        // p(zi) == 0 exactly, or a coincident pair: leave for the residual check.
        done[i] = true;
        --remaining;
        continue;
      }
      rs.roots[i] = zi - step;
      if (std::abs(step) <= opt.tolerance * std::abs(rs.roots[i])) {
        done[i] = true;
        --remaining;
      }
    }
  }

  double scale = 0.0;
  for (const auto& v : c) scale = std::max(scale, std::abs(v));
  rs.residuals.reserve(N);
  for (const auto& z : rs.roots) rs.residuals.push_back(detail::root_residual(c, z));
  rs.converged = rs.max_residual() < opt.residual_factor * scale;
  return rs;
}

inline RootSet find_roots(const CoefficientVector& coeffs, const AberthOptions& opt = {}) {
  auto rs = find_roots(weighted_coefficients(coeffs), opt);
  rs.trial = coeffs.trial;
  return rs;
}

// Histograms ------------------------------------------------------------------

struct Region {
  double x_lo = -1.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;

  void validate() const {
    if (!(x_lo < x_hi) || !(y_lo < y_hi)) throw DomainError("Region: empty rectangle");
  }
  double area() const { return (x_hi - x_lo) * (y_hi - y_lo); }
};

// Roots with |Im z| below this are real zeros and are not binned.
inline constexpr double real_root_threshold = 1e-9;

struct Histogram {
  Region region;
  int nx = 1, ny = 1;
  std::vector<std::uint64_t> counts;  // row-major in y, i.e. counts[iy * nx + ix]
  std::uint64_t trials = 0;
  std::uint64_t flagged = 0;       // trials whose roots failed certification
  std::uint64_t real_roots = 0;    // over converged trials
  std::uint64_t total_roots = 0;   // over converged trials, before clipping
  int degree = 0;
  Field field = Field::Real;
  std::uint64_t seed = 0;

  Histogram() = default;
  Histogram(Region r, int nx_, int ny_) : region(r), nx(nx_), ny(ny_) {
    r.validate();
    if (nx < 1 || ny < 1) throw DomainError("Histogram: need at least one bin per axis");
    counts.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0);
  }

  std::uint64_t count(int ix, int iy) const { return counts[static_cast<std::size_t>(iy * nx + ix)]; }
  double dx() const { return (region.x_hi - region.x_lo) / nx; }
  double dy() const { return (region.y_hi - region.y_lo) / ny; }
  double bin_area() const { return dx() * dy(); }
  Region bin(int ix, int iy) const {
    return {region.x_lo + ix * dx(), region.x_lo + (ix + 1) * dx(), region.y_lo + iy * dy(),
            region.y_lo + (iy + 1) * dy()};
  }
  std::uint64_t effective_trials() const { return trials - flagged; }
  double empirical_density(int ix, int iy) const {
    return static_cast<double>(count(ix, iy)) / (static_cast<double>(effective_trials()) * bin_area());
  }

  void add_root(cplx z) {
    if (std::abs(z.imag()) < real_root_threshold) {
      ++real_roots;
      return;
    }
    const double fx = (z.real() - region.x_lo) / dx();
    const double fy = (z.imag() - region.y_lo) / dy();
    if (fx < 0.0 || fy < 0.0 || fx >= nx || fy >= ny) return;
    ++counts[static_cast<std::size_t>(static_cast<int>(fy) * nx + static_cast<int>(fx))];
  }

  void merge(const Histogram& o) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    trials += o.trials;
    flagged += o.flagged;
    real_roots += o.real_roots;
    total_roots += o.total_roots;
  }
};

namespace detail {

inline CoefficientVector sample_nondegenerate(const EnsembleSpec& spec, std::uint64_t trial) {
  auto coeffs = sample_coefficients(spec, 1, trial);
  for (std::uint64_t attempt = 1; coeffs.values.back() == 0.0; ++attempt) {
    EnsembleSpec alt = spec;
    alt.seed = spec.seed ^ (0x9e3779b97f4a7c15ull * attempt);
    coeffs = sample_coefficients(alt, 1, trial);
    coeffs.spec = spec;
  }
  return coeffs;
}

}  // namespace detail

/// Bins the complex roots of `trials` sampled univariate polynomials.
/// Per-thread integer histograms are summed, so the result does not depend on scheduling.
inline Histogram empirical_density(const EnsembleSpec& spec, const Region& region, int nx, int ny,
                                   std::uint64_t trials, unsigned threads = 0) {
  spec.validate();
  if (spec.m != 1) throw DomainError("empirical_density: only m = 1 is supported");
  if (trials < 1) throw DomainError("empirical_density: trials must be >= 1");
  Histogram total(region, nx, ny);
  total.degree = spec.N;
  total.field = spec.field;
  total.seed = spec.seed;

  if (threads == 0) threads = worker_count();
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
  std::vector<Histogram> partial(threads, total);
  auto work = [&](unsigned id) {
    Histogram& h = partial[id];
    const std::uint64_t lo = trials * id / threads, hi = trials * (id + 1) / threads;
    for (std::uint64_t trial = lo; trial < hi; ++trial) {
      const auto roots = find_roots(detail::sample_nondegenerate(spec, trial));
      ++h.trials;
      if (!roots.converged) {
        ++h.flagged;
        continue;
      }
      h.total_roots += roots.roots.size();
      for (const auto& z : roots.roots) h.add_root(z);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned id = 1; id < threads; ++id) pool.emplace_back(work, id);
  work(0);
  for (auto& t : pool) t.join();

  for (const auto& h : partial) total.merge(h);
  return total;
}

// Comparison against an analytic density ---------------------------------------

using DensityFunction = std::function<double(cplx)>;

struct BinComparison {
  int ix = 0, iy = 0;
  std::uint64_t count = 0;
  double expected = 0.0;           // expected count
  double predicted_density = 0.0;  // bin-averaged analytic density
  double empirical_density = 0.0;
  double zscore = 0.0;
};

struct ComparisonReport {
  std::vector<BinComparison> bins;
  double max_abs_z = 0.0;
  double fraction_within_3sigma = 0.0;
  double chi_square = 0.0;
  int dof = 0;
  std::uint64_t trials = 0;
  std::uint64_t flagged = 0;

  double flagged_rate() const {
    return trials ? static_cast<double>(flagged) / static_cast<double>(trials) : 0.0;
  }
};

/// Normal score of the mid-p Poisson CDF: exact in the tails, ~ (k - mu)/sqrt(mu) for large mu.
inline double poisson_zscore(std::uint64_t k, double mu) {
  constexpr double cap = 40.0;
  if (mu <= 0.0) return k == 0 ? 0.0 : cap;
  const boost::math::poisson_distribution<double> d(mu);
  const boost::math::normal_distribution<double> unit;
  const double kd = static_cast<double>(k);
  const double half_mass = 0.5 * boost::math::pdf(d, kd);
  if (kd < mu) {
    const double lower = (k == 0 ? 0.0 : boost::math::cdf(d, kd - 1.0)) + half_mass;
    if (lower <= 0.0) return -cap;
    return std::max(-cap, boost::math::quantile(unit, lower));
  }
  const double upper = boost::math::cdf(boost::math::complement(d, kd)) + half_mass;
  if (upper <= 0.0) return cap;
  return std::min(cap, boost::math::quantile(boost::math::complement(unit, upper)));
}

/// Mean of `density` over a rectangle by 8x8 Gauss-Legendre.
inline double bin_average(const DensityFunction& density, const Region& r) {
  using boost::math::quadrature::gauss;
  const double cx = 0.5 * (r.x_lo + r.x_hi), hx = 0.5 * (r.x_hi - r.x_lo);
  const double cy = 0.5 * (r.y_lo + r.y_hi), hy = 0.5 * (r.y_hi - r.y_lo);
  const double v = gauss<double, 8>::integrate(
      [&](double v) {
        return gauss<double, 8>::integrate(
            [&](double u) { return density(cplx{cx + hx * u, cy + hy * v}); }, -1.0, 1.0);
      },
      -1.0, 1.0);
  return 0.25 * v;
}

inline ComparisonReport compare(const Histogram& hist, const DensityFunction& density) {
  if (hist.trials == 0 || hist.effective_trials() == 0)
    throw DomainError("compare: histogram has no trials");
  ComparisonReport rep;
  rep.trials = hist.trials;
  rep.flagged = hist.flagged;
  const double trials = static_cast<double>(hist.effective_trials());
  int within = 0;
  for (int iy = 0; iy < hist.ny; ++iy) {
    for (int ix = 0; ix < hist.nx; ++ix) {
      BinComparison b;
      b.ix = ix;
      b.iy = iy;
      b.count = hist.count(ix, iy);
      b.predicted_density = bin_average(density, hist.bin(ix, iy));
      b.expected = trials * hist.bin_area() * b.predicted_density;
      b.empirical_density = hist.empirical_density(ix, iy);
      b.zscore = poisson_zscore(b.count, b.expected);
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(b.zscore));
      if (std::abs(b.zscore) <= 3.0) ++within;
      if (b.expected > 0.0) {
        const double d = static_cast<double>(b.count) - b.expected;
        rep.chi_square += d * d / b.expected;
      }
      rep.bins.push_back(b);
    }
  }
  rep.dof = static_cast<int>(rep.bins.size());
  rep.fraction_within_3sigma = static_cast<double>(within) / static_cast<double>(rep.bins.size());
  return rep;
}

// Weak limit --------------------------------------------------------------------

// Product bump A beta((x-cx)/ax) beta((y-cy)/ay), beta(u) = exp(-1/(1-u^2)).
// Supported on [cx-ax, cx+ax] x [cy-ay, cy+ay] and flat to all orders at the boundary.
struct TestFunction {
  double cx = 0.0, cy = 0.0;
  double ax = 1.0, ay = 0.5;
  double amplitude = 1.0;

  Region support() const { return {cx - ax, cx + ax, cy - ay, cy + ay}; }

  static double bump(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
  }
  static double bump_d2(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    const double e = 1.0 - u * u;
    const double g1 = -2.0 * u / (e * e);
    const double g2 = -(2.0 + 6.0 * u * u) / (e * e * e);
    return bump(u) * (g1 * g1 + g2);
  }

  double value(double x, double y) const {
    return amplitude * bump((x - cx) / ax) * bump((y - cy) / ay);
  }
  double laplacian(double x, double y) const {
    const double u = (x - cx) / ax, v = (y - cy) / ay;
    return amplitude * (bump_d2(u) * bump(v) / (ax * ax) + bump(u) * bump_d2(v) / (ay * ay));
  }
};

struct WeakLimitResult {
  int N = 0;
  double pairing = 0.0;       // (1/N) (E~_N dx^dy, phi)
  double bound = 0.0;         // (log 3)/(2 pi N) ||laplacian phi||_1
  double laplacian_l1 = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

// Integral over a rectangle by nested adaptive Gauss-Kronrod, splitting at y = 0.
template <class F>
double integrate_rect(const F& f, const Region& r, double tol, double& error) {
  using boost::math::quadrature::gauss_kronrod;
  double inner_error = 0.0;
  auto line = [&](double y) {
    double e = 0.0;
    const double v = gauss_kronrod<double, 15>::integrate(
        [&](double x) { return f(x, y); }, r.x_lo, r.x_hi, 12, tol, &e);
    inner_error = std::max(inner_error, e);
    return v;
  };
  std::vector<double> cuts{r.y_lo};
  if (r.y_lo < 0.0 && r.y_hi > 0.0) cuts.push_back(0.0);
  cuts.push_back(r.y_hi);
  double total = 0.0;
  error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double e = 0.0;
    total += gauss_kronrod<double, 15>::integrate(line, cuts[i], cuts[i + 1], 12, tol, &e);
    error += e;
  }
  error += inner_error * (r.y_hi - r.y_lo);
  return total;
}

}  // namespace detail

/// (1/N) (E~_N, phi) with the derivatives moved onto phi:
/// (1/N) int_K (1/2pi) [ (1/2) log(1 + 2 r t) ] laplacian(phi) dx dy.
/// The integrand is bounded on all of K, including R.
inline WeakLimitResult weak_limit_pairing(const EnsembleSpec& spec, const TestFunction& phi,
                                          double abs_tol = 1e-9) {
  spec.validate();
  if (spec.m != 1) throw DomainError("weak_limit_pairing: only m = 1 is supported");
  const Region K = phi.support();
  K.validate();
  constexpr double half_log2 = 0.5 * std::numbers::ln2;

  WeakLimitResult res;
  res.N = spec.N;
  double err_l1 = 0.0, err = 0.0;
  res.laplacian_l1 = detail::integrate_rect(
      [&](double x, double y) { return std::abs(phi.laplacian(x, y)); }, K, 1e-10, err_l1);

  // laplacian(phi) integrates to zero over K, so subtracting the off-axis limit
  // (1/2) log 2 leaves the pairing unchanged and removes cancellation.
  const double integral = detail::integrate_rect(
      [&](double x, double y) {
        const double lap = phi.laplacian(x, y);
        if (lap == 0.0) return 0.0;
        const auto k = kernel_state(ComplexPoint{cplx{x, y}}, spec);
        return (gaussian_log_integral(k.r, k.s, k.t) - half_log2) * lap / (2.0 * pi);
      },
      K, 1e-10, err);
  res.pairing = integral / spec.N;
  res.error_estimate = err / spec.N;
  res.bound = std::log(3.0) / (2.0 * pi * spec.N) * res.laplacian_l1;
  if (!(res.error_estimate <= abs_tol) || !std::isfinite(res.pairing))
    throw QuadratureError("weak_limit_pairing: tolerance not met", res.error_estimate);
  return res;
}

}  // namespace randpoly
