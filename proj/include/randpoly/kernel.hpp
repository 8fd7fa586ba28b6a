#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "randpoly/core.hpp"
#include "randpoly/ensembles.hpp"

namespace randpoly {

// Width of the excluded band around R^m.
inline constexpr double y_min = 1e-3;

// Geometry of the unit basis vector u_N(z) after the two real rotations:
// u ~ (r + i s, i t, 0, ..., 0). Q = ((1 + z.z) / (1 + ||z||^2))^N.
struct KernelState {
  double log_abs_Q = 0.0;  // N log|ratio|, -inf when Q = 0
  double arg_Q = 0.0;
  double r = 1.0;
  double s = 0.0;
  double t = 0.0;
  double lambda = 0.0;  // -log|ratio|, +inf when Q = 0
};

/// log |(1 + z.z) / (1 + ||z||^2)|, computed without cancellation near R^m.
/// Uses (1+n)^2 - |1+z.z|^2 = 4(||y||^2 (1+||x||^2) - (x.y)^2).
inline double log_abs_ratio(const ComplexPoint& z) {
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (const auto& c : z.components()) {
    xx += c.real() * c.real();
    yy += c.imag() * c.imag();
    xy += c.real() * c.imag();
  }
  const double denom = 1.0 + xx + yy;
  const double delta = std::clamp(4.0 * (yy * (1.0 + xx) - xy * xy) / (denom * denom), 0.0, 1.0);
  return 0.5 * std::log1p(-delta);
}

inline KernelState kernel_state(const ComplexPoint& z, const EnsembleSpec& spec) {
  spec.validate();
  if (z.dim() != spec.m) throw DomainError("kernel_state: dimension mismatch");
  KernelState k;
  if (z.is_real()) return k;

  const double lar = log_abs_ratio(z);
  k.lambda = -lar;
  k.log_abs_Q = spec.N * lar;
  k.arg_Q = std::remainder(spec.N * std::arg(1.0 + z.dot_self()), 2.0 * pi);

  const double abs_q = std::exp(k.log_abs_Q);
  const double re_q = abs_q * std::cos(k.arg_Q);
  const double im_q = abs_q * std::sin(k.arg_Q);
  k.r = std::sqrt(0.5 * (1.0 + re_q));
  k.s = k.r > 0.0 ? 0.5 * im_q / k.r : 0.0;
  const double t_sq_direct = 1.0 - k.r * k.r - k.s * k.s;
  if (t_sq_direct < -1e-10) throw ConsistencyError("kernel_state: negative t^2");
  // 4 r^2 t^2 = 1 - |Q|^2 holds exactly and avoids the cancellation above.
  k.t = k.r > 0.0 ? std::sqrt(-std::expm1(2.0 * k.log_abs_Q)) / (2.0 * k.r)
                  : std::sqrt(std::max(0.0, t_sq_direct));
  if (std::abs(k.r * k.r + k.s * k.s + k.t * k.t - 1.0) > 1e-10)
    throw ConsistencyError("kernel_state: r^2 + s^2 + t^2 != 1");
  return k;
}

/// Expected zero density for complex Gaussian coefficients.
inline double density_cx(const ComplexPoint& z, const EnsembleSpec& spec) {
  spec.validate();
  if (z.dim() != spec.m) throw DomainError("density_cx: dimension mismatch");
  const int m = spec.m;
  return m * std::pow(spec.N / pi, m) * std::pow(1.0 + z.norm_sq(), -(m + 1));
}

/// E log|a0 (r + i s) + a1 (i t)| over standard real Gaussians, up to the
/// additive constant E log|a0| (which the Hessians never see).
inline double gaussian_log_integral(double r, double s, double t) {
  if (std::abs(r * r + s * s + t * t - 1.0) > 1e-8)
    throw DomainError("gaussian_log_integral: r^2 + s^2 + t^2 must equal 1");
  if (r < 0.0 || t < 0.0) throw DomainError("gaussian_log_integral: r, t must be non-negative");
  return 0.5 * std::log1p(2.0 * r * t);
}

// Hermitian forms -------------------------------------------------------------

enum class Potential { LogNorm, LogError };

// H_jk = d^2 phi / dz_j dzbar_k
struct HermitianForm {
  int dim = 0;
  std::vector<cplx> entries;  // row-major
  Potential potential = Potential::LogNorm;

  HermitianForm() = default;
  HermitianForm(int m, Potential p)
      : dim(m), entries(static_cast<std::size_t>(m * m), 0.0), potential(p) {}

  cplx& operator()(int j, int k) { return entries[static_cast<std::size_t>(j * dim + k)]; }
  const cplx& operator()(int j, int k) const {
    return entries[static_cast<std::size_t>(j * dim + k)];
  }

  /// max |H_jk - conj(H_kj)|
  double hermitian_defect() const {
    double d = 0.0;
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) d = std::max(d, std::abs((*this)(j, k) - std::conj((*this)(k, j))));
    return d;
  }
};

/// Hessian of (N/2) log(1 + ||z||^2), i.e. of log ||F_N(z)||.
inline HermitianForm hessian_A(const ComplexPoint& z, const EnsembleSpec& spec) {
  spec.validate();
  if (z.dim() != spec.m) throw DomainError("hessian_A: dimension mismatch");
  const int m = spec.m;
  const double p = 1.0 + z.norm_sq();
  const double half_n = 0.5 * spec.N;
  HermitianForm h(m, Potential::LogNorm);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      h(j, k) = half_n * ((j == k ? 1.0 / p : 0.0) - std::conj(z[j]) * z[k] / (p * p));
  return h;
}

namespace detail {

// Shifted LogError potential from real coordinates, in any floating type.
template <class T>
T log_error_potential(std::span<const T> x, std::span<const T> y, int N) {
  T xx = 0, yy = 0, xy = 0;
  for (std::size_t q = 0; q < x.size(); ++q) {
    xx += x[q] * x[q];
    yy += y[q] * y[q];
    xy += x[q] * y[q];
  }
  const T denom = 1 + xx + yy;
  const T delta = std::clamp<T>(4 * (yy * (1 + xx) - xy * xy) / (denom * denom), 0, 1);
  const T log_w = N * std::log1p(-delta);  // log |Q|^2
  const T w = std::exp(log_w);
  const T s = std::sqrt(-std::expm1(log_w));
  return std::log1p(-w / (2 * (1 + s))) / 2;
}

}  // namespace detail

/// (1/2) log((1 + sqrt(1 - |Q|^2)) / 2): the LogError potential shifted by the
/// constant (1/2) log 2 so that it tends to zero away from R^m.
inline double log_error_potential(const ComplexPoint& z, int N) {
  const auto x = z.x(), y = z.y();
  return detail::log_error_potential<double>(x, y, N);
}

namespace detail {

inline void require_off_real(const ComplexPoint& z, const char* who) {
  if (z.imag_norm() < y_min)
    throw ExcludedDomainError(std::string(who) + ": point too close to the real subspace");
}

// Real Hessian of f over (x_1..x_m, y_1..y_m) by fourth-order central differences.
template <class T, class F>
std::vector<T> real_hessian_fd(const F& f, std::span<const T> v0, T h) {
  static constexpr int offset[4] = {-2, -1, 1, 2};
  static constexpr double first[4] = {1.0 / 12, -2.0 / 3, 2.0 / 3, -1.0 / 12};
  const std::size_t n = v0.size();
  std::vector<T> v(v0.begin(), v0.end());
  std::vector<T> S(n * n);
  const T f0 = f(v);
  auto at = [&](std::size_t a, T da, std::size_t b, T db) {
    v[a] += da;
    v[b] += db;
    const T r = f(v);
    v[a] = v0[a];
    v[b] = v0[b];
    return r;
  };
  for (std::size_t a = 0; a < n; ++a) {
    S[a * n + a] = (-at(a, 2 * h, a, 0) + 16 * at(a, h, a, 0) - 30 * f0 + 16 * at(a, -h, a, 0) -
                    at(a, -2 * h, a, 0)) /
                   (12 * h * h);
    for (std::size_t b = a + 1; b < n; ++b) {
      T d = 0;
      for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
          d += static_cast<T>(first[i] * first[k]) * at(a, offset[i] * h, b, offset[k] * h);
      S[a * n + b] = S[b * n + a] = d / (h * h);
    }
  }
  return S;
}

}  // namespace detail

/// Hessian of the LogError potential by fourth-order central differences on the
/// 2m real coordinates, step min(1e-4, ||y||/10), one Richardson level. Stencil
/// values are carried in extended precision.
inline HermitianForm hessian_B(const ComplexPoint& z, const EnsembleSpec& spec) {
  using wide = long double;
  spec.validate();
  if (z.dim() != spec.m) throw DomainError("hessian_B: dimension mismatch");
  detail::require_off_real(z, "hessian_B");
  const int m = spec.m;
  const wide h = std::min(1e-4, z.imag_norm() / 10.0);

  std::vector<wide> v0;
  for (double x : z.x()) v0.push_back(x);
  for (double y : z.y()) v0.push_back(y);
  auto f = [&](const std::vector<wide>& v) {
    const std::span<const wide> all(v);
    return detail::log_error_potential<wide>(all.first(m), all.subspan(m), spec.N);
  };
  const auto coarse = detail::real_hessian_fd<wide>(f, v0, h);
  const auto fine = detail::real_hessian_fd<wide>(f, v0, h / 2);
  const std::size_t n = v0.size();
  auto S = [&](int a, int b) {
    const std::size_t i = static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b);
    return static_cast<double>((16 * fine[i] - coarse[i]) / 15);
  };

  HermitianForm hb(m, Potential::LogError);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      hb(j, k) = 0.25 * cplx{S(j, k) + S(m + j, m + k), S(j, m + k) - S(m + j, k)};
  return hb;
}

// Wedge assembly --------------------------------------------------------------

struct SignedPermutation {
  std::array<int, max_variables> perm{};
  int sign = 1;
};

/// All permutations of {0..m-1} with their signs.
inline const std::vector<SignedPermutation>& signed_permutations(int m) {
  static const auto table = [] {
    std::array<std::vector<SignedPermutation>, max_variables + 1> t;
    for (int n = 1; n <= max_variables; ++n) {
      std::array<int, max_variables> p{};
      std::iota(p.begin(), p.begin() + n, 0);
      do {
        int inversions = 0;
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j) inversions += p[i] > p[j];
        t[n].push_back({p, inversions % 2 ? -1 : 1});
      } while (std::next_permutation(p.begin(), p.begin() + n));
    }
    return t;
  }();
  if (m < 1 || m > max_variables) throw DomainError("signed_permutations: m out of range");
  return table[static_cast<std::size_t>(m)];
}

/// sum over (sigma, tau) of sign(sigma) sign(tau) prod_l forms[l](sigma(l), tau(l)).
inline cplx mixed_determinant(std::span<const HermitianForm> forms) {
  const int m = static_cast<int>(forms.size());
  if (m < 1 || m > max_variables) throw DomainError("mixed_determinant: need 1..4 forms");
  for (const auto& f : forms)
    if (f.dim != m) throw DomainError("mixed_determinant: form dimension mismatch");
  const auto& perms = signed_permutations(m);
  cplx total = 0.0;
  for (const auto& sigma : perms) {
    for (const auto& tau : perms) {
      cplx prod = static_cast<double>(sigma.sign * tau.sign);
      for (int l = 0; l < m; ++l) prod *= forms[l](sigma.perm[l], tau.perm[l]);
      total += prod;
    }
  }
  return total;
}

/// Volume-form prefactor: makes m copies of hessian_A reproduce density_cx.
inline double wedge_prefactor(int m) {
  double fact = 1.0;
  for (int k = 2; k <= m; ++k) fact *= k;
  return m * std::pow(2.0 / pi, m) / fact;
}

// Subset L_q of equations carrying the LogNorm potential; bit l set <=> l in L_q.
struct WedgeTerm {
  int m = 1;
  unsigned mask = 0;

  bool lognorm(int l) const { return (mask >> l) & 1u; }
  bool all_lognorm() const { return mask + 1 == (1u << m); }
};

struct WedgeContribution {
  WedgeTerm term;
  double value = 0.0;
};

namespace detail {

inline double real_part_checked(cplx v, std::span<const HermitianForm> forms) {
  double scale = 1.0;
  for (const auto& f : forms)
    for (const auto& e : f.entries) scale = std::max(scale, std::abs(e));
  scale = std::pow(scale, static_cast<double>(forms.size()));
  if (std::abs(v.imag()) > 1e-8 * scale)
    throw ConsistencyError("mixed_determinant: imaginary residue on Hermitian forms");
  return v.real();
}

}  // namespace detail

/// All 2^m wedge terms at z, each scaled by the volume-form prefactor.
inline std::vector<WedgeContribution> wedge_contributions(const ComplexPoint& z,
                                                          const EnsembleSpec& spec) {
  detail::require_off_real(z, "wedge_contributions");
  const int m = spec.m;
  const auto a = hessian_A(z, spec);
  const auto b = hessian_B(z, spec);
  const double c = wedge_prefactor(m);
  std::vector<WedgeContribution> out;
  std::vector<HermitianForm> forms(static_cast<std::size_t>(m));
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    WedgeTerm term{m, mask};
    for (int l = 0; l < m; ++l) forms[l] = term.lognorm(l) ? a : b;
    out.push_back({term, c * detail::real_part_checked(mixed_determinant(forms), forms)});
  }
  return out;
}

/// Sum of all wedge terms with at least one LogError factor.
inline double error_term(const ComplexPoint& z, const EnsembleSpec& spec) {
  double e = 0.0;
  for (const auto& w : wedge_contributions(z, spec))
    if (!w.term.all_lognorm()) e += w.value;
  return e;
}

/// Expected zero density for real Gaussian coefficients: density_cx + error term.
inline double density_real(const ComplexPoint& z, const EnsembleSpec& spec) {
  const double v = density_cx(z, spec) + error_term(z, spec);
  if (v < -1e-8) throw ConsistencyError("density_real: negative density");
  return std::max(v, 0.0);
}

/// Error term for m = 1 from the closed-form chain rule:
/// (1/pi) d^2/dz dzbar log(1 + sqrt(1 - |Q|^2)).
inline double error_term_exact_m1(const ComplexPoint& z, const EnsembleSpec& spec) {
  spec.validate();
  if (spec.m != 1 || z.dim() != 1) throw DomainError("error_term_exact_m1: m must be 1");
  detail::require_off_real(z, "error_term_exact_m1");
  const int N = spec.N;
  const double log_w = 2.0 * N * log_abs_ratio(z);
  const double w = std::exp(log_w);
  if (w == 0.0) return 0.0;

  const cplx zz = z[0];
  const double p = 1.0 + std::norm(zz);
  // L = log|Q|^2; Lz = dL/dz, Lzzbar = d^2 L / dz dzbar
  const cplx Lz = static_cast<double>(N) * (2.0 * zz / (1.0 + zz * zz) - 2.0 * std::conj(zz) / p);
  const double Lzzbar = -2.0 * N / (p * p);
  const double s = std::sqrt(-std::expm1(log_w));
  const double g1 = -1.0 / (2.0 * s * (1.0 + s));
  const double g2 = -(1.0 + 2.0 * s) / (4.0 * s * s * s * (1.0 + s) * (1.0 + s));
  const double lz2 = std::norm(Lz);
  const double e = w * (g1 * (Lzzbar + lz2) + g2 * w * lz2) / pi;
  if (std::isfinite(e)) return e;
  return wedge_prefactor(1) * hessian_B(z, spec)(0, 0).real();
}

}  // namespace randpoly
