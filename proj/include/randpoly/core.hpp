#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace randpoly {

using cplx = std::complex<double>;

// Errors -------------------------------------------------------------------

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Raised for points inside the singular band around R^m.
struct ExcludedDomainError : DomainError {
  using DomainError::DomainError;
};

struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

inline constexpr double pi = 3.14159265358979323846;

// Supported number of variables.
inline constexpr int max_variables = 4;

// Multi-indices -------------------------------------------------------------

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    for (int j : entries_) {
      if (j < 0) throw DomainError("multi-index entries must be non-negative");
    }
  }
  MultiIndex(std::initializer_list<int> entries)
      : MultiIndex(std::vector<int>(entries)) {}

  int order() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }
  std::size_t size() const { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  std::span<const int> entries() const { return entries_; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> entries_;
};

namespace detail {

// C(n, k) with overflow detection; nullopt when the result does not fit in 63 bits.
inline std::optional<std::uint64_t> binomial_u63(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    c = c * (n - i) / (i + 1);
    if (c >> 63) return std::nullopt;
  }
  return static_cast<std::uint64_t>(c);
}

}  // namespace detail

/// log of N! / ((N-|J|)! j_1! ... j_m!).
inline double log_multinomial(int N, const MultiIndex& J) {
  const int order = J.order();
  if (order > N) throw DomainError("multinomial: |J| exceeds N");
  double v = std::lgamma(N + 1.0) - std::lgamma(N - order + 1.0);
  for (int j : J.entries()) v -= std::lgamma(j + 1.0);
  return v;
}

/// Exact multinomial coefficient, or nullopt if it does not fit below 2^63.
inline std::optional<std::uint64_t> multinomial_exact(int N, const MultiIndex& J) {
  if (J.order() > N) throw DomainError("multinomial: |J| exceeds N");
  // Product of binomials C(N, j1) C(N-j1, j2) ...
  unsigned __int128 acc = 1;
  std::uint64_t remaining = static_cast<std::uint64_t>(N);
  for (int j : J.entries()) {
    auto b = detail::binomial_u63(remaining, static_cast<std::uint64_t>(j));
    if (!b) return std::nullopt;
    acc *= *b;
    if (acc >> 63) return std::nullopt;
    remaining -= static_cast<std::uint64_t>(j);
  }
  return static_cast<std::uint64_t>(acc);
}

/// Multinomial coefficient as a double: exact below 2^63, log-gamma above.
inline double multinomial(int N, const MultiIndex& J) {
  if (auto exact = multinomial_exact(N, J)) return static_cast<double>(*exact);
  return std::exp(log_multinomial(N, J));
}

/// C(N+m, m); throws if it overflows 63 bits.
inline std::uint64_t index_count(int m, int N) {
  auto c = detail::binomial_u63(static_cast<std::uint64_t>(N + m),
                                static_cast<std::uint64_t>(m));
  if (!c) throw DomainError("coefficient count overflows");
  return *c;
}

namespace detail {

inline void fill_degree(int remaining, std::vector<int>& prefix, std::size_t m,
                        std::vector<MultiIndex>& out) {
  if (prefix.size() + 1 == m) {
    prefix.push_back(remaining);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int j = remaining; j >= 0; --j) {
    prefix.push_back(j);
    fill_degree(remaining - j, prefix, m, out);
    prefix.pop_back();
  }
}

}  // namespace detail

/// All J with |J| <= N, graded by order; within an order the first entry
/// decreases fastest, e.g. (2,0),(1,1),(0,2).
inline std::vector<MultiIndex> enumerate_indices(int m, int N) {
  if (m < 1) throw DomainError("enumerate_indices: m must be >= 1");
  if (N < 0) throw DomainError("enumerate_indices: N must be >= 0");
  std::vector<MultiIndex> out;
  out.reserve(index_count(m, N));
  std::vector<int> prefix;
  for (int d = 0; d <= N; ++d) detail::fill_degree(d, prefix, static_cast<std::size_t>(m), out);
  return out;
}

// Points in C^m --------------------------------------------------------------

class ComplexPoint {
 public:
  ComplexPoint() = default;
  explicit ComplexPoint(std::vector<cplx> components) : z_(std::move(components)) {
    for (const auto& c : z_) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw DomainError("ComplexPoint: non-finite component");
    }
  }
  ComplexPoint(std::initializer_list<cplx> components)
      : ComplexPoint(std::vector<cplx>(components)) {}

  static ComplexPoint from_parts(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("ComplexPoint: part size mismatch");
    std::vector<cplx> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = {x[i], y[i]};
    return ComplexPoint(std::move(z));
  }

  int dim() const { return static_cast<int>(z_.size()); }
  const cplx& operator[](std::size_t i) const { return z_[i]; }
  std::span<const cplx> components() const { return z_; }

  std::vector<double> x() const {
    std::vector<double> v(z_.size());
    for (std::size_t i = 0; i < z_.size(); ++i) v[i] = z_[i].real();
    return v;
  }
  std::vector<double> y() const {
    std::vector<double> v(z_.size());
    for (std::size_t i = 0; i < z_.size(); ++i) v[i] = z_[i].imag();
    return v;
  }

  /// z.z = sum z_q^2 (no conjugation).
  cplx dot_self() const {
    cplx s = 0.0;
    for (const auto& c : z_) s += c * c;
    return s;
  }
  /// ||z||^2
  double norm_sq() const {
    double s = 0.0;
    for (const auto& c : z_) s += std::norm(c);
    return s;
  }
  double imag_norm() const {
    double s = 0.0;
    for (const auto& c : z_) s += c.imag() * c.imag();
    return std::sqrt(s);
  }
  bool is_real() const {
    for (const auto& c : z_) {
      if (c.imag() != 0.0) return false;
    }
    return true;
  }

 private:
  std::vector<cplx> z_;
};

// Grids ---------------------------------------------------------------------

enum class Part { Real, Imag };
enum class Spacing { Linear, Log };

struct GridSpec {
  ComplexPoint base;           // fixed values of the other coordinates
  int axis = 0;                // coordinate that varies
  Part part = Part::Imag;
  double from = 0.0;
  double to = 1.0;
  int points = 2;
  Spacing spacing = Spacing::Linear;

  void validate() const {
    if (axis < 0 || axis >= base.dim()) throw DomainError("GridSpec: axis out of range");
    if (!(from < to)) throw DomainError("GridSpec: need from < to");
    if (points < 2) throw DomainError("GridSpec: need at least 2 points");
    if (spacing == Spacing::Log && from <= 0.0)
      throw DomainError("GridSpec: log spacing needs from > 0");
  }
};

/// Evenly spaced parameter values, endpoints included.
inline std::vector<double> grid_values(double from, double to, int points,
                                       Spacing spacing = Spacing::Linear) {
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    const double f = static_cast<double>(k) / (points - 1);
    v[k] = spacing == Spacing::Linear
               ? from + f * (to - from)
               : std::exp(std::log(from) + f * (std::log(to) - std::log(from)));
  }
  v.front() = from;
  v.back() = to;
  return v;
}

inline std::vector<ComplexPoint> grid_points(const GridSpec& g) {
  g.validate();
  std::vector<ComplexPoint> out;
  out.reserve(static_cast<std::size_t>(g.points));
  for (double v : grid_values(g.from, g.to, g.points, g.spacing)) {
    std::vector<cplx> z(g.base.components().begin(), g.base.components().end());
    auto& c = z[static_cast<std::size_t>(g.axis)];
    c = g.part == Part::Real ? cplx{v, c.imag()} : cplx{c.real(), v};
    out.emplace_back(std::move(z));
  }
  return out;
}

/// z = (i y, 0, ..., 0)
inline ComplexPoint imaginary_axis_point(int m, double y) {
  std::vector<cplx> z(static_cast<std::size_t>(m), 0.0);
  z[0] = {0.0, y};
  return ComplexPoint(std::move(z));
}

// Least-squares fits -----------------------------------------------------------

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

inline LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw DomainError("fit_line: need >= 2 paired samples");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i)
    f.max_residual = std::max(f.max_residual, std::abs(ys[i] - (f.intercept + f.slope * xs[i])));
  return f;
}

/// Slope of log|y| against log x.
inline double log_log_slope(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(std::abs(ys[i])));
  }
  return fit_line(lx, ly).slope;
}

}  // namespace randpoly
