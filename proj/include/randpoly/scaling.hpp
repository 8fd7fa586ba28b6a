#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "randpoly/core.hpp"
#include "randpoly/kernel.hpp"

namespace randpoly {

// Imaginary part of a point in the 1/sqrt(N) neighbourhood of R^m.
struct ScaledPoint {
  std::vector<double> y;

  double norm() const {
    double s = 0.0;
    for (double v : y) s += v * v;
    return std::sqrt(s);
  }
  int dim() const { return static_cast<int>(y.size()); }
};

// Radial profile b(rho) = (1/2) log(1 + sqrt(1 - exp(-4 rho^2))) and its first
// two derivatives. b = rho - rho^2 + rho^3/3 + O(rho^4) near 0.
struct RadialProfile {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

inline RadialProfile radial_profile(double rho) {
  if (!(rho > 0.0)) throw ExcludedDomainError("radial_profile: rho must be positive");
  const double u = std::exp(-4.0 * rho * rho);
  const double s = std::sqrt(-std::expm1(-4.0 * rho * rho));
  RadialProfile p;
  p.value = 0.5 * std::log1p(s);
  p.d1 = 2.0 * rho * u / (s * (1.0 + s));
  p.d2 = 2.0 * u * (1.0 / (s * (1.0 + s)) - 4.0 * rho * rho / (s * s * s));
  return p;
}

/// Scaling limit of the m = 1 error term: (1/4pi) d^2/dy^2 log(1 + sqrt(1 - e^{-4y^2})).
inline double scaled_error_m1(double y) {
  if (y == 0.0) throw ExcludedDomainError("scaled_error_m1: y = 0 lies on the real axis");
  return radial_profile(std::abs(y)).d2 / (2.0 * pi);
}

enum class RealAxis { Reject, Limit };

/// K(y) = (1/pi) (1 - (4y^2+1) e^{-4y^2}) / (1 - e^{-4y^2})^{3/2}.
inline double prosen_density(double y, RealAxis at_axis = RealAxis::Reject) {
  if (y == 0.0) {
    if (at_axis == RealAxis::Limit) return 0.0;
    throw ExcludedDomainError("prosen_density: y = 0 lies on the real axis");
  }
  const double u = 4.0 * y * y;
  double numerator;
  if (u < 0.1) {
    // sum_{n>=2} (-1)^n (n-1) u^n / n!
    numerator = 0.0;
    double term = u;  // u^n / n! at n = 1
    for (int n = 2; n < 30; ++n) {
      term *= u / n;
      const double add = (n % 2 ? -1.0 : 1.0) * (n - 1) * term;
      numerator += add;
      if (std::abs(add) < 1e-18 * std::abs(numerator)) break;
    }
  } else {
    numerator = 1.0 - (u + 1.0) * std::exp(-u);
  }
  return numerator / (pi * std::pow(-std::expm1(-u), 1.5));
}

/// Scaled density lim N^{-m} density_real(z / sqrt(N)); depends only on y = Im z.
inline double scaled_density(std::span<const double> y, int m) {
  if (m < 1 || m > max_variables) throw DomainError("scaled_density: m must be in [1, 4]");
  if (static_cast<int>(y.size()) != m) throw DomainError("scaled_density: dimension mismatch");
  double rho2 = 0.0;
  for (double v : y) rho2 += v * v;
  const double rho = std::sqrt(rho2);
  if (rho == 0.0) throw ExcludedDomainError("scaled_density: y = 0 lies on R^m");

  // LogNorm: Hessian of ||z||^2 / 2. LogError: (1/4) d^2/dy_j dy_k of b(||y||).
  const auto b = radial_profile(rho);
  HermitianForm lognorm(m, Potential::LogNorm);
  HermitianForm logerror(m, Potential::LogError);
  for (int j = 0; j < m; ++j) {
    lognorm(j, j) = 0.5;
    for (int k = 0; k < m; ++k) {
      const double yy = y[j] * y[k] / rho2;
      const double radial = b.d1 / rho * ((j == k ? 1.0 : 0.0) - yy) + b.d2 * yy;
      logerror(j, k) = 0.25 * radial;
    }
  }
  std::vector<HermitianForm> forms(static_cast<std::size_t>(m));
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    const WedgeTerm term{m, mask};
    for (int l = 0; l < m; ++l) forms[l] = term.lognorm(l) ? lognorm : logerror;
    total += mixed_determinant(forms).real();
  }
  return wedge_prefactor(m) * total;
}

inline double scaled_density(const ScaledPoint& p) { return scaled_density(p.y, p.dim()); }

/// Scaled density at y = (rho, 0, ..., 0).
inline double scaled_density_radial(double rho, int m) {
  std::vector<double> y(static_cast<std::size_t>(m), 0.0);
  y[0] = rho;
  return scaled_density(y, m);
}

/// Least-squares log-log exponent of the scaled density on [from, to].
inline double near_zero_exponent(int m, double from = 1e-3, double to = 1e-2, int points = 21) {
  const auto rho = grid_values(from, to, points, Spacing::Log);
  std::vector<double> k;
  for (double r : rho) k.push_back(scaled_density_radial(r, m));
  return log_log_slope(rho, k);
}

}  // namespace randpoly
