#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "randpoly/core.hpp"

namespace randpoly {

enum class Field { Real, Complex };

inline std::string_view to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

inline Field parse_field(std::string_view s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw DomainError("unknown coefficient field '" + std::string(s) + "'");
}

// m equations of degree N in m variables with i.i.d. Gaussian coefficients.
struct EnsembleSpec {
  int m = 1;
  int N = 1;
  Field field = Field::Real;
  std::uint64_t seed = 0;

  void validate() const {
    if (m < 1 || m > max_variables) throw DomainError("EnsembleSpec: m must be in [1, 4]");
    if (N < 1) throw DomainError("EnsembleSpec: N must be >= 1");
  }
  /// D_N = C(N+m, m)
  std::uint64_t dimension() const { return index_count(m, N); }
};

struct CoefficientVector {
  std::vector<cplx> values;  // graded-lex layout, unit variance
  EnsembleSpec spec;
  int q = 1;
  std::uint64_t trial = 0;
};

/// Generator for the (seed, q, trial) substream. Streams are derived, never shared,
/// so any trial can be regenerated independently of the others.
inline std::mt19937_64 substream(std::uint64_t seed, int q, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(q), static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32), 0x52504f4cu};
  return std::mt19937_64(seq);
}

/// Standard Gaussian coefficients for equation q (1-based) of the given trial.
/// Complex entries have Re, Im each of variance 1/2.
inline CoefficientVector sample_coefficients(const EnsembleSpec& spec, int q, std::uint64_t trial) {
  spec.validate();
  if (q < 1 || q > spec.m) throw DomainError("sample_coefficients: q out of range");
  auto gen = substream(spec.seed, q, trial);
  const auto n = spec.dimension();
  CoefficientVector c{std::vector<cplx>(n), spec, q, trial};
  if (spec.field == Field::Real) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& v : c.values) v = {g(gen), 0.0};
  } else {
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    for (auto& v : c.values) {
      const double re = g(gen);
      v = {re, g(gen)};
    }
  }
  return c;
}

// F_N(z) = (sqrt(N choose J) z^J)_J. When N log(1+||z||^2) is large the entries
// are stored divided by exp(log_scale) so nothing overflows.
struct BasisEvaluation {
  std::vector<cplx> F;
  double log_scale = 0.0;
  double scaled_norm_sq = 0.0;      // direct sum of |F_J|^2 e^{-2 log_scale}
  double log_norm_sq_closed = 0.0;  // N log(1+||z||^2)
  std::vector<cplx> u;              // F / ||F||

  double log_norm_sq() const { return std::log(scaled_norm_sq) + 2.0 * log_scale; }
  /// ||F||^2, +inf if not representable.
  double norm_sq() const { return std::exp(log_norm_sq()); }
};

inline constexpr double log_scaling_threshold = 600.0;

inline BasisEvaluation basis_vector(const ComplexPoint& z, const EnsembleSpec& spec) {
  spec.validate();
  if (z.dim() != spec.m) throw DomainError("basis_vector: dimension mismatch");
  BasisEvaluation b;
  b.log_norm_sq_closed = spec.N * std::log1p(z.norm_sq());
  const bool scaled = b.log_norm_sq_closed > log_scaling_threshold;
  b.log_scale = scaled ? 0.5 * b.log_norm_sq_closed : 0.0;

  const auto indices = enumerate_indices(spec.m, spec.N);
  b.F.reserve(indices.size());
  for (const auto& J : indices) {
    if (!scaled) {
      cplx v = std::sqrt(multinomial(spec.N, J));
      for (std::size_t q = 0; q < J.size(); ++q) {
        for (int k = 0; k < J[q]; ++k) v *= z[q];
      }
      b.F.push_back(v);
      continue;
    }
    double log_mag = 0.5 * log_multinomial(spec.N, J) - b.log_scale;
    double phase = 0.0;
    bool zero = false;
    for (std::size_t q = 0; q < J.size(); ++q) {
      if (J[q] == 0) continue;
      if (z[q] == 0.0) {
        zero = true;
        break;
      }
      log_mag += J[q] * std::log(std::abs(z[q]));
      phase += J[q] * std::arg(z[q]);
    }
    b.F.push_back(zero ? cplx{0.0} : std::polar(std::exp(log_mag), phase));
  }
  for (const auto& v : b.F) b.scaled_norm_sq += std::norm(v);
  const double norm = std::sqrt(b.scaled_norm_sq);
  b.u.reserve(b.F.size());
  for (const auto& v : b.F) b.u.push_back(v / norm);
  return b;
}

/// Weighted coefficients c_k = a_k sqrt(N choose k), ascending degree (m = 1).
inline std::vector<cplx> weighted_coefficients(const CoefficientVector& coeffs) {
  if (coeffs.spec.m != 1) throw DomainError("weighted_coefficients: univariate only");
  const int N = coeffs.spec.N;
  std::vector<cplx> c(coeffs.values.size());
  for (int k = 0; k <= N; ++k) c[k] = coeffs.values[k] * std::sqrt(multinomial(N, MultiIndex{k}));
  return c;
}

/// f(z) = a . F_N(z), without conjugation.
inline cplx evaluate_poly(const CoefficientVector& coeffs, const ComplexPoint& z) {
  if (z.dim() != coeffs.spec.m) throw DomainError("evaluate_poly: dimension mismatch");
  if (coeffs.spec.m == 1) {
    const auto c = weighted_coefficients(coeffs);
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z[0] + *it;
    return acc;
  }
  const auto b = basis_vector(z, coeffs.spec);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < b.F.size(); ++i) acc += coeffs.values[i] * b.F[i];
  return acc * std::exp(b.log_scale);
}

}  // namespace randpoly
