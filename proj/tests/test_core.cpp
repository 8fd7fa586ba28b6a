#include <gtest/gtest.h>

#include <random>

#include "randpoly/core.hpp"

using namespace randpoly;

// Direct factorial-ratio oracle for small arguments.
static double multinomial_oracle(int N, const std::vector<int>& J) {
  double v = std::tgamma(N + 1.0);
  int order = 0;
  for (int j : J) {
    v /= std::tgamma(j + 1.0);
    order += j;
  }
  return v / std::tgamma(N - order + 1.0);
}

TEST(Multinomial, SmallExamples) {
  EXPECT_EQ(multinomial_exact(2, {1, 1}).value(), 2u);
  EXPECT_EQ(multinomial_exact(4, {2, 1}).value(), 12u);
  EXPECT_EQ(multinomial_exact(7, {0, 0, 0}).value(), 1u);
  EXPECT_DOUBLE_EQ(multinomial(4, {2, 1}), 12.0);
}

TEST(Multinomial, RejectsOrderAboveDegree) {
  EXPECT_THROW(multinomial(3, {2, 2}), DomainError);
  EXPECT_THROW(log_multinomial(3, {4}), DomainError);
  EXPECT_THROW(MultiIndex({1, -1}), DomainError);
}

TEST(Multinomial, MatchesFactorialRatio) {
  for (int N = 0; N <= 30; ++N)
    for (int a = 0; a <= N; ++a)
      for (int b = 0; a + b <= N; b += 3)
        EXPECT_NEAR(multinomial(N, {a, b}) / multinomial_oracle(N, {a, b}), 1.0, 1e-12);
}

TEST(Multinomial, LogSpaceAboveExactRange) {
  // 200 choose (70,70) is far beyond 2^63; compare with lgamma sums in long double.
  const MultiIndex J{70, 70};
  EXPECT_FALSE(multinomial_exact(200, J).has_value());
  const long double ref = std::lgamma(201.0L) - 2 * std::lgamma(71.0L) - std::lgamma(61.0L);
  EXPECT_NEAR(log_multinomial(200, J) / static_cast<double>(ref), 1.0, 1e-12);
  // Exact near the boundary agrees with log-space.
  const auto exact = multinomial_exact(60, {30});
  ASSERT_TRUE(exact.has_value());
  EXPECT_NEAR(std::log(static_cast<double>(*exact)) / log_multinomial(60, {30}), 1.0, 1e-13);
}

TEST(Enumerate, Examples) {
  const auto a = enumerate_indices(1, 2);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0], MultiIndex({0}));
  EXPECT_EQ(a[1], MultiIndex({1}));
  EXPECT_EQ(a[2], MultiIndex({2}));
  const auto b = enumerate_indices(2, 1);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0], MultiIndex({0, 0}));
  EXPECT_EQ(b[1], MultiIndex({1, 0}));
  EXPECT_EQ(b[2], MultiIndex({0, 1}));
  EXPECT_EQ(enumerate_indices(2, 10).size(), 66u);
}

TEST(Enumerate, LengthIsBinomialAndOrderGraded) {
  for (int m = 1; m <= 4; ++m) {
    for (int N = 0; N <= 12; ++N) {
      const auto idx = enumerate_indices(m, N);
      EXPECT_EQ(idx.size(), static_cast<std::size_t>(std::llround(multinomial_oracle(N + m, {m}))));
      for (std::size_t i = 1; i < idx.size(); ++i) EXPECT_LE(idx[i - 1].order(), idx[i].order());
      EXPECT_EQ(idx, enumerate_indices(m, N));
    }
  }
  EXPECT_EQ(index_count(4, 200), 70058751u);
}

TEST(Enumerate, MultinomialTheorem) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int m = 1; m <= 4; ++m) {
    for (int N : {1, 5, 17}) {
      std::vector<double> x(m);
      double n = 0.0;
      for (double& v : x) {
        v = u(gen);
        n += v * v;
      }
      double sum = 0.0;
      for (const auto& J : enumerate_indices(m, N)) {
        double term = multinomial(N, J);
        for (int q = 0; q < m; ++q) term *= std::pow(x[q], 2 * J[q]);
        sum += term;
      }
      EXPECT_NEAR(sum / std::pow(1.0 + n, N), 1.0, 1e-10);
    }
  }
}

TEST(ComplexPointTest, DerivedScalars) {
  const ComplexPoint z{cplx{1.0, 2.0}, cplx{-0.5, 0.25}};
  EXPECT_EQ(z.dim(), 2);
  const cplx zz = cplx{1.0, 2.0} * cplx{1.0, 2.0} + cplx{-0.5, 0.25} * cplx{-0.5, 0.25};
  EXPECT_EQ(z.dot_self(), zz);
  EXPECT_DOUBLE_EQ(z.norm_sq(), 1.0 + 4.0 + 0.25 + 0.0625);
  EXPECT_DOUBLE_EQ(z.imag_norm(), std::sqrt(4.0 + 0.0625));
  EXPECT_FALSE(z.is_real());
  EXPECT_TRUE((ComplexPoint{cplx{0.3, 0.0}}.is_real()));
  EXPECT_THROW(ComplexPoint({cplx{std::nan(""), 0.0}}), DomainError);
  EXPECT_THROW(ComplexPoint({cplx{0.0, INFINITY}}), DomainError);
}

TEST(Grid, ImaginaryAxisSweep) {
  GridSpec g{ComplexPoint{cplx{0.0}}, 0, Part::Imag, 0.1, 1.0, 10};
  const auto pts = grid_points(g);
  ASSERT_EQ(pts.size(), 10u);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(pts[k][0].real(), 0.0);
    EXPECT_NEAR(pts[k][0].imag(), 0.1 * (k + 1), 1e-15);
  }
}

TEST(Grid, SecondCoordinateFixed) {
  GridSpec g{ComplexPoint{cplx{0.0}, cplx{0.0}}, 0, Part::Imag, 0.5, 1.0, 2};
  const auto pts = grid_points(g);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0][0], cplx(0.0, 0.5));
  EXPECT_EQ(pts[1][0], cplx(0.0, 1.0));
  EXPECT_EQ(pts[1][1], cplx(0.0, 0.0));
}

TEST(Grid, EndpointsIncluded) {
  GridSpec g{ComplexPoint{cplx{0.0, 0.7}}, 0, Part::Real, 0.0, 1.0, 2};
  const auto pts = grid_points(g);
  EXPECT_EQ(pts[0][0], cplx(0.0, 0.7));
  EXPECT_EQ(pts[1][0], cplx(1.0, 0.7));
  const auto logv = grid_values(1e-3, 1e-2, 21, Spacing::Log);
  EXPECT_EQ(logv.front(), 1e-3);
  EXPECT_EQ(logv.back(), 1e-2);
  EXPECT_NEAR(logv[10], std::sqrt(1e-5), 1e-15);
}

TEST(Grid, Validation) {
  EXPECT_THROW(grid_points({ComplexPoint{cplx{0.0}}, 0, Part::Imag, 1.0, 0.5, 4}), DomainError);
  EXPECT_THROW(grid_points({ComplexPoint{cplx{0.0}}, 0, Part::Imag, 0.0, 1.0, 1}), DomainError);
  EXPECT_THROW(grid_points({ComplexPoint{cplx{0.0}}, 1, Part::Imag, 0.0, 1.0, 3}), DomainError);
  EXPECT_THROW(
      grid_points({ComplexPoint{cplx{0.0}}, 0, Part::Imag, 0.0, 1.0, 3, Spacing::Log}),
      DomainError);
}

TEST(Fit, RecoversLine) {
  std::vector<double> x{1, 2, 3, 4}, y{1, 3, 5, 7};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, -1.0, 1e-14);
  std::vector<double> p{1e-3, 1e-2, 1e-1}, q{2e-9, 2e-6, 2e-3};
  EXPECT_NEAR(log_log_slope(p, q), 3.0, 1e-12);
}
