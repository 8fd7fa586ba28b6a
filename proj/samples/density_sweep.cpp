// Prints the real and complex zero densities of a degree-20 SO(2) polynomial
// along the imaginary axis, followed by a short Monte Carlo check.
#include <cstdio>

#include "randpoly/randpoly.hpp"

int main() {
  using namespace randpoly;
  const EnsembleSpec spec{1, 20, Field::Real, 7};
  std::printf("%8s %14s %14s %10s\n", "y", "E_cx", "E_real", "ratio");
  for (double y : grid_values(0.05, 1.0, 20)) {
    const ComplexPoint z{cplx{0.0, y}};
    const double cx = density_cx(z, spec);
    const double re = density_real(z, spec);
    std::printf("%8.4f %14.6e %14.6e %10.6f\n", y, cx, re, re / cx);
  }

  const Region region{-1.5, 1.5, 0.2, 1.0};
  const auto hist = empirical_density(spec, region, 15, 8, 20000);
  const auto rep = compare(hist, [&](cplx z) { return density_real(ComplexPoint{z}, spec); });
  std::printf("\nbins within 3 sigma: %.3f   real roots per trial: %.3f\n",
              rep.fraction_within_3sigma,
              static_cast<double>(hist.real_roots) / static_cast<double>(hist.effective_trials()));

  std::printf("\nscaled density, m = 2\n");
  for (double rho : {1e-3, 1e-2, 0.1, 0.5, 1.0, 3.0})
    std::printf("%8.4f %14.6e\n", rho, scaled_density_radial(rho, 2));
}
