#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "randpoly/core.hpp"
#include "randpoly/ensembles.hpp"
#include "randpoly/io.hpp"
#include "randpoly/kernel.hpp"
#include "randpoly/montecarlo.hpp"
#include "randpoly/scaling.hpp"

namespace randpoly::cli {

enum ExitCode : int { success = 0, acceptance_failure = 1, usage_error = 2 };

struct DensityArgs {
  int m = 1;
  std::vector<int> degrees{10, 20, 40};
  double from = 0.05;
  double to = 1.0;
  int points = 96;
  std::string out = "density";
};

struct ScaledArgs {
  int m = 1;
  double from = 1e-3;
  double to = 5.0;
  int points = 200;
  std::string out = "scaled.csv";
};

struct McArgs {
  int N = 20;
  std::uint64_t trials = 100000;
  std::string field = "real";
  std::uint64_t seed = 7;
  Region region{-1.5, 1.5, 0.2, 1.0};
  int nx = 15;
  int ny = 8;
  double coverage = 0.95;
  unsigned threads = 0;
  std::string out = "mc.csv";
  std::string report = "mc_report.txt";
};

struct WeakLimitArgs {
  std::vector<int> degrees{20, 40, 80, 160};
  TestFunction phi{};
  std::string out;  // empty: stdout only
};

inline std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file " + path);
  return f;
}

/// One CSV per degree: y,E_cx,E_real,ratio along z = (iy, 0, ..., 0).
inline int run_density(const DensityArgs& a, std::ostream& out, std::ostream& err) {
  const auto ys = grid_values(a.from, a.to, a.points);
  for (int N : a.degrees) {
    const EnsembleSpec spec{a.m, N, Field::Real, 0};
    spec.validate();
    const std::string path = a.out + "_N" + std::to_string(N) + ".csv";
    auto f = open_output(path);
    write_metadata(f, {{"command", "density"},
                       {"m", std::to_string(a.m)},
                       {"N", std::to_string(N)},
                       {"from", format_number(a.from)},
                       {"to", format_number(a.to)},
                       {"points", std::to_string(a.points)},
                       {"y_min", format_number(y_min)}});
    f << "y,E_cx,E_real,ratio\n";
    int skipped = 0;
    for (double y : ys) {
      if (std::abs(y) < y_min) {
        ++skipped;
        continue;
      }
      const auto z = imaginary_axis_point(a.m, y);
      const double cx = density_cx(z, spec);
      const double re = density_real(z, spec);
      f << format_number(y) << ',' << format_number(cx) << ',' << format_number(re) << ','
        << format_number(re / cx) << '\n';
    }
    if (skipped) err << "note: " << skipped << " point(s) with |y| < y_min omitted\n";
    out << path << '\n';
  }
  return success;
}

/// y,K_inf on a log grid, with the fitted near-zero exponent in a footer.
inline int run_scaled(const ScaledArgs& a, std::ostream& out, std::ostream&) {
  auto f = open_output(a.out);
  write_metadata(f, {{"command", "scaled"},
                     {"m", std::to_string(a.m)},
                     {"from", format_number(a.from)},
                     {"to", format_number(a.to)},
                     {"points", std::to_string(a.points)}});
  f << "y,K_inf\n";
  for (double y : grid_values(a.from, a.to, a.points, Spacing::Log))
    f << format_number(y) << ',' << format_number(scaled_density_radial(y, a.m)) << '\n';
  const double exponent = near_zero_exponent(a.m);
  f << "# fit_window=" << format_number(1e-3) << ',' << format_number(1e-2) << '\n';
  f << "# fitted_exponent=" << format_number(exponent) << '\n';
  out << a.out << '\n' << "fitted_exponent=" << format_number(exponent) << '\n';
  return success;
}

inline int run_mc(const McArgs& a, std::ostream& out, std::ostream& err) {
  const EnsembleSpec spec{1, a.N, parse_field(a.field), a.seed};
  spec.validate();
  a.region.validate();
  if (spec.field == Field::Real && (std::min(std::abs(a.region.y_lo), std::abs(a.region.y_hi)) < y_min ||
                                    a.region.y_lo * a.region.y_hi < 0.0)) {
    err << "error: real-coefficient comparison needs a region at least y_min away from the real axis\n";
    return usage_error;
  }
  const auto hist = empirical_density(spec, a.region, a.nx, a.ny, a.trials, a.threads);
  const DensityFunction analytic = [&](cplx z) {
    const ComplexPoint p{z};
    return spec.field == Field::Real ? density_real(p, spec) : density_cx(p, spec);
  };
  const auto rep = compare(hist, analytic);

  auto f = open_output(a.out);
  write_histogram_csv(f, hist, rep,
                      {{"command", "mc"},
                       {"N", std::to_string(a.N)},
                       {"trials", std::to_string(a.trials)},
                       {"field", a.field},
                       {"seed", std::to_string(a.seed)},
                       {"x_min", format_number(a.region.x_lo)},
                       {"x_max", format_number(a.region.x_hi)},
                       {"y_min", format_number(a.region.y_lo)},
                       {"y_max", format_number(a.region.y_hi)},
                       {"nx", std::to_string(a.nx)},
                       {"ny", std::to_string(a.ny)},
                       {"coverage", format_number(a.coverage)}});
  auto r = open_output(a.report);
  write_report(r, hist, rep);
  write_report(out, hist, rep);
  if (rep.fraction_within_3sigma < a.coverage) {
    err << "coverage " << rep.fraction_within_3sigma << " below required " << a.coverage << '\n';
    return acceptance_failure;
  }
  return success;
}

/// Table of N, pairing, bound; exit 1 if the bound is ever violated.
inline int run_weaklimit(const WeakLimitArgs& a, std::ostream& out, std::ostream&) {
  std::ostringstream table;
  write_metadata(table, {{"command", "weaklimit"},
                         {"N", join(a.degrees)},
                         {"cx", format_number(a.phi.cx)},
                         {"cy", format_number(a.phi.cy)},
                         {"ax", format_number(a.phi.ax)},
                         {"ay", format_number(a.phi.ay)},
                         {"amplitude", format_number(a.phi.amplitude)}});
  table << "N,pairing,bound,laplacian_l1\n";
  bool ok = true;
  for (int N : a.degrees) {
    const auto r = weak_limit_pairing(EnsembleSpec{1, N, Field::Real, 0}, a.phi);
    ok = ok && std::abs(r.pairing) <= r.bound;
    table << N << ',' << format_number(r.pairing) << ',' << format_number(r.bound) << ','
          << format_number(r.laplacian_l1) << '\n';
  }
  out << table.str();
  if (!a.out.empty()) open_output(a.out) << table.str();
  return ok ? success : acceptance_failure;
}

/// Entry point shared by the randpoly binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complex zeros of random real and complex Gaussian polynomial systems"};
  app.require_subcommand(1);

  DensityArgs da;
  auto* density = app.add_subcommand("density", "analytic densities along z = (iy, 0, ..., 0)");
  density->add_option("--m", da.m, "number of variables")->check(CLI::Range(1, max_variables));
  density->add_option("--N", da.degrees, "comma-separated degrees")->delimiter(',')->check(CLI::PositiveNumber);
  density->add_option("--from", da.from);
  density->add_option("--to", da.to);
  density->add_option("--points", da.points)->check(CLI::Range(2, 1000000));
  density->add_option("--out", da.out, "output prefix; files are <out>_N<N>.csv");

  ScaledArgs sa;
  auto* scaled = app.add_subcommand("scaled", "scaled density near the real subspace");
  scaled->add_option("--m", sa.m)->check(CLI::Range(1, max_variables));
  scaled->add_option("--from", sa.from)->check(CLI::PositiveNumber);
  scaled->add_option("--to", sa.to)->check(CLI::PositiveNumber);
  scaled->add_option("--points", sa.points)->check(CLI::Range(2, 1000000));
  scaled->add_option("--out", sa.out);

  McArgs ma;
  auto* mc = app.add_subcommand("mc", "Monte Carlo root histogram (m = 1)");
  mc->add_option("--N", ma.N)->check(CLI::PositiveNumber);
  mc->add_option("--trials", ma.trials)->check(CLI::PositiveNumber);
  mc->add_option("--field", ma.field)->check(CLI::IsMember({"real", "complex"}));
  mc->add_option("--seed", ma.seed);
  mc->add_option("--x-min", ma.region.x_lo);
  mc->add_option("--x-max", ma.region.x_hi);
  mc->add_option("--y-min", ma.region.y_lo);
  mc->add_option("--y-max", ma.region.y_hi);
  mc->add_option("--nx", ma.nx)->check(CLI::PositiveNumber);
  mc->add_option("--ny", ma.ny)->check(CLI::PositiveNumber);
  mc->add_option("--coverage", ma.coverage)->check(CLI::Range(0.0, 1.0));
  mc->add_option("--threads", ma.threads);
  mc->add_option("--out", ma.out);
  mc->add_option("--report", ma.report);

  WeakLimitArgs wa;
  auto* weak = app.add_subcommand("weaklimit", "weak-limit pairing against a bump test function");
  weak->add_option("--N", wa.degrees)->delimiter(',')->check(CLI::PositiveNumber);
  weak->add_option("--cx", wa.phi.cx);
  weak->add_option("--cy", wa.phi.cy);
  weak->add_option("--ax", wa.phi.ax)->check(CLI::PositiveNumber);
  weak->add_option("--ay", wa.phi.ay)->check(CLI::PositiveNumber);
  weak->add_option("--amplitude", wa.phi.amplitude);
  weak->add_option("--out", wa.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? success : usage_error;
  }

  try {
    if (*density) return run_density(da, out, err);
    if (*scaled) return run_scaled(sa, out, err);
    if (*mc) return run_mc(ma, out, err);
    if (*weak) return run_weaklimit(wa, out, err);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  }
  return usage_error;
}

}  // namespace randpoly::cli
