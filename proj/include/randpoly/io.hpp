#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "randpoly/montecarlo.hpp"

namespace randpoly {

inline constexpr const char* version = "0.1.0";

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// 17 significant digits, scientific notation.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline void write_metadata(std::ostream& os, const Metadata& meta) {
  os << "# version=" << version << '\n';
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
}

inline void write_histogram_csv(std::ostream& os, const Histogram& hist, const ComparisonReport& rep,
                                const Metadata& meta) {
  write_metadata(os, meta);
  os << "x_lo,x_hi,y_lo,y_hi,count,trials,density,predicted,zscore\n";
  for (const auto& b : rep.bins) {
    const Region r = hist.bin(b.ix, b.iy);
    os << format_number(r.x_lo) << ',' << format_number(r.x_hi) << ',' << format_number(r.y_lo)
       << ',' << format_number(r.y_hi) << ',' << b.count << ',' << hist.effective_trials() << ','
       << format_number(b.empirical_density) << ',' << format_number(b.predicted_density) << ','
       << format_number(b.zscore) << '\n';
  }
}

inline void write_report(std::ostream& os, const Histogram& hist, const ComparisonReport& rep) {
  os << "bins=" << rep.bins.size() << '\n'
     << "trials=" << rep.trials << '\n'
     << "flagged_trials=" << rep.flagged << '\n'
     << "flagged_rate=" << format_number(rep.flagged_rate()) << '\n'
     << "real_roots=" << hist.real_roots << '\n'
     << "total_roots=" << hist.total_roots << '\n'
     << "fraction_within_3sigma=" << format_number(rep.fraction_within_3sigma) << '\n'
     << "max_abs_z=" << format_number(rep.max_abs_z) << '\n'
     << "chi_square=" << format_number(rep.chi_square) << '\n'
     << "dof=" << rep.dof << '\n';
}

}  // namespace randpoly
