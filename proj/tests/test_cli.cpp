#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "randpoly/cli.hpp"

namespace fs = std::filesystem;
using namespace randpoly;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "randpoly");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> rows(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<double> r;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
    out.push_back(r);
  }
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("randpoly_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(CliTest, DensityWritesOneFilePerDegree) {
  const auto r = run({"density", "--m", "1", "--N", "10,20,40", "--from", "0.05", "--to", "1",
                      "--points", "96", "--out", path("d")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (int N : {10, 20, 40}) {
    const auto text = slurp(path("d_N" + std::to_string(N) + ".csv"));
    EXPECT_EQ(text.rfind("# version=", 0), 0u);
    EXPECT_NE(text.find("\ny,E_cx,E_real,ratio\n"), std::string::npos);
    const auto data = rows(text);
    ASSERT_EQ(data.size(), 96u);
    EXPECT_NEAR(data.back()[0], 1.0, 1e-15);
    EXPECT_NEAR(data.back()[3], 1.0, 1e-6);
    EXPECT_LT(data.front()[3], data.back()[3]);
  }
}

TEST_F(CliTest, DensityOmitsExcludedPoints) {
  const auto r = run({"density", "--m", "2", "--N", "10", "--from", "0", "--to", "1", "--points", "5",
                      "--out", path("d")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("omitted"), std::string::npos);
  const auto data = rows(slurp(path("d_N10.csv")));
  EXPECT_EQ(data.size(), 4u);
  // Near R^2 the real-coefficient density drops to about half the complex one.
  EXPECT_LT(data.front()[3], 1.0);
}

TEST_F(CliTest, FullPrecisionNumbers) {
  ASSERT_EQ(run({"density", "--N", "20", "--points", "2", "--out", path("d")}).code, 0);
  const auto text = slurp(path("d_N20.csv"));
  EXPECT_NE(text.find("1.0000000000000000e+00,1.5915494309189535e+00"), std::string::npos);
}

TEST_F(CliTest, ScaledSweepAndFooter) {
  const auto r = run({"scaled", "--m", "1", "--from", "1e-3", "--to", "5", "--points", "50", "--out",
                      path("k.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(path("k.csv"));
  const auto data = rows(text);
  ASSERT_EQ(data.size(), 50u);
  for (const auto& row : data) EXPECT_NEAR(row[1], prosen_density(row[0]), 1e-8);
  const auto pos = text.find("# fitted_exponent=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(text.substr(pos + 18)), 1.0, 0.05);
}

TEST_F(CliTest, ScaledExponentTwoVariables) {
  ASSERT_EQ(run({"scaled", "--m", "2", "--out", path("k.csv")}).code, 0);
  const auto text = slurp(path("k.csv"));
  EXPECT_NEAR(std::stod(text.substr(text.find("# fitted_exponent=") + 18)), 0.0, 0.05);
}

TEST_F(CliTest, MonteCarloIsReproducible) {
  const std::vector<std::string> common{"mc", "--N", "20", "--trials", "2000", "--field", "real",
                                        "--seed", "7"};
  auto a = common, b = common;
  a.insert(a.end(), {"--out", path("a.csv"), "--report", path("a.txt"), "--coverage", "0"});
  b.insert(b.end(), {"--out", path("b.csv"), "--report", path("b.txt"), "--coverage", "0", "--threads", "2"});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.txt")), slurp(path("b.txt")));
  const auto text = slurp(path("a.csv"));
  EXPECT_NE(text.find("# seed=7\n"), std::string::npos);
  EXPECT_NE(text.find("x_lo,x_hi,y_lo,y_hi,count,trials,density,predicted,zscore\n"), std::string::npos);
  EXPECT_EQ(rows(text).size(), 15u * 8u);
  EXPECT_NE(slurp(path("a.txt")).find("flagged_rate="), std::string::npos);
}

TEST_F(CliTest, MonteCarloComplexCoverage) {
  const auto r = run({"mc", "--N", "20", "--trials", "20000", "--field", "complex", "--seed", "3",
                      "--out", path("c.csv"), "--report", path("c.txt")});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST_F(CliTest, CoverageThresholdControlsExitCode) {
  const auto r = run({"mc", "--N", "20", "--trials", "300", "--coverage", "1", "--out", path("c.csv"),
                      "--report", path("c.txt")});
  const auto rep = slurp(path("c.txt"));
  const double frac = std::stod(rep.substr(rep.find("fraction_within_3sigma=") + 23));
  EXPECT_EQ(r.code, frac < 1.0 ? 1 : 0);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"mc", "--trials", "0"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"density", "--m", "7"}).code, 2);
  EXPECT_EQ(run({"mc", "--field", "quaternion"}).code, 2);
  EXPECT_EQ(run({"mc", "--y-min", "-0.5", "--out", path("x.csv"), "--report", path("x.txt")}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, WeakLimitTable) {
  const auto r = run({"weaklimit", "--N", "20,40,80,160", "--out", path("w.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto data = rows(r.out);
  ASSERT_EQ(data.size(), 4u);
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_LE(std::abs(data[i][1]), data[i][2]);
    if (i) {
      EXPECT_LT(std::abs(data[i][1]), std::abs(data[i - 1][1]));
    }
  }
  EXPECT_EQ(slurp(path("w.csv")), r.out);
}

TEST_F(CliTest, WeakLimitZeroAmplitude) {
  const auto r = run({"weaklimit", "--amplitude", "0"});
  ASSERT_EQ(r.code, 0);
  for (const auto& row : rows(r.out)) {
    EXPECT_EQ(row[1], 0.0);
    EXPECT_EQ(row[2], 0.0);
  }
}
