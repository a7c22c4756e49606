#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "hardy/report.hpp"

using namespace hardy;
using std::numbers::pi;

namespace {

std::string csv_of(const RunResult& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

RunConfig make(Task t, ProblemParams p) {
  RunConfig c;
  c.task = t;
  c.params = p;
  return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("hardy_test_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST(RunConfig, ThresholdRow) {
  const RunResult r = run_config(make(Task::ThresholdTruly, {3, 0.0, 0.5, 0.0, 1.0}));
  ASSERT_EQ(r.rows.size(), 1u);
  const auto& v = r.rows[0].values;
  EXPECT_NEAR(v.at("lambda_star"), 2.4674, 1e-4);
  EXPECT_LT(v.at("rel_dev_bessel"), 1e-3);
  EXPECT_LT(v.at("rel_dev_eigen"), 1e-3);
  EXPECT_TRUE(r.passed());
}

TEST(RunConfig, MassEulerRow) {
  const RunResult r = run_config(make(Task::Mass, {4, 0.75, 0.0, 0.0, 1.0}));
  EXPECT_NEAR(r.rows[0].values.at("mass"), -1.0, 1e-8);
  EXPECT_EQ(r.rows[0].values.at("pass"), 1.0);
}

TEST(RunConfig, ExponentSweep) {
  RunConfig c = make(Task::Exponents, {3, 0.0, 0.0, 0.0, 1.0});
  c.sweep = SweepSpec{"gamma", -2.0, 0.2, 20};
  const RunResult r = run_config(c);
  ASSERT_EQ(r.rows.size(), 20u);
  for (const auto& row : r.rows) {
    EXPECT_LT(row.values.at("identity_residual"), 1e-12);
    EXPECT_TRUE(row.ok());
  }
  const std::string csv = csv_of(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "n,gamma,s,lambda,radius,beta_minus,beta_plus,gap,two_star_s,nu,n_crit,low_dimensional,truly_singular,"
            "identity_residual,pass,status");
}

TEST(RunConfig, MassSweepSingleSignChange) {
  RunConfig c = make(Task::Mass, {3, 0.0, 0.0, 0.0, 1.0});
  c.numerics.radial_nodes = 401;
  c.sweep = SweepSpec{"lambda", 0.5, 9.0, 12};
  const RunResult r = run_config(c);
  ASSERT_TRUE(r.flags.mass_increasing.has_value());
  EXPECT_TRUE(*r.flags.mass_increasing);
  EXPECT_EQ(*r.flags.mass_sign_changes, 1);
  const std::string header = csv_of(r).substr(0, csv_of(r).find('\n'));
  EXPECT_NE(header.find("mass_increasing,mass_sign_changes,status"), std::string::npos);
}

TEST(RunConfig, ThresholdSweepOverGamma) {
  RunConfig c = make(Task::ThresholdTruly, {3, 0.0, 0.5, 0.0, 1.0});
  c.numerics.radial_nodes = 801;
  c.sweep = SweepSpec{"gamma", -0.7, 0.2, 4};
  const RunResult r = run_config(c);
  for (const auto& row : r.rows) {
    ASSERT_TRUE(row.ok()) << row.status;
    EXPECT_TRUE(std::isfinite(row.values.at("lambda_star")));
    EXPECT_GT(row.values.at("lambda_star"), 0.0);
    EXPECT_LT(row.values.at("rel_dev_bessel"), 1e-3);
  }
}

TEST(RunConfig, GroundStateSweepIsNonincreasing) {
  RunConfig c = make(Task::GroundState, {3, 0.0, 0.0, 0.0, 1.0});
  c.numerics.radial_nodes = 801;
  c.sweep = SweepSpec{"lambda", 3.0, 6.0, 3};
  const RunResult r = run_config(c);
  ASSERT_TRUE(r.flags.mu_nonincreasing.has_value());
  EXPECT_TRUE(*r.flags.mu_nonincreasing);
  for (const auto& row : r.rows) EXPECT_EQ(row.values.at("attained"), 1.0);
}

// a sweep point past λ₁ fails on its own row; the others still run
TEST(RunConfig, PartialFailureIsMarked) {
  RunConfig c = make(Task::Mass, {3, 0.0, 0.0, 0.0, 1.0});
  c.numerics.radial_nodes = 201;
  c.sweep = SweepSpec{"lambda", 1.0, 11.0, 3};
  const RunResult r = run_config(c);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_TRUE(r.rows[0].ok());
  EXPECT_TRUE(r.rows[1].ok());
  EXPECT_FALSE(r.rows[2].ok());
  EXPECT_NE(r.rows[2].status.find("NotCoercive"), std::string::npos);
  EXPECT_FALSE(r.passed());
  EXPECT_NE(csv_of(r).find("error NotCoercive"), std::string::npos);
}

TEST(RunConfig, SinglePointErrorCarriesContext) {
  try {
    run_config(make(Task::Mass, {5, 0.0, 0.0, 0.0, 1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RegimeMismatch);
    EXPECT_NE(e.message().find("mass at n=5"), std::string::npos);
  }
}

TEST(RunConfig, ValidationRunsFirst) {
  RunConfig c = make(Task::Mass, {3, 0.0, 0.0, 0.0, 1.0});
  c.numerics.workers = 0;
  EXPECT_THROW(run_config(c), Error);
}

TEST(RunConfig, OutputIndependentOfWorkers) {
  RunConfig c = make(Task::Lambda1, {3, 0.0, 0.0, 0.0, 1.0});
  c.numerics.radial_nodes = 301;
  c.sweep = SweepSpec{"gamma", -1.0, 0.2, 7};
  c.numerics.workers = 1;
  const std::string one = csv_of(run_config(c));
  c.numerics.workers = 3;
  const std::string three = csv_of(run_config(c));
  EXPECT_EQ(one, three);
  EXPECT_EQ(one, csv_of(run_config(c)));
}

TEST(RunConfig, WritesCsvFile) {
  const auto dir = scratch_dir("csv");
  const RunResult r = run_config(make(Task::MuRN, {3, 0.0, 0.0, 0.0, 1.0}), dir.string());
  ASSERT_EQ(r.files.size(), 1u);
  std::ifstream in(r.files[0]);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), csv_of(r));
  EXPECT_EQ(dir / "mu-rn.csv", std::filesystem::path(r.files[0]));
  std::filesystem::remove_all(dir);
}

TEST(RunConfig, RobinRowAgainstImages) {
  RunConfig c = make(Task::Robin, {3, 0.0, 0.0, 0.0, 1.0});
  c.pole = 0.5;
  c.numerics.axi_cells = 64;
  c.numerics.extrapolate = false;
  const RunResult r = run_config(c);
  EXPECT_NEAR(r.rows[0].values.at("oracle"), -4.0 / 3.0, 1e-15);
  EXPECT_LT(r.rows[0].values.at("rel_dev"), 0.05);
}

// R_ρ(x₀) = R_1(x₀/ρ)/ρ
TEST(RunConfig, RobinRadiusScaling) {
  RunConfig c = make(Task::Robin, {3, -0.3, 0.0, 1.0, 1.0});
  c.pole = 0.4;
  c.numerics.axi_cells = 64;
  c.numerics.extrapolate = false;
  const double unit = run_config(c).rows[0].values.at("robin_mass");
  c.params.ball_radius = 2.0;
  c.params.lam = 0.25;
  c.pole = 0.8;
  EXPECT_NEAR(run_config(c).rows[0].values.at("robin_mass"), unit / 2.0, 1e-12);
}

TEST(FullReport, ParamsSubset) {
  RunConfig c;
  c.task = Task::FullReport;
  c.modules = {"params"};
  const auto dir = scratch_dir("report");
  const RunResult r = run_config(c, dir.string());
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_EQ(r.checks[0].name, "exponent identities");
  EXPECT_TRUE(r.passed());
  std::ifstream in(dir / "report.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["passed"], 1);
  EXPECT_EQ(j["failed"], 0);
  EXPECT_EQ(j["checks"][0]["module"], "params");
  EXPECT_FALSE(j["checks"][0].contains("runtime"));
  std::filesystem::remove_all(dir);
}

TEST(FullReport, CoarseGridsFail) {
  RunConfig c;
  c.task = Task::FullReport;
  c.modules = {"mass_threshold"};
  c.numerics.radial_nodes = 21;
  const RunResult r = run_config(c);
  EXPECT_FALSE(r.checks.empty());
  EXPECT_FALSE(r.passed());
}

TEST(ParallelMap, OrderedByIndex) {
  const auto v = parallel_map(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
  EXPECT_TRUE(parallel_map(0, 4, [](std::size_t) { return 0; }).empty());
}
