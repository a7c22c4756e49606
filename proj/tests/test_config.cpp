#include <string>

#include <gtest/gtest.h>

#include "hardy/config.hpp"

using namespace hardy;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_string(text).validate();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    return e.message();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesAllSections) {
  const RunConfig c = parse_config_string(R"(
# threshold sweep
task = ThresholdTruly

[problem]
n = 4
gamma = 0.5   # inline comment
s = 0.25
lambda = 1.5
radius = 2

[robin]
pole = 0.3
extrapolate = false

[sweep]
param = gamma
lo = -0.5
hi = 0.5
count = 11

[numerics]
radial_nodes = 801
axi_cells = 64
tol = 1e-9
seed = 42
workers = 3

[report]
modules = params, robin3d
)");
  EXPECT_EQ(c.task, Task::ThresholdTruly);
  EXPECT_EQ(c.params.n, 4);
  EXPECT_DOUBLE_EQ(c.params.gamma, 0.5);
  EXPECT_DOUBLE_EQ(c.params.s, 0.25);
  EXPECT_DOUBLE_EQ(c.params.lam, 1.5);
  EXPECT_DOUBLE_EQ(c.params.ball_radius, 2.0);
  EXPECT_DOUBLE_EQ(c.pole, 0.3);
  EXPECT_FALSE(c.numerics.extrapolate);
  ASSERT_TRUE(c.sweep.has_value());
  EXPECT_EQ(c.sweep->param, "gamma");
  EXPECT_EQ(c.sweep->count, 11);
  EXPECT_EQ(c.numerics.radial_nodes, 801);
  EXPECT_EQ(c.numerics.axi_cells, 64);
  EXPECT_DOUBLE_EQ(c.numerics.tol, 1e-9);
  EXPECT_EQ(c.numerics.seed, 42u);
  EXPECT_EQ(c.numerics.workers, 3);
  EXPECT_EQ(c.modules, (std::set<std::string>{"params", "robin3d"}));
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, TaskSpellings) {
  EXPECT_EQ(parse_task("MuRN"), Task::MuRN);
  EXPECT_EQ(parse_task("mu-rn"), Task::MuRN);
  EXPECT_EQ(parse_task("Lambda1"), Task::Lambda1);
  EXPECT_EQ(parse_task("eigen"), Task::Lambda1);
  EXPECT_EQ(parse_task("ground_state"), Task::GroundState);
  EXPECT_EQ(parse_task("PohozaevCheck"), Task::PohozaevCheck);
  EXPECT_EQ(parse_task("EnergyExpansion"), Task::EnergyExpansion);
  EXPECT_EQ(parse_task("FullReport"), Task::FullReport);
  EXPECT_EQ(parse_task("threshold-merely"), Task::ThresholdMerely);
  EXPECT_THROW(parse_task("nonsense"), Error);
  for (const auto& tn : kTaskNames) EXPECT_EQ(parse_task(to_string(tn.task)), tn.task);
}

TEST(Config, FieldLevelErrors) {
  EXPECT_NE(error_of("[problem]\ngamma = abc\n").find("<config>:2: problem.gamma: expected a number"), std::string::npos);
  EXPECT_NE(error_of("[problem]\nmass = 1\n").find("problem.mass: unknown key"), std::string::npos);
  EXPECT_NE(error_of("[grid]\n").find("unknown section [grid]"), std::string::npos);
  EXPECT_NE(error_of("task = nope\n").find("task: unknown task"), std::string::npos);
  EXPECT_NE(error_of("[numerics]\nworkers = 0\n").find("numerics.workers"), std::string::npos);
  EXPECT_NE(error_of("[problem]\nn = 3.5\n").find("expected an integer"), std::string::npos);
  EXPECT_NE(error_of("[report]\nmodules = params, bogus\n").find("unknown module 'bogus'"), std::string::npos);
  EXPECT_NE(error_of("just some text\n").find("expected key = value"), std::string::npos);
}

TEST(Config, InadmissibleProblem) {
  EXPECT_NE(error_of("task = mass\n[problem]\ngamma = 0.3\n").find("problem:"), std::string::npos);
  // the full report ignores [problem]
  EXPECT_EQ(error_of("task = report\n[problem]\ngamma = 0.3\n"), "");
}

TEST(Config, SweepValidation) {
  EXPECT_NE(error_of("task = mass\n[sweep]\nparam = mass\nlo = 0\nhi = 1\ncount = 3\n").find("not a sweepable"),
            std::string::npos);
  EXPECT_NE(error_of("task = mass\n[sweep]\nparam = gamma\nlo = 0\nhi = 0.5\ncount = 3\n").find("inadmissible"),
            std::string::npos);
  EXPECT_NE(error_of("task = mass\n[sweep]\nparam = s\nlo = 1\nhi = 0\ncount = 3\n").find("lo must not exceed hi"),
            std::string::npos);
  EXPECT_NE(error_of("task = mass\n[sweep]\nlo = 0\n").find("sweep.param: missing"), std::string::npos);
  EXPECT_NE(error_of("task = report\n[sweep]\nparam = s\nlo = 0\nhi = 1\ncount = 2\n").find("does not sweep"),
            std::string::npos);
  EXPECT_EQ(error_of("task = exponents\n[sweep]\nparam = gamma\nlo = -1\nhi = 0.2\ncount = 20\n"), "");
}

TEST(Config, SweepPoints) {
  const SweepSpec s{"lambda", 1.0, 2.0, 5};
  const auto x = s.points();
  ASSERT_EQ(x.size(), 5u);
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[2], 1.5);
  EXPECT_DOUBLE_EQ(x[4], 2.0);
  EXPECT_EQ((SweepSpec{"s", 0.5, 0.5, 1}).points(), std::vector<double>{0.5});
}

TEST(Config, SweepAtSetsParameter) {
  RunConfig c;
  c.task = Task::Robin;
  c.sweep = SweepSpec{"pole", 0.0, 0.5, 3};
  EXPECT_DOUBLE_EQ(c.at(0.25).pole, 0.25);
  EXPECT_FALSE(c.at(0.25).sweep.has_value());
  c.sweep->param = "radius";
  EXPECT_DOUBLE_EQ(c.at(3.0).params.ball_radius, 3.0);
}

TEST(Config, CommandLineSweep) {
  const SweepSpec s = parse_sweep("lambda:0.1:2:7");
  EXPECT_EQ(s.param, "lambda");
  EXPECT_DOUBLE_EQ(s.lo, 0.1);
  EXPECT_DOUBLE_EQ(s.hi, 2.0);
  EXPECT_EQ(s.count, 7);
  EXPECT_THROW(parse_sweep("lambda:0:1"), Error);
  EXPECT_THROW(parse_sweep("lambda:0:x:3"), Error);
}

TEST(Config, MissingFile) {
  try {
    load_config("/nonexistent/file.conf");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    EXPECT_NE(e.message().find("cannot open"), std::string::npos);
  }
}
