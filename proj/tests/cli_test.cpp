#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "viab/csv.hpp"
#include "viab/kernel.hpp"
#include "viab/model_io.hpp"

namespace viab {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "viab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("viab_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    model_ = (dir_ / "ex.json").string();
    ASSERT_EQ(run({"example", "--p", "0.01", "--horizon", "40", "--out", model_}).code, 0);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::string model_;
};

TEST_F(CliTest, ExampleThenSolveMatchesInProcessSolve) {
  const Result r = run({"solve", "--model", model_, "--out", path("ex")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("ex.value.csv"));
  const csv::ValueTable table = csv::read_values(in);
  const Solution sol = solve(make_paper_example(0.01, 0, 40));
  EXPECT_EQ(table.value, sol.value);
  EXPECT_NE(r.out.find("V(0, 0) = "), std::string::npos);
  EXPECT_TRUE(fs::exists(path("ex.argmax.csv")));
}

TEST_F(CliTest, ExampleParameterErrors) {
  EXPECT_EQ(run({"example", "--p", "0.6", "--horizon", "40", "--out", path("bad.json")}).code, cli::kUsage);
  const Result r = run({"example", "--p", "0.1", "--horizon", "4", "--out", "/nonexistent-dir/ex.json"});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_NE(r.err.find("/nonexistent-dir/ex.json"), std::string::npos);
}

TEST_F(CliTest, MalformedModelNamesField) {
  std::ofstream(path("bad.json")) << R"({"time": {"t0": 0, "T": "forty"}})";
  const Result r = run({"solve", "--model", path("bad.json"), "--out", path("bad")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("$.time.T"), std::string::npos);
}

TEST_F(CliTest, DeterministicModelGivesIndicatorValues) {
  Model m = make_paper_example(0.1, 0, 10);
  m.noise = {{{0.0}}, {1.0}};
  save_model(m, path("det.json"));
  ASSERT_EQ(run({"solve", "--model", path("det.json"), "--out", path("det")}).code, 0);
  std::ifstream in(path("det.value.csv"));
  const csv::ValueTable table = csv::read_values(in);
  for (const ValueSlice& s : table.value.slices()) {
    for (double v : s.values) EXPECT_TRUE(v == 0.0 || v == 1.0);
  }
}

TEST_F(CliTest, KernelQueries) {
  ASSERT_EQ(run({"solve", "--model", model_, "--out", path("ex")}).code, 0);
  const Result r = run({"kernel", "--value", path("ex.value.csv"), "--time", "39", "--beta", "0.995", "--out",
                        path("k.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "-1\n1\n");
  EXPECT_EQ(slurp(path("k.csv")), "t,beta,state_index,x1\n39,0.995,0,-1\n39,0.995,2,1\n");

  EXPECT_EQ(run({"kernel", "--value", path("ex.value.csv"), "--time", "39", "--beta", "0"}).code, cli::kUsage);
  EXPECT_EQ(run({"kernel", "--value", path("ex.value.csv"), "--time", "41", "--beta", "0.5"}).code, cli::kFailure);
}

TEST_F(CliTest, SolveThenKernelMatchesInProcessKernel) {
  ASSERT_EQ(run({"solve", "--model", model_, "--out", path("ex")}).code, 0);
  const Solution sol = solve(make_paper_example(0.01, 0, 40));
  for (int t : {0, 10, 39, 40}) {
    for (double beta : {0.5, 0.8, 0.82, 0.99, 1.0}) {
      const Result r = run({"kernel", "--value", path("ex.value.csv"), "--time", std::to_string(t), "--beta",
                            csv::format_real(beta)});
      ASSERT_EQ(r.code, 0);
      std::string expected;
      for (StateIndex x : kernel_slice(sol.value, t, beta).members) {
        expected += csv::format_real(static_cast<double>(x) - 1.0) + "\n";
      }
      EXPECT_EQ(r.out, expected) << "t=" << t << " beta=" << beta;
    }
  }
}

TEST_F(CliTest, SimulateNinePathsForPlotting) {
  const Result r = run({"simulate", "--model", model_, "--x0", "0", "--samples", "9", "--seed", "1", "--out",
                        path("traj.csv"), "--plot", path("plot.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream traj(slurp(path("traj.csv")));
  std::string line;
  int rows = 0;
  while (std::getline(traj, line)) ++rows;
  EXPECT_EQ(rows, 1 + 9 * 41);
  std::istringstream plot(slurp(path("plot.csv")));
  std::getline(plot, line);
  EXPECT_EQ(line, "t,sample_0,sample_1,sample_2,sample_3,sample_4,sample_5,sample_6,sample_7,sample_8");
  EXPECT_NE(r.out.find("samples 9"), std::string::npos);
}

TEST_F(CliTest, SimulateRejectsBadInitialState) {
  EXPECT_NE(run({"simulate", "--model", model_, "--x0", "sink"}).code, 0);
  EXPECT_NE(run({"simulate", "--model", model_, "--x0", "0.5"}).code, 0);
  EXPECT_NE(run({"simulate", "--model", model_, "--x0", "abc"}).code, 0);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  for (int k = 0; k < 2; ++k) {
    const std::string tag = std::to_string(k);
    ASSERT_EQ(run({"solve", "--model", model_, "--out", path("s" + tag)}).code, 0);
    ASSERT_EQ(run({"simulate", "--model", model_, "--x0", "0", "--samples", "50", "--seed", "3", "--out",
                   path("t" + tag + ".csv")})
                  .code,
              0);
    ASSERT_EQ(run({"estimate", "--model", model_, "--x0", "0", "--samples", "5000", "--seed", "3", "--out",
                   path("e" + tag + ".txt")})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(path("s0.value.csv")), slurp(path("s1.value.csv")));
  EXPECT_EQ(slurp(path("s0.argmax.csv")), slurp(path("s1.argmax.csv")));
  EXPECT_EQ(slurp(path("t0.csv")), slurp(path("t1.csv")));
  EXPECT_EQ(slurp(path("e0.txt")), slurp(path("e1.txt")));
}

TEST_F(CliTest, SolveCacheReproducesOutputs) {
  const std::string cache = path("cache");
  ASSERT_EQ(run({"solve", "--model", model_, "--out", path("a"), "--cache", cache}).code, 0);
  EXPECT_FALSE(fs::is_empty(cache));
  ASSERT_EQ(run({"solve", "--model", model_, "--out", path("b"), "--cache", cache}).code, 0);
  EXPECT_EQ(slurp(path("a.value.csv")), slurp(path("b.value.csv")));
  EXPECT_EQ(slurp(path("a.argmax.csv")), slurp(path("b.argmax.csv")));
}

TEST_F(CliTest, PolicyValueAndOracle) {
  const Result pol = run({"policy", "--model", model_});
  ASSERT_EQ(pol.code, 0);
  EXPECT_EQ(pol.out.substr(0, pol.out.find('\n', pol.out.find('\n') + 1) + 1),
            "t,state_index,control_index,u1\n0,0,1,1\n");

  const Result val = run({"value", "--model", model_, "--time", "39", "--x0", "0"});
  ASSERT_EQ(val.code, 0);
  EXPECT_EQ(val.out, "0.98999999999999999\n");

  const Result orc = run({"oracle", "--p", "0.01", "--horizon", "40", "--time", "39", "--beta", "0.995"});
  ASSERT_EQ(orc.code, 0);
  EXPECT_EQ(orc.out, "t,v_minus1,v_0,v_plus1,kernel\n39,1,0.98999999999999999,1,boundary_pair\n");
}

TEST_F(CliTest, MissingSubcommandIsUsageError) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"solve"}).code, cli::kUsage);
}

}  // namespace
}  // namespace viab
