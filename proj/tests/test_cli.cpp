#include <gtest/gtest.h>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("sparsecov_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Outcome run(const std::string& args) const {
    const std::string err_path = path("stderr.txt");
    const std::string cmd = std::string(SPARSECOV_CLI_PATH) + " " + args + " > " + path("stdout.txt") + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err_path);
    return r;
  }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpExitsZero) {
  const Outcome r = run("--help");
  EXPECT_EQ(r.code, 0);
  const std::string out = slurp(path("stdout.txt"));
  EXPECT_NE(out.find("estimate"), std::string::npos);
  EXPECT_NE(out.find("--workers"), std::string::npos);
  EXPECT_EQ(run("estimate --help").code, 0);
  EXPECT_NE(slurp(path("stdout.txt")).find("--lla-iters"), std::string::npos);
}

TEST_F(Cli, SimulateThenEstimate) {
  ASSERT_EQ(run("simulate --truth tridiag:0.4 --p 6 --n 200 --seed 3 --out " + path("data.csv")).code, 0);
  const Outcome r = run("estimate --target precision --penalty scad:0.2:3.7 --in " + path("data.csv") + " --out " +
                    path("est.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(path("est.json")));
  EXPECT_EQ(j["target"], "precision");
  EXPECT_EQ(j["p"], 6);
  EXPECT_EQ(j["estimate"].size(), 36u);
  EXPECT_DOUBLE_EQ(j["lambda"].get<double>(), 0.2);
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_TRUE(j["support_offdiag"].is_array());
  EXPECT_FALSE(j["objective_trace"].empty());
}

TEST_F(Cli, CholeskyOutputHasFactor) {
  ASSERT_EQ(run("simulate --truth ar1:0.5 --p 4 --n 100 --seed 1 --out " + path("data.csv")).code, 0);
  ASSERT_EQ(run("estimate --target cholesky-ml --penalty l1:0.1 --in " + path("data.csv") + " --out " +
                path("est.json"))
                .code,
            0);
  const auto j = nlohmann::json::parse(slurp(path("est.json")));
  EXPECT_EQ(j["T"].size(), 16u);
  EXPECT_EQ(j["D"].size(), 4u);
}

TEST_F(Cli, MalformedCsvNamesLine) {
  std::ofstream(path("bad.csv")) << "a,b\n1,2\n3,4\n5,x\n";
  const Outcome r = run("estimate --in " + path("bad.csv") + " --out " + path("est.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
}

TEST_F(Cli, SingularNeedsLambda) {
  ASSERT_EQ(run("simulate --truth tridiag:0.3 --p 8 --n 5 --seed 2 --out " + path("data.csv")).code, 0);
  const Outcome r = run("estimate --penalty l1:0 --in " + path("data.csv") + " --out " + path("est.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("singular sample covariance requires lambda > 0"), std::string::npos) << r.err;
}

TEST_F(Cli, NonConvergenceExitsTwoAndWrites) {
  ASSERT_EQ(run("simulate --truth tridiag:0.4 --p 10 --n 40 --seed 2 --out " + path("data.csv")).code, 0);
  const Outcome r = run("estimate --target covariance --penalty l1:0.05 --max-sweeps 1 --tol 1e-12 --in " +
                    path("data.csv") + " --out " + path("est.json"));
  EXPECT_EQ(r.code, 2) << r.err;
  const auto j = nlohmann::json::parse(slurp(path("est.json")));
  EXPECT_FALSE(j["converged"].get<bool>());
}

TEST_F(Cli, SelectWritesSortedTable) {
  ASSERT_EQ(run("simulate --truth tridiag:0.4 --p 6 --n 150 --seed 4 --out " + path("data.csv")).code, 0);
  ASSERT_EQ(run("select --penalty scad:1 --grid 0.02:0.8:6 --in " + path("data.csv") + " --out " + path("sel.json") +
                " --table " + path("table.csv"))
                .code,
            0);
  std::istringstream table(slurp(path("table.csv")));
  std::string line;
  std::getline(table, line);
  EXPECT_EQ(line, "lambda,bic,support_size,objective,converged");
  double prev = 0.0;
  int rows = 0;
  while (std::getline(table, line)) {
    const double lambda = std::stod(line.substr(0, line.find(',')));
    EXPECT_GT(lambda, prev);
    prev = lambda;
    ++rows;
  }
  EXPECT_EQ(rows, 6);

  ASSERT_EQ(run("select --grid 0.3:0.3:1 --in " + path("data.csv") + " --out " + path("one.json")).code, 0);
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(slurp(path("one.json")))["lambda"].get<double>(), 0.3);
}

TEST_F(Cli, RatesDeterministicAndIdentitySmoke) {
  fs::create_directories(path("a"));
  fs::create_directories(path("b"));
  const std::string common =
      "rates --truth tridiag:0 --penalty scad:1 --p-values 6 --n-values 100,200 --replicates 3 --lambda-scale 3 "
      "--seed 7 --out ";
  ASSERT_EQ(run(common + path("a")).code, 0);
  ASSERT_EQ(run("--workers 1 " + common + path("b")).code, 0);
  EXPECT_EQ(slurp(path("a/rates.csv")), slurp(path("b/rates.csv")));
  EXPECT_EQ(slurp(path("a/rates_summary.json")), slurp(path("b/rates_summary.json")));
  std::istringstream csv(slurp(path("a/rates.csv")));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    EXPECT_NE(line.find(",1,1,"), std::string::npos) << line;  // both recovery rates are 1
  }
}

TEST_F(Cli, RatesMissingDirectory) {
  const Outcome r = run("rates --truth tridiag:0.3 --p-values 5 --n-values 50 --replicates 1 --out " + path("nope"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(Cli, BadPenaltyExitsOne) {
  std::ofstream(path("d.csv")) << "1,2\n3,5\n4,4\n";
  const Outcome r = run("estimate --penalty mcp:0.1 --in " + path("d.csv") + " --out " + path("e.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}
