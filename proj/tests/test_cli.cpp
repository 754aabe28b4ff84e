#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "anovagp/benchmarks.hpp"
#include "anovagp/io.hpp"

using namespace anovagp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(ANOVAGP_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "anovagp_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    const double pi = std::numbers::pi;
    json u = {{"kind", "uniform"}, {"a", -pi}, {"b", pi}};
    json doc = {{"problem", {{"marginals", {u, u, u}}}},
                {"kernel", {{"kind", "gaussian"}}},
                {"design", {{"n", 30}, {"restarts", 1}}},
                {"mle", {{"starts", 3}}},
                {"estimation", {{"m", 300}, {"N_s", 5}, {"K", 4}, {"subsets", "all"}, {"consistent", true}}},
                {"seed", 2},
                {"output_dir", "out"}};
    write_json(dir_ / "config.json", doc);
    doc["problem"]["copula"] = {{"kind", "gaussian"},
                                {"correlation", {{1, 0.9, -0.9}, {0.9, 1, 0.9}, {-0.9, 0.9, 1}}}};
    write_json(dir_ / "bad_copula.json", doc);
    doc = json::parse(std::ifstream(dir_ / "config.json"));
    for (int i = 0; i < 2; ++i) {
      doc["problem"]["marginals"].push_back(u);
    }
    doc["estimation"]["consistent"] = false;
    write_json(dir_ / "p5.json", doc);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void make_data() {
    ASSERT_EQ(run("design --config " + path("config.json")), 0);
    const CsvTable x = read_csv(dir_ / "out" / "design.csv");
    write_csv(dir_ / "y.csv", {"y"}, ishigami_function()(x.data));
    write_csv(dir_ / "y_short.csv", {"y"}, ishigami_function()(x.data.topRows(20)));
  }

  fs::path dir_;
};

} // namespace

TEST_F(Cli, FitAnalyzeValidate) {
  make_data();
  const std::string cfg = " --config " + path("config.json");
  ASSERT_EQ(run("fit" + cfg + " --design " + path("out/design.csv") + " --outputs " + path("y.csv")), 0);
  ASSERT_TRUE(fs::exists(dir_ / "out" / "model.json"));
  ASSERT_EQ(run("analyze" + cfg + " --model " + path("out/model.json")), 0);
  const json first = read_json(dir_ / "out" / "results.json");
  EXPECT_EQ(first["indices"].size(), 7U);
  for (const char* key : {"mode", "mean", "q025", "q975", "realizations", "delta_variances", "variance_part",
                          "covariance_part"}) {
    EXPECT_TRUE(first["indices"]["{1}"].contains(key)) << key;
  }
  ASSERT_EQ(run("analyze" + cfg + " --model " + path("out/model.json")), 0);
  EXPECT_EQ(read_json(dir_ / "out" / "results.json"), first);
  ASSERT_EQ(run("validate --model " + path("out/model.json") + " --inputs " + path("out/design.csv") +
                " --outputs " + path("y.csv") + " --output-dir " + path("val")),
            0);
  EXPECT_NEAR(read_json(dir_ / "val" / "validation.json")["q2"].get<double>(), 1.0, 1e-8);
}

TEST_F(Cli, ExitCodes) {
  make_data();
  EXPECT_EQ(run("fit --config " + path("config.json") + " --design " + path("out/design.csv") + " --outputs " +
                path("y_short.csv")),
            2);
  EXPECT_EQ(run("fit --config " + path("bad_copula.json") + " --design " + path("out/design.csv") +
                " --outputs " + path("y.csv")),
            1);
  ASSERT_EQ(run("fit --config " + path("config.json") + " --design " + path("out/design.csv") + " --outputs " +
                path("y.csv")),
            0);
  EXPECT_EQ(run("analyze --config " + path("p5.json") + " --model " + path("out/model.json")), 1);
  EXPECT_EQ(run("bench unknown"), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  {
    std::ofstream c(dir_ / "constant.csv");
    c << "y\n";
    for (int i = 0; i < 30; ++i) c << "1\n";
  }
  EXPECT_EQ(run("fit --config " + path("config.json") + " --design " + path("out/design.csv") + " --outputs " +
                path("constant.csv")),
            2);
}

TEST_F(Cli, CoverageSmoke) {
  EXPECT_EQ(run("bench coverage --reps 1 --n 30 --m 300 --ns 5 --k 4 --mle-starts 2 --output-dir " + path("cov")), 0);
  const json cov = read_json(dir_ / "cov" / "coverage.json");
  EXPECT_EQ(cov["repetitions"].get<int>(), 1);
}
