#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "heavytail/cli.hpp"
#include "heavytail/config.hpp"

namespace heavytail {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("heavytail_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, ValidateAcceptsShippedConfigs) {
  for (const char* name : {"geometric.json", "degenerate.json", "two_state_d2.json"}) {
    EXPECT_EQ(run_cli({"validate", "--config", testing::config_path(name)}).code, cli::kOk) << name;
  }
}

TEST_F(CliTest, ValidateRejectsReducibleChain) {
  auto raw = read_json_file(testing::config_path("two_state_d2.json"));
  raw["H"] = {{1.0, 0.0}, {0.0, 1.0}};
  std::ofstream(path("reducible.json")) << raw.dump();
  const auto r = run_cli({"validate", "--config", path("reducible.json")});
  EXPECT_EQ(r.code, cli::kValidation);
  EXPECT_NE(r.err.find("chain not irreducible"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({"simulate", "--bogus"}).code, cli::kValidation);
  EXPECT_EQ(run_cli({"validate", "--config", path("missing.json")}).code, cli::kValidation);
  EXPECT_EQ(run_cli({}).code, cli::kValidation);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kOk);
}

TEST_F(CliTest, SimulateIsReproducibleAcrossRunsAndWorkers) {
  const std::string cfg = testing::config_path("two_state_d2.json");
  for (const char* mode : {"path", "stationary"}) {
    std::vector<std::string> base{"simulate", "--config", cfg, "--mode", mode, "--seed", "9", "--steps", "3000",
                                  "--burn-in", "100", "--reps", "3000"};
    auto with = [&](const std::string& out, const std::string& workers) {
      auto a = base;
      a.insert(a.end(), {"--out", out, "--workers", workers});
      if (std::string(mode) == "stationary") a.insert(a.end(), {"--depth", "12"});
      return a;
    };
    ASSERT_EQ(run_cli(with(path("a.csv"), "1")).code, cli::kOk);
    ASSERT_EQ(run_cli(with(path("b.csv"), "1")).code, cli::kOk);
    ASSERT_EQ(run_cli(with(path("c.csv"), "8")).code, cli::kOk);
    const auto a = slurp(path("a.csv"));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(path("b.csv"))) << mode;
    EXPECT_EQ(a, slurp(path("c.csv"))) << mode;
    const auto ma = read_json_file(path("a.csv") + ".manifest.json");
    const auto mc = read_json_file(path("c.csv") + ".manifest.json");
    EXPECT_EQ(ma.at("manifest_hash"), mc.at("manifest_hash"));
  }
}

TEST_F(CliTest, ReportListsMissingInputs) {
  const auto r = run_cli({"report", "--out-prefix", path("nothing")});
  EXPECT_EQ(r.code, cli::kValidation);
  EXPECT_NE(r.err.find("_theorem.json"), std::string::npos);
  EXPECT_NE(r.err.find("_remainder.csv"), std::string::npos);
}

TEST_F(CliTest, VerifyThenReportOnDegenerateModel) {
  const std::string prefix = path("deg");
  const auto v = run_cli({"verify", "--config", testing::config_path("degenerate.json"), "--cones",
                          testing::config_path("degenerate_cones.json"), "--reps-theory", "1000",
                          "--reps-empirical", "200000", "--reps-contraction", "2000", "--horizon", "20",
                          "--m-max", "3", "--out-prefix", prefix});
  ASSERT_EQ(v.code, cli::kOk) << v.err;
  ASSERT_EQ(run_cli({"simulate", "--config", testing::config_path("degenerate.json"), "--mode", "stationary",
                     "--depth", "0", "--reps", "5000", "--out", path("deg_draws.csv")})
                .code,
            cli::kOk);
  ASSERT_EQ(run_cli({"estimate", "--in", path("deg_draws.csv"), "--alpha", "1", "--levels", "10,20",
                     "--out", prefix + "_estimates.csv"})
                .code,
            cli::kOk);
  const auto r = run_cli({"report", "--out-prefix", prefix});
  ASSERT_EQ(r.code, cli::kOk) << r.err;

  const auto summary = read_json_file(prefix + "_summary.json");
  EXPECT_EQ(summary.at("theorem"), read_json_file(prefix + "_theorem.json"));
  EXPECT_EQ(summary.at("assumptions"), read_json_file(prefix + "_assumptions.json"));
  for (const char* t : {"theorem", "moments", "remainder", "estimates"}) EXPECT_TRUE(summary["tables"].contains(t)) << t;
  const auto& rows = summary["tables"]["theorem"]["rows"];
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].at("cone_id"), "all_T");
  EXPECT_NEAR(rows[0].at("theo").get<double>(), 7.0 / 6.0, 1e-12);
}

TEST_F(CliTest, GeometricStrictVerifyPasses) {
  const auto v = run_cli({"verify", "--config", testing::config_path("geometric.json"), "--cones",
                          testing::config_path("geometric_cones.json"), "--depth", "40", "--reps-theory", "100",
                          "--reps-empirical", "1000000", "--reps-contraction", "2000", "--horizon", "20",
                          "--m-max", "3", "--strict", "--out-prefix", path("geo")});
  EXPECT_EQ(v.code, cli::kOk) << v.err;
  const auto doc = read_json_file(path("geo") + "_theorem.json");
  EXPECT_TRUE(doc.at("strict").at("passed").get<bool>());
}

}  // namespace
}  // namespace heavytail
