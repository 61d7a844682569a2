#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lcq/parallel.hpp"
#include "lcq_cli/cli.hpp"

namespace lcq::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("lcq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    write("gauss.json", R"({"kind":"quadratic","dim":2})");
    write("ball.json", R"({"kind":"indicator_ball","dim":2,"radius":1})");
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int call(std::vector<std::string> args) {
    out_.str({});
    err_.str({});
    return run(args, out_, err_);
  }
  nlohmann::json out_json() const { return nlohmann::json::parse(out_.str()); }
  nlohmann::json err_json() const { return nlohmann::json::parse(err_.str()); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, QuermassReportsValueAndProvenance) {
  ASSERT_EQ(call({"quermass", "--f", path("gauss.json"), "--j", "0"}), 0) << err_.str();
  const auto j = out_json();
  EXPECT_EQ(j["schema"], "lcq/1");
  EXPECT_NEAR(j["value"].get<double>(), 2.0 * 3.141592653589793, 1e-9);
  EXPECT_TRUE(j.contains("stderr"));
  EXPECT_TRUE(j["warnings"].is_array());
}

TEST_F(CliTest, MonteCarloNeedsSeed) {
  EXPECT_EQ(call({"quermass", "--f", path("gauss.json"), "--j", "1", "--mode", "mc"}), 2);
  EXPECT_EQ(err_json()["error"]["type"], "config");
}

TEST_F(CliTest, MissingFileIsConfigError) {
  EXPECT_EQ(call({"total-mass", "--f", path("nope.json")}), 2);
  EXPECT_EQ(err_json()["error"]["type"], "config");
}

TEST_F(CliTest, UnknownSubcommandFails) { EXPECT_EQ(call({"frobnicate"}), 2); }

TEST_F(CliTest, ConjugateWritesOutFile) {
  ASSERT_EQ(call({"conjugate", "--f", path("gauss.json"), "--nodes", "17", "--refine", "--out", path("conj.json")}), 0)
      << err_.str();
  std::ifstream in(path("conj.json"));
  EXPECT_EQ(nlohmann::json::parse(in)["command"], "conjugate");
}

TEST_F(CliTest, GridResultWritesLoadableSidecar) {
  ASSERT_EQ(call({"inf-conv", "--f", path("gauss.json"), "--g", path("ball.json"), "--nodes", "33", "--out",
                  path("conv.json")}),
            0)
      << err_.str();
  std::ifstream in(path("conv.json"));
  const auto j = nlohmann::json::parse(in);
  ASSERT_EQ(j["value"]["kind"], "grid");
  EXPECT_TRUE(fs::exists(dir_ / j["value"]["file"].get<std::string>()));
}

TEST_F(CliTest, MixedBothReportsGap) {
  ASSERT_EQ(call({"mixed-quermass", "--f", path("gauss.json"), "--g", path("gauss.json"), "--j", "0", "--method",
                  "both", "--nodes", "33"}),
            0)
      << err_.str();
  const auto j = out_json();
  EXPECT_TRUE(j["results"].contains("fd"));
  EXPECT_TRUE(j["results"].contains("representation"));
  EXPECT_LT(j["relative_gap"].get<double>(), 0.02);
}

TEST_F(CliTest, ProjectOnAxis) {
  ASSERT_EQ(call({"project", "--f", path("ball.json"), "--axes", "0", "--nodes", "17"}), 0) << err_.str();
  EXPECT_EQ(out_json()["command"], "project");
}

TEST_F(CliTest, BpCheck) {
  ASSERT_EQ(call({"bp-check", "--f", path("gauss.json"), "--i", "1", "--mode", "mc", "--samples", "16", "--seed",
                  "4"}),
            0)
      << err_.str();
  EXPECT_TRUE(out_json().contains("lhs"));
}

TEST(VerifyBattery, AllRowsPassAndAreThreadInvariant) {
  std::string serial, parallel;
  {
    ScopedThreadCount one(1);
    serial = verify_csv(verify_battery(42));
  }
  {
    ScopedThreadCount four(4);
    parallel = verify_csv(verify_battery(42));
  }
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(serial.find(",false"), std::string::npos) << serial;
}

}  // namespace
}  // namespace lcq::cli
