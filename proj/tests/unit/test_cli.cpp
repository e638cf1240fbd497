#include <hbl_cli/cli.hpp>

#include <json.hpp>
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) { return std::string(HBL_FIXTURE_DIR) + "/" + name; }

struct Run {
  int code;
  std::string out, err;
};

Run hbl_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = hbl::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hbl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out(const std::string& sub = "") const { return (dir_ / sub).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, CheckTelegraphHolds) {
  const auto r = hbl_run({"check", fixture("telegraph.json"), "--out", out()});
  EXPECT_EQ(r.code, 0) << r.err;
  for (const char* c : {"H", "RH", "K", "D1", "D2", "D3"}) {
    const json j = load_json(dir_ / (std::string(c) + ".json"));
    EXPECT_EQ(j["report"]["verdict"], "holds") << c;
    EXPECT_EQ(j["input_sha256"].get<std::string>().size(), 64u);
    EXPECT_TRUE(j["config"].contains("grid_radial"));
    EXPECT_TRUE(j.contains("version"));
  }
  EXPECT_TRUE(fs::exists(dir_ / "summary.json"));
  EXPECT_TRUE(fs::exists(dir_ / "D1_curve.csv"));
}

TEST_F(CliTest, CheckCounterexampleExitsTwo) {
  const auto r = hbl_run({"check", fixture("jinxin_1_8.json"), "--out", out(), "--format", "csv"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(load_json(dir_ / "D3.json")["report"]["verdict"], "fails");
  EXPECT_FALSE(load_json(dir_ / "D3.json")["report"]["witnesses"].empty());
  EXPECT_EQ(load_json(dir_ / "jinxin.json")["report"]["D3_2"]["verdict"], "fails");
  EXPECT_NE(slurp(dir_ / "summary.csv").find("D3,fails"), std::string::npos);
}

TEST_F(CliTest, MalformedInputExitsOneWithLocation) {
  const auto r = hbl_run({"check", fixture("malformed_row.json"), "--out", out()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("malformed_row.json:6:18:"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownFlagExitsOne) {
  EXPECT_EQ(hbl_run({"check", fixture("telegraph.json"), "--bogus"}).code, 1);
  EXPECT_EQ(hbl_run({}).code, 1);
}

TEST_F(CliTest, CertifyTelegraph) {
  const auto r = hbl_run({"certify", fixture("telegraph.json"), "--out", out()});
  EXPECT_EQ(r.code, 0) << r.err;
  const json c = load_json(dir_ / "certificate.json")["certificate"];
  EXPECT_TRUE(c["pass"].get<bool>());
  EXPECT_GT(c["c"].get<double>(), 0.0);
  for (const char* f : {"envelope.csv", "regimes.csv", "abscissa.csv"}) EXPECT_TRUE(fs::exists(dir_ / f)) << f;
}

TEST_F(CliTest, CertifyCounterexampleAndScalar) {
  const auto r = hbl_run({"certify", fixture("jinxin_2_6.json"), "--out", out("a")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(load_json(dir_ / "a" / "certificate.json")["certificate"]["witness"]["regime"], "small");
  const auto s = hbl_run({"certify", fixture("scalar_d1.json"), "--out", out("b"), "--times", "20", "10"});
  EXPECT_EQ(s.code, 0) << s.err;
  const json c = load_json(dir_ / "b" / "certificate.json")["certificate"];
  EXPECT_NEAR(c["c_inf"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(c["C"].get<double>(), 1.0, 1e-9);
}

TEST_F(CliTest, ExpandTelegraph) {
  const auto r = hbl_run({"expand", fixture("telegraph.json"), "--out", out(), "--step", "1e-3"});
  EXPECT_EQ(r.code, 0) << r.err;
  const json j = load_json(dir_ / "expansion.json");
  EXPECT_LT(j["max_relative_deviation"].get<double>(), 1e-3);
  EXPECT_NEAR(j["expansions"][0]["small"]["small"][0]["projected"]["re"].get<double>(), -1.0, 1e-12);
}

TEST_F(CliTest, SweepWritesOneRowPerPoint) {
  const auto r = hbl_run({"sweep-jinxin", "--kappa1", "1", "3", "1", "--kappa2", "6", "8", "2", "--out", out()});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir_ / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 2);
  EXPECT_NE(csv.find("3,6,holds,holds,holds"), std::string::npos) << csv;
  EXPECT_NE(csv.find("1,8,holds,holds,fails"), std::string::npos) << csv;
  EXPECT_NE(csv.find("2,6,holds,fails,holds"), std::string::npos) << csv;
}

TEST_F(CliTest, SimulateLinearWithEnvelope) {
  const auto r = hbl_run({"simulate", fixture("sim_telegraph.json"), "--out", out()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "envelope.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "timeseries.csv"));
  const json j = load_json(dir_ / "exponents.json");
  EXPECT_TRUE(j["envelope_check"]["all_within"].get<bool>());
  EXPECT_FALSE(j["fits"].empty());
}

TEST_F(CliTest, SimulateIsDeterministic) {
  ASSERT_EQ(hbl_run({"simulate", fixture("sim_burgers.json"), "--out", out("a")}).code, 0);
  ASSERT_EQ(hbl_run({"simulate", fixture("sim_burgers.json"), "--out", out("b")}).code, 0);
  const std::string a = slurp(dir_ / "a" / "timeseries.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "timeseries.csv"));
}

TEST_F(CliTest, SimulateCflViolationExitsTwo) {
  const auto r = hbl_run({"simulate", fixture("sim_cfl.json"), "--out", out()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("CFL"), std::string::npos);
}

TEST_F(CliTest, ManifestUnknownKeyExitsOne) {
  fs::create_directories(dir_);
  const fs::path m = dir_ / "m.json";
  std::ofstream(m) << "{\n  \"system\": \"" << fixture("telegraph.json") << "\",\n  \"grid\": {\"N\": 64, \"L\": 10},\n"
                   << "  \"T\": 1,\n  \"init\": {\"kind\": \"noise\"},\n  \"speed\": 2\n}\n";
  const auto r = hbl_run({"simulate", m.string(), "--out", out("o")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":6:"), std::string::npos) << r.err;
}

TEST_F(CliTest, ReportAggregates) {
  ASSERT_EQ(hbl_run({"check", fixture("jinxin_2_6.json"), "--out", out("c")}).code, 2);
  const auto r = hbl_run({"report", out("c"), "--out", out("r")});
  EXPECT_EQ(r.code, 2);
  const json j = load_json(dir_ / "r" / "report.json");
  EXPECT_GE(j["items"].size(), 10u);
}
