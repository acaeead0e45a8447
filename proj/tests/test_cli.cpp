#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aslb/json.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace fs = std::filesystem;
using aslb::json;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

CliRun aslb_run(std::vector<std::string> args) {
    args.insert(args.begin(), "aslb");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = aslb::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("aslb_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string out(const std::string& sub) const { return (dir / sub).string(); }

    fs::path dir;
};

}  // namespace

TEST_F(CliTest, SpectrumCurveCarriesBound) {
    const CliRun r = aslb_run({"spectrum", "--family", "takagi", "--a", "0.70710678", "--b", "2", "--theta-grid",
                            "0.05:0.45:0.05", "--samples", "65537", "--centers", "5", "--out", out("s")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(dir / "s" / "curves.csv");
    EXPECT_NE(csv.find("theta,exponent,max_exponent,regression_exponent,regression_r2,bound"), std::string::npos);
    EXPECT_NE(csv.find("seed=1"), std::string::npos);
    const json rec = json::parse(slurp(dir / "s" / "run_record.json"));
    EXPECT_EQ(rec["config"]["family"], "takagi");
    EXPECT_EQ(rec["sources"]["a"], "flag");
    EXPECT_EQ(rec["sources"]["centers"], "flag");
    EXPECT_EQ(rec["sources"]["R-max"], "default");
    EXPECT_EQ(rec["files"].size(), 2u);
}

TEST_F(CliTest, PackExample) {
    const CliRun r = aslb_run({"pack", "--s", "3", "--theta", "0.5", "--n", "10", "--out", out("p")});
    ASSERT_EQ(r.code, 0) << r.err;
    const json rep = json::parse(slurp(dir / "p" / "report.json"));
    EXPECT_GT(rep["audit"]["min_pairwise_distance"].get<double>(), 1e-4);
    EXPECT_EQ(rep["seed"], 1);
    EXPECT_TRUE(fs::exists(dir / "p" / "points.csv"));
}

TEST_F(CliTest, FoldRejectsZeroSquares) {
    const CliRun r = aslb_run({"fold", "--K", "0", "--family", "takagi", "--out", out("f")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--K"), std::string::npos);
}

TEST_F(CliTest, MissingFamilyNamesTheFlag) {
    const CliRun r = aslb_run({"spectrum", "--out", out("x")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--family"), std::string::npos);
}

TEST_F(CliTest, ThetaOutsideUnitInterval) {
    EXPECT_EQ(aslb_run({"pack", "--theta", "1.5", "--out", out("x")}).code, 2);
    EXPECT_EQ(aslb_run({"spectrum", "--family", "takagi", "--theta-grid", "0,0.2", "--out", out("x")}).code, 2);
    // inside (0,1) but outside (0, (s-1)/s) is a module validation error
    EXPECT_EQ(aslb_run({"pack", "--theta", "0.9", "--out", out("x")}).code, 2);
}

TEST_F(CliTest, FlagOverridesConfigFileAndLogsConflict) {
    std::ofstream(dir / "run.cfg") << "# energy run\nq = 1.5\nm-max = 2000\nvariant=plain ; inline comment\n";
    const CliRun r = aslb_run({"energy", "--config", (dir / "run.cfg").string(), "--q", "2", "--out", out("e")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("overrides"), std::string::npos);
    const json rec = json::parse(slurp(dir / "e" / "run_record.json"));
    EXPECT_EQ(rec["config"]["q"], "2");
    EXPECT_EQ(rec["sources"]["q"], "flag");
    EXPECT_EQ(rec["config"]["m-max"], "2000");
    EXPECT_EQ(rec["sources"]["m-max"], "file");
    ASSERT_EQ(rec["conflicts"].size(), 1u);
}

TEST_F(CliTest, UnknownKeysRejected) {
    std::ofstream(dir / "bad.cfg") << "theta-grid = 0.2\n";
    const CliRun r = aslb_run({"energy", "--config", (dir / "bad.cfg").string(), "--out", out("e")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("theta-grid"), std::string::npos);
    EXPECT_EQ(aslb_run({"energy", "--nonsense", "1"}).code, 2);
    EXPECT_EQ(aslb_run({"nonsense"}).code, 2);
}

TEST_F(CliTest, ParameterViolationIsUsageError) {
    const CliRun r = aslb_run({"coholder", "--family", "takagi", "--samples", "4097", "--eta", "0.3", "--epsilon", "0.3",
                            "--out", out("c")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("parameter-violation"), std::string::npos);
}

TEST_F(CliTest, FailedAuditExitsOne) {
    // a deliberately wrong Hölder exponent puts the bound below the measured spectrum
    const CliRun r = aslb_run({"audit-upper", "--family", "takagi", "--alpha", "0.9", "--samples", "65537", "--theta-grid",
                            "0.1", "--centers", "4", "--ladders", "2", "--scales-per-ladder", "3", "--out", out("a")});
    EXPECT_EQ(r.code, 1) << r.err;
    const json rep = json::parse(slurp(dir / "a" / "report.json"));
    EXPECT_FALSE(rep["pass"].get<bool>());
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
    const std::vector<std::string> args{"coholder", "--family", "takagi", "--samples", "16385", "--jobs", "2"};
    auto a = args, b = args;
    a.insert(a.end(), {"--out", out("r1")});
    b.insert(b.end(), {"--out", out("r2")});
    ASSERT_EQ(aslb_run(a).code, 0);
    ASSERT_EQ(aslb_run(b).code, 0);
    for (const char* f : {"report.json", "curves.csv"}) EXPECT_EQ(slurp(dir / "r1" / f), slurp(dir / "r2" / f)) << f;
}

TEST_F(CliTest, GenerateThenReadBack) {
    ASSERT_EQ(aslb_run({"generate", "--family", "weierstrass", "--samples", "4097", "--format", "binary", "--out",
                        out("g")})
                  .code,
              0);
    const CliRun r = aslb_run({"boxdim", "--input", (dir / "g" / "samples.bin").string(), "--r-lo", "0.001", "--r-hi",
                            "0.05", "--r-count", "5", "--out", out("b")});
    ASSERT_EQ(r.code, 0) << r.err;
    const json rep = json::parse(slurp(dir / "b" / "report.json"));
    EXPECT_EQ(rep["meta"]["family"], "weierstrass");
    EXPECT_NEAR(rep["bound"].get<double>(), 2 - std::log(2.0) / std::log(3.0), 1e-12);
}

TEST_F(CliTest, FoldThenVerifyFromPlan) {
    ASSERT_EQ(aslb_run({"fold", "--family", "takagi", "--samples", "4097", "--K", "1", "--witness-trials", "100",
                        "--out", out("f")})
                  .code,
              0);
    const CliRun r = aslb_run({"verify-fold", "--family", "takagi", "--samples", "4097", "--plan",
                            (dir / "f" / "report.json").string(), "--holder-pairs", "2000", "--column-cap", "256",
                            "--sampled-columns", "128", "--out", out("v")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "v" / "checks.csv"));
}

TEST_F(CliTest, BvCheckAndHelp) {
    EXPECT_EQ(aslb_run({"bv-check", "--trials", "4", "--pairs", "4", "--out", out("bv")}).code, 0);
    const CliRun h = aslb_run({"--help"});
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("verify-fold"), std::string::npos);
}

TEST(CliConfig, ParseReals) {
    using aslb::cli::parse_reals;
    EXPECT_EQ(parse_reals("x", "0.1,0.2").size(), 2u);
    const auto r = parse_reals("x", "0.05:0.45:0.05");
    ASSERT_EQ(r.size(), 9u);
    EXPECT_NEAR(r.back(), 0.45, 1e-12);
    EXPECT_THROW(parse_reals("x", "a,b"), aslb::cli::UsageError);
    EXPECT_THROW(parse_reals("x", "1:0:0.1"), aslb::cli::UsageError);
}
