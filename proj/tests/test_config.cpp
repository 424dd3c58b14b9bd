#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/config.hpp"

using namespace lhp4d;
using namespace lhp4d::tools;

namespace fs = std::filesystem;

namespace {

ExperimentGrid parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

struct CliResult {
    int code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(LHP4D_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("lhp4d_cli_" + std::to_string(::getpid()) + "_" +
                                                     ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

}  // namespace

TEST(ParseConfig, DefaultsUseReferencePreset) {
    const auto g = parse("");
    EXPECT_EQ(g.code.preset, "paper-L3");
    EXPECT_EQ(g.trials, 1000U);
    const auto pts = g.expand();
    ASSERT_EQ(pts.size(), 1U);
    EXPECT_DOUBLE_EQ(pts[0].channel.p, 0.04);
    EXPECT_TRUE(pts[0].single_shot);
}

TEST(ParseConfig, GridIsCartesianProductInFixedOrder) {
    const auto g = parse(
        "[code]\npreset = trivial-scalar\n"
        "[channel]\np = 0.02, 0.04\nq = 0, 0.01\neta = 1, 100\n"
        "[run]\ntrials = 7\nmaster_seed = 99\ntailored = false, true\nsingle_shot = true\n"
        "[decoder]\nosd_order = 0\nschedule = serial\nvariant = min-sum\n"
        "[meta_decoder]\nmax_iterations = 5\n");
    EXPECT_EQ(g.code.preset, "trivial-scalar");
    const auto pts = g.expand();
    ASSERT_EQ(pts.size(), 16U);
    EXPECT_DOUBLE_EQ(pts[0].channel.p, 0.02);
    EXPECT_DOUBLE_EQ(pts[15].channel.p, 0.04);
    EXPECT_DOUBLE_EQ(pts[4].channel.q, 0.01);
    EXPECT_DOUBLE_EQ(pts[2].channel.eta(), 100.0);
    EXPECT_FALSE(pts[0].tailored);
    EXPECT_TRUE(pts[1].tailored);
    EXPECT_EQ(pts[0].trials, 7U);
    EXPECT_EQ(pts[0].master_seed, 99U);
    EXPECT_EQ(pts[0].data_decoder.osd_order, 0U);
    EXPECT_EQ(pts[0].data_decoder.schedule, BpSchedule::Serial);
    EXPECT_EQ(pts[0].data_decoder.variant, BpVariant::MinSum);
    EXPECT_EQ(pts[0].meta_decoder.max_iterations, 5U);
    EXPECT_EQ(pts[0].meta_decoder.variant, BpVariant::ProductSum);
}

TEST(ParseConfig, ExplicitBetaTriple) {
    const auto g = parse("[channel]\np = 0.1\nbeta_x = 1\nbeta_y = 2\nbeta_z = 7\n");
    const auto pts = g.expand();
    ASSERT_EQ(pts.size(), 1U);
    const auto pr = channel_probs(pts[0].channel);
    EXPECT_DOUBLE_EQ(pr.px, 0.01);
    EXPECT_DOUBLE_EQ(pr.py, 0.02);
    EXPECT_DOUBLE_EQ(pr.pz, 0.07);
}

TEST(ParseConfig, ErrorsAreReported) {
    const std::vector<std::string> bad = {
        "[channel]\np = abc\n",
        "[channel]\np = 1.5\n",
        "[channel]\neta = 10\nbeta_z = 3\n",
        "[channel]\nfoo = 1\n",
        "[bogus]\nx = 1\n",
        "[run]\ntrials = 0\n",
        "[run]\ntrials = -3\n",
        "[run]\ntailored = maybe\n",
        "[decoder]\nvariant = magic\n",
        "[decoder]\nmax_iterations = 0\n",
        "[code]\npreset = paper-L3\nseeds = s.txt\n",
        "[channel\np = 0.1\n",
    };
    for (const auto& text : bad) EXPECT_THROW(parse(text), ConfigError) << text;
}

TEST(ParseConfig, MalformedLineNamesTheLine) {
    try {
        parse("[run]\ntrials = 5\n[channel\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Cli, BuildThenInspect) {
    TempDir dir;
    const auto code = dir / "ref.code";
    const auto b = run_cli("build --preset paper-L3 -o " + code.string());
    ASSERT_EQ(b.code, 0) << b.out;
    EXPECT_NE(b.out.find("n = 288, k = 6"), std::string::npos) << b.out;
    const auto i = run_cli("inspect " + code.string());
    EXPECT_EQ(i.code, 0) << i.out;
    EXPECT_NE(i.out.find("status: ok"), std::string::npos) << i.out;
}

TEST(Cli, InspectFlagsBrokenCode) {
    TempDir dir;
    const auto code = dir / "scalar.code";
    ASSERT_EQ(run_cli("build --seeds trivial-scalar -o " + code.string()).code, 0);
    std::ifstream in(code);
    const CssCode good = read_code(in);
    BinaryMatrix hx = good.hx.with_flipped(0, 0);
    CssCode broken = good;
    broken.hx = hx;
    const auto bad_path = dir / "broken.code";
    {
        std::ofstream out(bad_path);
        write_code(out, broken);
    }
    const auto i = run_cli("inspect " + bad_path.string());
    EXPECT_EQ(i.code, 2) << i.out;
    EXPECT_NE(i.out.find("status: FAILED"), std::string::npos) << i.out;
}

TEST(Cli, UsageAndValidationExitCodes) {
    EXPECT_EQ(run_cli("").code, 1);
    EXPECT_EQ(run_cli("frobnicate").code, 1);
    EXPECT_EQ(run_cli("build --preset nope").code, 2);
    EXPECT_EQ(run_cli("simulate --preset paper-L3 --p 2.0 --trials 1").code, 2);
    EXPECT_EQ(run_cli("inspect /nonexistent/file.code").code, 3);
    const auto help = run_cli("--help");
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("simulate"), std::string::npos);
}

TEST(Cli, BadSeedFileReportsPosition) {
    TempDir dir;
    const auto seeds = dir / "bad.seeds";
    {
        std::ofstream out(seeds);
        out << "lift 3\nseed A\nλ(1) q\n";
    }
    const auto r = run_cli("build --seeds " + seeds.string());
    EXPECT_EQ(r.code, 2) << r.out;
    EXPECT_NE(r.out.find("line"), std::string::npos) << r.out;
}

TEST(Cli, SimulateIsDeterministicAndResumes) {
    TempDir dir;
    const auto out1 = dir / "a.csv", out2 = dir / "b.csv";
    const std::string args = "simulate --preset paper-L3 --p 0.03,0.05 --q 0.01 --eta 100 --trials 30 --seed 5 "
                             "--deterministic -j 2 -o ";
    const auto r1 = run_cli(args + out1.string());
    ASSERT_EQ(r1.code, 0) << r1.out;
    const auto r2 = run_cli(args + out2.string());
    ASSERT_EQ(r2.code, 0) << r2.out;
    const std::string a = read_file(out1);
    EXPECT_EQ(a, read_file(out2));
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 3);
    EXPECT_EQ(a.rfind(csv_header(), 0), 0U);

    // A second run finds every grid point done and appends nothing.
    const auto r3 = run_cli(args + out1.string());
    ASSERT_EQ(r3.code, 0) << r3.out;
    EXPECT_NE(r3.out.find("skip"), std::string::npos);
    EXPECT_EQ(read_file(out1), a);
}

TEST(Cli, SweepWritesEachOutput) {
    TempDir dir;
    const auto cfg = dir / "one.ini";
    const auto out = dir / "one.csv";
    {
        std::ofstream c(cfg);
        c << "[code]\npreset = paper-L3\n[channel]\np = 0.0\n[run]\ntrials = 20\noutput = " << out.string() << "\n";
    }
    const auto r = run_cli("sweep --deterministic " + cfg.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const std::string csv = read_file(out);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    EXPECT_NE(csv.find(",20,0,0,0,"), std::string::npos) << csv;
}
