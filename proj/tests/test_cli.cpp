#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("spebt_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SPEBT_CLI_PATH) + " " + args + " -q >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_cli_raw(const std::string& args) {
    const std::string cmd = std::string(SPEBT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path small_config(const fs::path& dir, std::size_t slots) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << R"({"synth": {"trajectory": {"preset": "arc", "slot_count": )" << slots
                     << R"(, "speed": 4.0}}, "eval": {"workers": 1}})";
    return p;
}

}  // namespace

TEST(Cli, HelpAndUsage) {
    EXPECT_EQ(run_cli_raw("--help"), 0);
    EXPECT_EQ(run_cli_raw(""), 2);
    EXPECT_EQ(run_cli_raw("frobnicate"), 2);
    EXPECT_EQ(run_cli_raw("track --pose-source lidar --gt x.csv"), 2);
}

TEST(Cli, ConfigErrorsExitTwo) {
    const auto dir = scratch("config");
    std::ofstream(dir / "bad.json") << R"({"tracker": {"unknown_key": 1}})";
    EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.json").string() + " --out " + dir.string()), 2);
    std::ofstream(dir / "zero.json") << R"({"synth": {"trajectory": {"slot_count": 0}}})";
    EXPECT_EQ(run_cli("simulate --config " + (dir / "zero.json").string() + " --out " + dir.string()), 2);
}

TEST(Cli, IoErrorsExitThree) {
    const auto dir = scratch("io");
    EXPECT_EQ(run_cli("simulate --config /nonexistent/c.json --out " + dir.string()), 3);
    EXPECT_EQ(run_cli("odometry --scans /nonexistent/scans --out " + dir.string()), 3);
    std::ofstream(dir / "gt.csv") << "k,t_ns,x_m,y_m,theta_rad\n0,0,0,0,zero\n";
    EXPECT_EQ(run_cli("eval --est " + (dir / "gt.csv").string() + " --gt " + (dir / "gt.csv").string() +
                      " --out " + dir.string()),
              3);
}

TEST(Cli, PipelineAndDeterminism) {
    const auto dir = scratch("pipeline");
    const auto cfg = small_config(dir, 25).string();
    const auto a = dir / "a";
    const auto b = dir / "b";
    ASSERT_EQ(run_cli("simulate --config " + cfg + " --seed 7 --out " + a.string()), 0);
    ASSERT_EQ(run_cli("simulate --config " + cfg + " --seed 7 --out " + b.string()), 0);
    EXPECT_EQ(slurp(a / "ground_truth.csv"), slurp(b / "ground_truth.csv"));
    EXPECT_EQ(slurp(a / "scans" / "000024.rscn"), slurp(b / "scans" / "000024.rscn"));

    ASSERT_EQ(run_cli("odometry --config " + cfg + " --scans " + (a / "scans").string() + " --out " +
                      a.string()),
              0);
    ASSERT_TRUE(fs::exists(a / "odometry.csv"));
    ASSERT_EQ(run_cli("track --config " + cfg + " --seed 7 --gt " + (a / "ground_truth.csv").string() +
                      " --est " + (a / "odometry.csv").string() + " --out " + (a / "trk").string()),
              0);
    ASSERT_EQ(run_cli("track --config " + cfg + " --seed 7 --pose-source gt-noise --innovation paper-literal"
                      " --gt " + (a / "ground_truth.csv").string() + " --out " + (a / "trk2").string()),
              0);
    EXPECT_TRUE(fs::exists(a / "trk" / "timeline.csv"));
    EXPECT_TRUE(fs::exists(a / "trk" / "tracking_report.json"));
    ASSERT_EQ(run_cli("mc --config " + cfg + " --seed 7 --replicates 3 --pose-source gt-noise --out " +
                      (a / "mc").string()),
              0);
    EXPECT_TRUE(fs::exists(a / "mc" / "mc_report.json"));
    EXPECT_TRUE(fs::exists(a / "mc" / "replicates.csv"));

    // Odometry source without an estimate is a configuration error.
    EXPECT_EQ(run_cli("track --config " + cfg + " --gt " + (a / "ground_truth.csv").string() + " --out " +
                      (a / "trk3").string()),
              2);
}

TEST(Cli, RunWritesAllArtifacts) {
    const auto dir = scratch("run");
    const auto cfg = small_config(dir, 20).string();
    ASSERT_EQ(run_cli("run --config " + cfg + " --seed 3 --write-scans --out " + (dir / "r").string()), 0);
    for (const char* f : {"ground_truth.csv", "odometry.csv", "timeline.csv", "tracking_report.json",
                          "pose_report.json", "drift_report.json", "manifest.json", "scans/000019.rscn"}) {
        EXPECT_TRUE(fs::exists(dir / "r" / f)) << f;
    }
    const std::string manifest = slurp(dir / "r" / "manifest.json");
    EXPECT_NE(manifest.find("\"seed\": 3"), std::string::npos) << manifest;
}
