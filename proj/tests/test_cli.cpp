#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "lvbc/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    fs::path dir;
};

CliRun run_cli(const std::string& name, const std::string& args) {
    const fs::path dir = fs::temp_directory_path() / ("lvbc_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cmd = std::string(LVBC_CLI_PATH) + " --out-dir " + dir.string() + " " + args + " > " +
                            (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, dir};
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = fs::temp_directory_path() / ("lvbc_cfg_" + name + ".json");
    std::ofstream(p) << body;
    return p;
}

lvbc::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return lvbc::json::parse(in);
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

}  // namespace

TEST(Cli, UnknownSubcommandIsUsageError) {
    EXPECT_EQ(run_cli("unknown", "frobnicate").code, 2);
    EXPECT_EQ(run_cli("badflag", "simulate --config x.json --bogus").code, 2);
    EXPECT_EQ(run_cli("nosub", "").code, 2);
}

TEST(Cli, ConfigErrorsExitTwo) {
    EXPECT_EQ(run_cli("missing", "simulate --config /nonexistent/config.json").code, 2);
    const auto bad = write_config("unknown_key", R"({"version":1,"L":4,"n":41,"a":1.5,"b":3.5,"colour":"red"})");
    EXPECT_EQ(run_cli("unknown_key", "simulate --config " + bad.string()).code, 2);
    const auto syntax = write_config("syntax", "{not json");
    EXPECT_EQ(run_cli("syntax", "simulate --config " + syntax.string()).code, 2);
    EXPECT_EQ(run_cli("bracket", "threshold b --a 1.5 --L 8 --lo 3.4 --hi 3.5 --dx 0.1").code, 2);
}

TEST(Cli, SimulateWritesCsvAndSummary) {
    const auto cfg = write_config("sim", R"({"version":1,"L":4,"n":41,"a":1.5,"b":3.5,"scheme":"ImexCN",
        "t_end":2,"snapshot_stride":0.5,"init":{"y1":1,"y2":0},"control":{"u1":0,"u2":1}})");
    const auto r = run_cli("sim", "simulate --config " + cfg.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(first_line(r.dir / "trajectory.csv"), "t,x,y1,y2");
    const auto j = read_json(r.dir / "summary.json");
    EXPECT_EQ(j["config"]["n"], 41);
    EXPECT_EQ(j["config"]["scheme"], "ImexCN");
    EXPECT_EQ(j["config"]["control"]["y2_left"]["value"], 1.0);
    EXPECT_TRUE(j["final"].contains("interior"));
}

TEST(Cli, GlobalOverridesApply) {
    const auto cfg = write_config("override", R"({"version":1,"L":4,"n":41,"a":1.5,"b":3.5,"t_end":1,
        "init":{"y1":0.5,"y2":0.5},"control":{"u1":0,"u2":1}})");
    const auto r = run_cli("override", "--grid-n 21 --scheme ImexCN --t-end 0.5 simulate --config " + cfg.string());
    ASSERT_EQ(r.code, 0);
    const auto j = read_json(r.dir / "summary.json");
    EXPECT_EQ(j["config"]["n"], 21);
    EXPECT_EQ(j["config"]["t_end"], 0.5);
    EXPECT_EQ(j["config"]["scheme"], "ImexCN");
}

TEST(Cli, PortraitSchema) {
    const auto r = run_cli("portrait", "--threads 2 ode portrait --a 1.5 --b 3.5 --density 6");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(first_line(r.dir / "portrait.csv"), "w1_0,w2_0,class");
    const auto j = read_json(r.dir / "portrait.json");
    EXPECT_TRUE(j.dump().find("Saddle") != std::string::npos);
}

TEST(Cli, NumericalFailureExitsThree) {
    const auto cfg = write_config("steady_short", R"({"version":1,"L":8,"n":81,"a":1.5,"b":3.5,"scheme":"ImexCN",
        "init":{"y1":1,"y2":0},"control":{"u1":0,"u2":1},"t_max":1})");
    const auto r = run_cli("steady_short", "steady --config " + cfg.string());
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(read_json(r.dir / "steady.json")["outcome"]["classification"], "NonConverged");
}

TEST(Cli, VerifyReportsPassFail) {
    const auto r = run_cli("verify_neumann", "verify neumann --n 41 --L 4");
    EXPECT_EQ(r.code, 0);
    const auto j = read_json(r.dir / "verify_neumann_basin.json");
    EXPECT_EQ(j["pass"], true);
    EXPECT_EQ(j["config"]["n"], 41);
}
