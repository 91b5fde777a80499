// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "dpmimo/cli.hpp"

using namespace dpmimo;

namespace
{

struct CliRun
{
    int exitCode;
    std::string out;
    std::string err;
};

CliRun invoke(std::vector<std::string> argStrings)
{
    argStrings.insert(argStrings.begin(), "dpmimo-sim");
    std::vector<const char*> argv;
    for (const auto& s : argStrings)
    {
        argv.push_back(s.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = runCli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path freshDir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

size_t countLines(const std::string& s)
{
    size_t n = 0;
    for (const char c : s)
    {
        if (c == '\n')
        {
            ++n;
        }
    }
    return n;
}

} // namespace

TEST_CASE("defaults reproduce the reference scenario")
{
    const CliArgs args;
    const ScenarioConfig cfg = toScenarioConfig(args);
    CHECK(cfg.distanceM == 10.0);
    CHECK(cfg.riConfig.mode == RiMode::Adaptive);
    CHECK(cfg.riConfig.threshold1Db == 7.0);
    CHECK(cfg.riConfig.threshold2Db == 12.0);
    CHECK(cfg.fcGhz == 3.5);
    CHECK(cfg.bandwidthMhz == 20.0);
    CHECK(cfg.nPrb == 106);
    CHECK(cfg.gnbPowerDbm == 30.0);
    CHECK(cfg.gnbHeightM == 10.0);
    CHECK(cfg.ueHeightM == 1.5);
    CHECK(cfg.gnbArray.rowsM == 2);
    CHECK(cfg.gnbArray.colsN == 2);
    CHECK(cfg.gnbArray.polarizationsP == 2);
    CHECK(cfg.gnbArray.pattern == ElementPattern::Directional3gpp);
    CHECK(cfg.ueArray.polarizationsP == 2);
    CHECK(cfg.ueArray.pattern == ElementPattern::Isotropic);
    CHECK(cfg.traffic.packetBytes == 1000);
    CHECK(cfg.rho == 0.0);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("usage errors exit with code 2")
{
    SUBCASE("fixed-ri with the adaptive scheme names both flags")
    {
        const auto r = invoke({"--ri-scheme", "adaptive", "--fixed-ri", "2"});
        CHECK(r.exitCode == 2);
        CHECK(r.err.find("--fixed-ri") != std::string::npos);
        CHECK(r.err.find("--ri-scheme") != std::string::npos);
    }
    SUBCASE("unknown flag")
    {
        CHECK(invoke({"--no-such-flag"}).exitCode == 2);
    }
    SUBCASE("out-of-range values")
    {
        CHECK(invoke({"--rho", "1.5"}).exitCode == 2);
        CHECK(invoke({"--mcs-table", "1"}).exitCode == 2);
        CHECK(invoke({"--scenario", "RMa"}).exitCode == 2);
        CHECK(invoke({"--fixed-ri", "3", "--ri-scheme", "fixed"}).exitCode == 2);
    }
    SUBCASE("traces in sweep mode")
    {
        CHECK(invoke({"--sweep-distances-m", "10,20", "--mac-trace", "/tmp/x.csv"})
                  .exitCode == 2);
    }
    SUBCASE("help exits 0")
    {
        const auto r = invoke({"--help"});
        CHECK(r.exitCode == 0);
        CHECK(r.out.find("--distance-m") != std::string::npos);
        CHECK(r.out.find("--threshold1-db") != std::string::npos);
    }
}

TEST_CASE("single run writes summary and csv")
{
    const auto dir = freshDir("dpmimo_cli_single");
    const auto r = invoke({"--duration-s", "0.05", "--out-dir", dir.string()});
    REQUIRE(r.exitCode == 0);
    CHECK(r.out.find("Throughput") != std::string::npos);

    const std::string csv = slurp(dir / "results.csv");
    CHECK(csv.rfind("distance_m,rng_run,thr_mbps,delay_ms,jitter_ms,tx_bytes,rx_bytes,"
                    "mean_ri\n",
                    0) == 0);
    CHECK(countLines(csv) == 2); // header + one data row
    CHECK(!slurp(dir / "summary.txt").empty());
}

TEST_CASE("sweep writes data rows plus one aggregate row per distance")
{
    const auto dir = freshDir("dpmimo_cli_sweep");
    const auto r = invoke({"--duration-s", "0.05", "--out-dir", dir.string(),
                           "--sweep-distances-m", "10,100", "--sweep-rng-runs", "1,2,3"});
    REQUIRE(r.exitCode == 0);
    const std::string csv = slurp(dir / "results.csv");
    CHECK(countLines(csv) == 1 + 6 + 2);
    CHECK(csv.find(",mean,") != std::string::npos);
}

TEST_CASE("reruns produce byte-identical csv")
{
    const auto dirA = freshDir("dpmimo_cli_detA");
    const auto dirB = freshDir("dpmimo_cli_detB");
    const std::vector<std::string> flags = {"--duration-s", "0.05", "--sweep-distances-m",
                                            "10,300", "--sweep-rng-runs", "1,2"};
    auto withDir = [&](const std::string& d) {
        auto f = flags;
        f.push_back("--out-dir");
        f.push_back(d);
        return f;
    };
    REQUIRE(invoke(withDir(dirA.string())).exitCode == 0);
    REQUIRE(invoke(withDir(dirB.string())).exitCode == 0);
    CHECK(slurp(dirA / "results.csv") == slurp(dirB / "results.csv"));
    CHECK(slurp(dirA / "results.csv") != "");
}

TEST_CASE("key=value config file feeds the parser")
{
    const auto dir = freshDir("dpmimo_cli_cfg");
    const auto cfgPath = dir / "run.conf";
    {
        std::ofstream f(cfgPath);
        f << "distance-m=42.5\n";
        f << "duration-s=0.05\n";
        f << "rng-run=3\n";
    }
    const auto r = invoke({"--config", cfgPath.string(), "--out-dir", dir.string()});
    REQUIRE(r.exitCode == 0);
    const std::string csv = slurp(dir / "results.csv");
    CHECK(csv.find("42.500,3,") != std::string::npos);
}

TEST_CASE("trace files are written for single runs")
{
    const auto dir = freshDir("dpmimo_cli_trace");
    const auto r = invoke({"--duration-s", "0.05", "--out-dir", dir.string(),
                           "--mac-trace", (dir / "mac.csv").string(), "--phy-trace",
                           (dir / "phy.csv").string(), "--channel-trace",
                           (dir / "chan.csv").string()});
    REQUIRE(r.exitCode == 0);
    CHECK(slurp(dir / "mac.csv")
              .rfind("slot,rnti,harq_pid,stream,ndi,rv,mcs,tbs_bytes,outcome\n", 0) == 0);
    CHECK(slurp(dir / "phy.csv").rfind("slot,rnti,stream,sinr_db,cqi,ri,ack\n", 0) == 0);
    CHECK(slurp(dir / "chan.csv")
              .rfind("slot,node_pair,tx_part,rx_part,los,shadowing_db,xpd_db,co_db,"
                     "cross_db\n",
                     0) == 0);
    CHECK(countLines(slurp(dir / "mac.csv")) > 1);
    CHECK(countLines(slurp(dir / "chan.csv")) > 1);
}

TEST_CASE("unwritable output directory exits with code 1")
{
    const auto r = invoke({"--duration-s", "0.05", "--out-dir", "/dev/null/nope"});
    CHECK(r.exitCode == 1);
    CHECK(r.err.find("error") != std::string::npos);
}
