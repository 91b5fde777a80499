// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "dpmimo/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>

namespace dpmimo
{

namespace
{

std::string fmt(const char* format, double value)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, value);
    return buf;
}

std::string csvRow(const StatsRecord& rec)
{
    std::string row;
    row += fmt("%.3f", rec.distanceM);
    row += "," + std::to_string(rec.rngRun);
    row += "," + fmt("%.6f", rec.throughputMbps);
    row += "," + fmt("%.6f", rec.meanDelayMs);
    row += "," + fmt("%.6f", rec.meanJitterMs);
    row += "," + std::to_string(rec.txBytes);
    row += "," + std::to_string(rec.rxBytes);
    row += "," + fmt("%.6f", rec.meanRi);
    return row;
}

std::string csvAggregateRow(const DistanceAggregate& agg)
{
    std::string row;
    row += fmt("%.3f", agg.distanceM);
    row += ",mean";
    row += "," + fmt("%.6f", agg.meanThroughputMbps);
    row += "," + fmt("%.6f", agg.meanDelayMs);
    row += "," + fmt("%.6f", agg.meanJitterMs);
    row += "," + fmt("%.1f", agg.meanTxBytes);
    row += "," + fmt("%.1f", agg.meanRxBytes);
    row += "," + fmt("%.6f", agg.meanRi);
    return row;
}

void writeSummary(const SweepResult& result, std::ostream& os)
{
    for (const StatsRecord& rec : result.runs)
    {
        os << "distance " << fmt("%.3f", rec.distanceM) << " m, rngRun " << rec.rngRun
           << "\n";
        os << "  TX bytes:     " << rec.txBytes << "\n";
        os << "  RX bytes:     " << rec.rxBytes << "\n";
        os << "  Throughput:   " << fmt("%.6f", rec.throughputMbps) << " Mbps\n";
        os << "  Mean delay:   " << fmt("%.6f", rec.meanDelayMs) << " ms\n";
        os << "  Mean jitter:  " << fmt("%.6f", rec.meanJitterMs) << " ms\n";
        os << "  Mean RI:      " << fmt("%.4f", rec.meanRi) << "\n";
    }
    if (result.runs.size() > 1)
    {
        os << "aggregates (mean over rng runs)\n";
        for (const DistanceAggregate& agg : result.aggregates)
        {
            os << "  distance " << fmt("%.3f", agg.distanceM) << " m: throughput "
               << fmt("%.6f", agg.meanThroughputMbps) << " Mbps (std "
               << fmt("%.6f", agg.stdThroughputMbps) << "), mean RI "
               << fmt("%.4f", agg.meanRi) << "\n";
        }
    }
}

void writeTraces(const CliArgs& args, const StatsRecord& rec)
{
    if (!args.phyTracePath.empty())
    {
        std::ofstream f(args.phyTracePath, std::ios::trunc);
        if (!f)
        {
            throw std::runtime_error("cannot open " + args.phyTracePath);
        }
        f << "slot,rnti,stream,sinr_db,cqi,ri,ack\n";
        for (const PhyTraceRow& row : rec.phyTrace)
        {
            f << row.slot << ',' << row.rnti << ',' << row.stream << ','
              << fmt("%.6f", row.sinrDb) << ',' << row.cqi << ',' << row.ri << ','
              << (row.ack ? 1 : 0) << '\n';
        }
    }
    if (!args.macTracePath.empty())
    {
        std::ofstream f(args.macTracePath, std::ios::trunc);
        if (!f)
        {
            throw std::runtime_error("cannot open " + args.macTracePath);
        }
        f << "slot,rnti,harq_pid,stream,ndi,rv,mcs,tbs_bytes,outcome\n";
        for (const MacTraceRow& row : rec.macTrace)
        {
            f << row.slot << ',' << row.rnti << ',' << row.harqProcessId << ','
              << row.stream << ',' << (row.ndi ? 1 : 0) << ',' << row.rv << ','
              << row.mcs << ',' << row.tbsBytes << ',' << row.outcome << '\n';
        }
    }
    if (!args.channelTracePath.empty())
    {
        std::ofstream f(args.channelTracePath, std::ios::trunc);
        if (!f)
        {
            throw std::runtime_error("cannot open " + args.channelTracePath);
        }
        f << "slot,node_pair,tx_part,rx_part,los,shadowing_db,xpd_db,co_db,cross_db\n";
        for (const ChannelTraceRow& row : rec.channelTrace)
        {
            f << row.slot << ',' << row.pair.a << '-' << row.pair.b << ','
              << row.txPartition << ',' << row.rxPartition << ',' << (row.los ? 1 : 0)
              << ',' << fmt("%.6f", row.shadowingDb) << ',' << fmt("%.6f", row.xpdDb) << ','
              << fmt("%.6f", row.coDb) << ',' << fmt("%.6f", row.crossDb) << '\n';
        }
    }
}

} // namespace

ScenarioConfig toScenarioConfig(const CliArgs& args)
{
    ScenarioConfig cfg;
    cfg.distanceM = args.distanceM;
    cfg.riConfig.mode = args.riScheme == "fixed" ? RiMode::Fixed : RiMode::Adaptive;
    cfg.riConfig.fixedRi = args.fixedRi;
    cfg.riConfig.threshold1Db = args.threshold1Db;
    cfg.riConfig.threshold2Db = args.threshold2Db;
    cfg.rngRun = args.rngRun;
    cfg.rho = args.rho;
    cfg.simDurationS = args.durationS;
    cfg.traffic.packetBytes = args.packetBytes;
    cfg.traffic.offeredRateBps = args.offeredRateMbps * 1e6;
    cfg.collectPhyTrace = !args.phyTracePath.empty();
    cfg.collectMacTrace = !args.macTracePath.empty();
    cfg.collectChannelTrace = !args.channelTracePath.empty();
    return cfg;
}

void emitOutputs(const SweepResult& result, const std::string& outDir, std::ostream& out)
{
    std::error_code ec;
    std::filesystem::create_directories(outDir, ec);

    const std::filesystem::path dir(outDir);
    std::ofstream csv(dir / "results.csv", std::ios::trunc);
    if (!csv)
    {
        throw std::runtime_error("cannot write to output directory " + outDir);
    }
    csv << "distance_m,rng_run,thr_mbps,delay_ms,jitter_ms,tx_bytes,rx_bytes,mean_ri\n";
    for (const StatsRecord& rec : result.runs)
    {
        csv << csvRow(rec) << "\n";
    }
    if (result.runs.size() > 1)
    {
        for (const DistanceAggregate& agg : result.aggregates)
        {
            csv << csvAggregateRow(agg) << "\n";
        }
    }

    std::ofstream summary(dir / "summary.txt", std::ios::trunc);
    if (!summary)
    {
        throw std::runtime_error("cannot write to output directory " + outDir);
    }
    writeSummary(result, summary);
    writeSummary(result, out);
}

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CliArgs args;
    CLI::App app{"Slot-level downlink simulator of 2-stream MIMO spatial multiplexing "
                 "over dual-polarized antenna subarrays"};
    app.set_config("--config", "", "Read options from a key=value file");

    app.add_option("--distance-m", args.distanceM, "gNB-UE distance in meters")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--ri-scheme", args.riScheme, "Rank indicator scheme")
        ->capture_default_str()
        ->check(CLI::IsMember({"fixed", "adaptive"}));
    auto* fixedRiOpt =
        app.add_option("--fixed-ri", args.fixedRi, "RI value when --ri-scheme is fixed")
            ->capture_default_str()
            ->check(CLI::IsMember({1, 2}));
    app.add_option("--threshold1-db", args.threshold1Db,
                   "Adaptive RI: SINR threshold to go from 1 to 2 streams")
        ->capture_default_str()
        ->check(CLI::Number);
    app.add_option("--threshold2-db", args.threshold2Db,
                   "Adaptive RI: SINR threshold to stay at 2 streams")
        ->capture_default_str()
        ->check(CLI::Number);
    app.add_option("--rng-run", args.rngRun, "Random run number")->capture_default_str();
    app.add_option("--scenario", args.scenario, "3GPP propagation scenario")
        ->capture_default_str()
        ->check(CLI::IsMember({"UMi"}));
    app.add_option("--mcs-table", args.mcsTable, "NR MCS table")
        ->capture_default_str()
        ->check(CLI::IsMember({2}));
    app.add_option("--rho", args.rho, "Inter-stream interference ratio at the receiver")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--duration-s", args.durationS, "Simulated time per run in seconds")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--out-dir", args.outDir, "Directory for summary.txt and results.csv")
        ->capture_default_str()
        ->envname("DPMIMO_OUT_DIR");
    app.add_option("--sweep-distances-m", args.sweepDistancesM,
                   "Distance list: run the full (distance x rng-run) grid")
        ->delimiter(',');
    app.add_option("--sweep-rng-runs", args.sweepRngRuns,
                   "Rng run list for sweep mode")
        ->delimiter(',');
    app.add_option("--packet-bytes", args.packetBytes, "CBR packet size")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--offered-rate-mbps", args.offeredRateMbps, "CBR offered rate")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--jobs", args.jobs, "Worker threads for sweep mode (0 = auto)")
        ->capture_default_str();
    app.add_option("--phy-trace", args.phyTracePath,
                   "Write the per-slot PHY trace CSV to this path (single run only)");
    app.add_option("--mac-trace", args.macTracePath,
                   "Write the MAC trace CSV to this path (single run only)");
    app.add_option("--channel-trace", args.channelTracePath,
                   "Write the channel trace CSV to this path (single run only)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        out << app.help();
        return 0;
    }
    catch (const CLI::ParseError& e)
    {
        err << e.what() << "\n" << app.help();
        return 2;
    }

    if (fixedRiOpt->count() > 0 && args.riScheme != "fixed")
    {
        err << "--fixed-ri requires --ri-scheme fixed (got --ri-scheme " << args.riScheme
            << ")\n";
        return 2;
    }
    const bool wantsTraces = !args.phyTracePath.empty() || !args.macTracePath.empty() ||
                             !args.channelTracePath.empty();
    if (args.sweepMode() && wantsTraces)
    {
        err << "--phy-trace/--mac-trace/--channel-trace require a single run, not a sweep\n";
        return 2;
    }

    try
    {
        const ScenarioConfig base = toScenarioConfig(args);
        std::vector<double> distances =
            args.sweepDistancesM.empty() ? std::vector<double>{args.distanceM}
                                         : args.sweepDistancesM;
        std::vector<uint32_t> runs = args.sweepRngRuns.empty()
                                         ? std::vector<uint32_t>{args.rngRun}
                                         : args.sweepRngRuns;
        const SweepResult result = sweep(base, distances, runs, args.jobs);
        emitOutputs(result, args.outDir, out);
        if (!args.sweepMode() && wantsTraces)
        {
            writeTraces(args, result.runs.front());
        }
        return 0;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace dpmimo
