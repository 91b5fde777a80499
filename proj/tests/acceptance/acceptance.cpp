// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Runs every criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. The path to the dpmimo-sim
// binary is expected as argv[1] (used by the determinism criterion).

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dpmimo/channel.hpp"
#include "dpmimo/engine.hpp"
#include "dpmimo/mac.hpp"
#include "dpmimo/phy.hpp"
#include "dpmimo/units.hpp"

using namespace dpmimo;

namespace
{

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail)
{
    std::cout << "criterion " << criterion << " [" << (pass ? "PASS" : "FAIL") << "] "
              << detail << "\n";
    if (!pass)
    {
        ++g_failures;
    }
}

struct Check
{
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what)
    {
        if (!cond)
        {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

ScenarioConfig referenceConfig()
{
    return ScenarioConfig{}; // defaults are the evaluation scenario
}

std::vector<uint32_t> runList(uint32_t n)
{
    std::vector<uint32_t> runs;
    for (uint32_t r = 1; r <= n; ++r)
    {
        runs.push_back(r);
    }
    return runs;
}

double fixedRiMean(int ri, double& maxRunSeconds, uint32_t nRuns = 5)
{
    ScenarioConfig cfg = referenceConfig();
    cfg.riConfig.mode = RiMode::Fixed;
    cfg.riConfig.fixedRi = ri;
    double sum = 0.0;
    for (uint32_t run = 1; run <= nRuns; ++run)
    {
        cfg.rngRun = run;
        const auto start = std::chrono::steady_clock::now();
        sum += runScenario(cfg).throughputMbps;
        const double sec = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
        maxRunSeconds = std::max(maxRunSeconds, sec);
    }
    return sum / nRuns;
}

// --- criteria 1 and 2 -------------------------------------------------------

double g_fixed1Mean10m = 0.0;

void criterion1()
{
    Check c;
    double maxRunSeconds = 0.0;
    g_fixed1Mean10m = fixedRiMean(1, maxRunSeconds);
    std::ostringstream msg;
    msg << "saturation throughput fixed RI 1 at 10 m: " << g_fixed1Mean10m
        << " Mbps (target [100, 115]), slowest run " << maxRunSeconds << " s";
    c.require(g_fixed1Mean10m >= 100.0 && g_fixed1Mean10m <= 115.0,
              "throughput out of [100, 115] Mbps");
    c.require(maxRunSeconds < 30.0, "run exceeded 30 s");
    report(1, c.ok, msg.str() + (c.ok ? "" : " -- " + c.detail.str()));
}

void criterion2()
{
    Check c;
    double maxRunSeconds = 0.0;
    const double fixed2 = fixedRiMean(2, maxRunSeconds);
    const double ratio = fixed2 / g_fixed1Mean10m;
    std::ostringstream msg;
    msg << "multiplexing gain fixed RI 2 / RI 1: " << fixed2 << " / " << g_fixed1Mean10m
        << " = " << ratio << " (target [1.90, 2.02])";
    c.require(ratio >= 1.90 && ratio <= 2.02, "ratio out of [1.90, 2.02]");
    report(2, c.ok, msg.str() + (c.ok ? "" : " -- " + c.detail.str()));
}

// --- criteria 3 and 4 -------------------------------------------------------

const std::vector<double> kSweepDistances = {10.0, 100.0, 200.0, 300.0, 400.0, 500.0, 800.0};

std::vector<double> sweepMeans(RiMode mode, int fixedRi)
{
    ScenarioConfig cfg = referenceConfig();
    cfg.riConfig.mode = mode;
    cfg.riConfig.fixedRi = fixedRi;
    const SweepResult result = sweep(cfg, kSweepDistances, runList(20));
    std::vector<double> means;
    for (const DistanceAggregate& agg : result.aggregates)
    {
        means.push_back(agg.meanThroughputMbps);
    }
    return means;
}

void criteria3and4()
{
    const std::vector<double> fixed1 = sweepMeans(RiMode::Fixed, 1);
    const std::vector<double> fixed2 = sweepMeans(RiMode::Fixed, 2);
    const std::vector<double> adaptive = sweepMeans(RiMode::Adaptive, 1);

    double peak = 0.0;
    for (size_t i = 0; i < kSweepDistances.size(); ++i)
    {
        peak = std::max({peak, fixed1[i], fixed2[i], adaptive[i]});
    }

    Check c3;
    for (size_t i = 0; i < kSweepDistances.size(); ++i)
    {
        const double lo = std::min(fixed1[i], fixed2[i]) - 0.05 * peak;
        const double hi = std::max(fixed1[i], fixed2[i]) + 0.05 * peak;
        std::ostringstream what;
        what << "adaptive at " << kSweepDistances[i] << " m (" << adaptive[i]
             << ") outside envelope [" << lo << ", " << hi << "]";
        c3.require(adaptive[i] >= lo && adaptive[i] <= hi, what.str());
    }
    c3.require(std::abs(adaptive[0] - fixed2[0]) <= 0.05 * fixed2[0],
               "adaptive at 10 m differs from fixed RI 2 by more than 5%");
    bool strictlyBetween = false;
    for (size_t i = 0; i < kSweepDistances.size(); ++i)
    {
        if (kSweepDistances[i] < 300.0 || kSweepDistances[i] > 500.0)
        {
            continue;
        }
        const double lo = std::min(fixed1[i], fixed2[i]) + 0.02 * peak;
        const double hi = std::max(fixed1[i], fixed2[i]) - 0.02 * peak;
        if (adaptive[i] >= lo && adaptive[i] <= hi)
        {
            strictlyBetween = true;
        }
    }
    c3.require(strictlyBetween,
               "no distance in [300, 500] m where adaptive sits strictly between the "
               "fixed curves by 2% of peak");

    std::ostringstream curves;
    curves << "adaptive-RI envelope over {";
    for (size_t i = 0; i < kSweepDistances.size(); ++i)
    {
        curves << (i ? "," : "") << kSweepDistances[i];
    }
    curves << "} m; f1/f2/adaptive at 400 m: " << fixed1[4] << "/" << fixed2[4] << "/"
           << adaptive[4] << " Mbps";
    report(3, c3.ok, curves.str() + (c3.ok ? "" : " -- " + c3.detail.str()));

    Check c4;
    const double tol = tbsBytes(27, 106, 12, 0.04) * 8.0 / 1e6; // one TBS per second
    auto checkMonotone = [&](const std::vector<double>& curve, const std::string& name) {
        for (size_t i = 1; i < curve.size(); ++i)
        {
            std::ostringstream what;
            what << name << " increases from " << kSweepDistances[i - 1] << " m ("
                 << curve[i - 1] << ") to " << kSweepDistances[i] << " m (" << curve[i]
                 << ")";
            c4.require(curve[i] <= curve[i - 1] + tol, what.str());
        }
    };
    checkMonotone(fixed1, "fixed RI 1");
    checkMonotone(fixed2, "fixed RI 2");
    checkMonotone(adaptive, "adaptive RI");
    report(4, c4.ok,
           "mean throughput non-increasing with distance for all three schemes "
           "(tolerance one TBS/s = " +
               std::to_string(tol) + " Mbps)" + (c4.ok ? "" : " -- " + c4.detail.str()));
}

// --- criterion 5: channel-split property suite ------------------------------

void criterion5()
{
    const auto start = std::chrono::steady_clock::now();
    Check c;

    ChannelModel::Settings settings;
    settings.rngRun = 3;
    ChannelModel model(settings);
    model.registerNode(0, {0.0, 0.0, 10.0}, 2);
    model.registerNode(1, {50.0, 0.0, 1.5}, 2);

    // split sharing: 4 distinct entries referencing one params instance
    auto params = model.getChannelParams(0, 1, 0);
    std::set<const ChannelMatrixEntry*> entries;
    for (int tx = 0; tx < 2; ++tx)
    {
        for (int rx = 0; rx < 2; ++rx)
        {
            auto e = model.getChannelMatrix(params, 0, 1, tx, rx, 0);
            c.require(e->params.get() == params.get(),
                      "matrix entry references a different params instance");
            entries.insert(e.get());
        }
    }
    c.require(entries.size() == 4, "expected exactly 4 distinct matrix entries");

    // symmetric key identity
    c.require(model.getChannelParams(1, 0, 0).get() == params.get(),
              "params (B,A) is not the (A,B) instance");

    // same-node guard
    bool threw = false;
    try
    {
        model.getChannelParams(0, 0, 0);
    }
    catch (const std::invalid_argument&)
    {
        threw = true;
    }
    c.require(threw, "same-node request not rejected");
    c.require(!ChannelModel::sameNodeGuard(1, 1) && ChannelModel::sameNodeGuard(0, 1),
              "same-node guard predicate wrong");

    // XPD Monte-Carlo over 10^4 draws
    ChannelModel::Settings xs;
    xs.xpd.mode = XpdMode::Fixed;
    xs.xpd.fixedDb = 9.0;
    xs.coherenceSlots = 1;
    xs.rngRun = 5;
    ChannelModel xpdModel(xs);
    xpdModel.registerNode(0, {0.0, 0.0, 10.0}, 2);
    xpdModel.registerNode(1, {200.0, 0.0, 1.5}, 2);
    double co = 0.0;
    double cross = 0.0;
    for (int i = 0; i < 10000; ++i)
    {
        xpdModel.updateChannel(static_cast<uint64_t>(i));
        auto p = xpdModel.getChannelParams(0, 1, static_cast<uint64_t>(i));
        auto e = xpdModel.getChannelMatrix(p, 0, 1, 0, 1, static_cast<uint64_t>(i));
        co += std::norm(e->coPolarGain);
        cross += std::norm(e->crossPolarGain);
    }
    const double ratioDb = linearToDb(cross / co);
    c.require(std::abs(ratioDb - (-9.0)) <= 0.5,
              "ensemble cross/co ratio " + std::to_string(ratioDb) + " dB not -9 +/- 0.5");

    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(sec < 10.0, "property suite exceeded 10 s");
    std::ostringstream msg;
    msg << "channel-split properties (4 entries / 1 params, guard, symmetry, XPD MC "
        << ratioDb << " dB) in " << sec << " s";
    report(5, c.ok, msg.str() + (c.ok ? "" : " -- " + c.detail.str()));
}

// --- criterion 6: rank-adaptation state machine -----------------------------

void criterion6()
{
    Check c;

    // exhaustive table over threshold/SINR grids
    for (double t1 = -4.0; t1 <= 16.0; t1 += 2.5)
    {
        for (double t2 = -4.0; t2 <= 16.0; t2 += 2.5)
        {
            const RiConfig cfg{RiMode::Adaptive, 1, t1, t2};
            for (double s0 = -10.0; s0 <= 20.0; s0 += 1.5)
            {
                const int oneStream = computeRi(cfg, {s0, std::nullopt}).ri;
                c.require(oneStream == (s0 >= t1 ? 2 : 1), "one-stream rule violated");
                for (double s1 = -10.0; s1 <= 20.0; s1 += 1.5)
                {
                    const RiResult two = computeRi(cfg, {s0, s1});
                    const int expect = (s0 >= t2 && s1 >= t2) ? 2 : 1;
                    c.require(two.ri == expect, "two-stream rule violated");
                    c.require(two.reportBothCqis, "two-stream report must carry both CQIs");
                }
            }
        }
    }
    // fixed mode ignores SINR
    for (int ri : {1, 2})
    {
        const RiConfig cfg{RiMode::Fixed, ri, 7.0, 12.0};
        c.require(computeRi(cfg, {-50.0, std::nullopt}).ri == ri, "fixed mode not fixed");
        c.require(computeRi(cfg, {50.0, 50.0}).ri == ri, "fixed mode not fixed");
    }

    // hysteresis sequence: 8 dB single stream -> RI 2; after the 3.01 dB
    // power split both streams land at 4.99 dB < threshold2 -> RI 1 with
    // both CQIs reported
    const double noise = noisePowerDbm(106, 7.0);
    UePhy::Settings ps;
    ps.rnti = 1;
    ps.noiseDbm = noise;
    ps.rho = 1.0;
    ps.riConfig = {RiMode::Adaptive, 1, 7.0, 12.0};
    UePhy phy(ps);

    TbInfo tb;
    tb.mcs = 4;
    tb.tbsBytes = 100;
    DciInfo one;
    one.rnti = 1;
    one.harqProcessId = 0;
    one.tbPerStream[0] = tb;
    std::array<std::optional<UePhy::StreamRx>, 2> rx1{};
    rx1[0] = UePhy::StreamRx{noise + 8.0, kPowerFloorDbm};
    const auto r1 = phy.receive(one, rx1, 0);
    c.require(r1.cqiReport.ri == 2, "8 dB single stream should report RI 2");

    const double split = splitTxPowerDbm(0.0, 1) - splitTxPowerDbm(0.0, 2);
    DciInfo two;
    two.rnti = 1;
    two.harqProcessId = 1;
    two.tbPerStream[0] = tb;
    two.tbPerStream[1] = tb;
    std::array<std::optional<UePhy::StreamRx>, 2> rx2{};
    rx2[0] = UePhy::StreamRx{noise + 8.0 - split, kPowerFloorDbm};
    rx2[1] = UePhy::StreamRx{noise + 8.0 - split, kPowerFloorDbm};
    const auto r2 = phy.receive(two, rx2, 1);
    c.require(std::abs(r2.sinrReports[0].sinrDb - 4.99) < 0.01,
              "post-split SINR should be 4.99 dB");
    c.require(r2.cqiReport.ri == 1, "post-split streams should fall back to RI 1");
    c.require(r2.cqiReport.wbCqi.size() == 2, "the 2->1 switch must report both CQIs");

    report(6, c.ok,
           std::string("rank-adaptation table and hysteresis sequence") +
               (c.ok ? "" : " -- " + c.detail.str()));
}

// --- criterion 7: HARQ property suite ---------------------------------------

void criterion7()
{
    Check c;
    GnbMacScheduler::Settings s;
    GnbMacScheduler sched(s);
    sched.addUe(1, BeamConfId(BeamId(0, 120), BeamId(0, 120)));
    sched.setBufferBytes(1, 1 << 28);
    DlCqiInfo cqi;
    cqi.rnti = 1;
    cqi.ri = 2;
    cqi.wbCqi = {12, 9};

    // bootstrap first
    auto dcis = sched.scheduleSlot(0);
    c.require(dcis.size() == 1 && dcis[0].numScheduledStreams() == 1 &&
                  dcis[0].tbPerStream[0].has_value(),
              "bootstrap grant malformed");
    auto fb = sched.processHarqFeedback({1, dcis[0].harqProcessId, {true}});
    c.require(fb.processReleased, "all-ACK must release");
    sched.updateUeFromCqi(cqi);

    // mixed ACK/NACK: process kept, only the failed stream retransmitted
    dcis = sched.scheduleSlot(1);
    const int pid = dcis[0].harqProcessId;
    c.require(dcis[0].numScheduledStreams() == 2, "RI 2 grant expected");
    fb = sched.processHarqFeedback({1, pid, {true, false}});
    c.require(!fb.processReleased, "mixed feedback must keep the process");
    auto retx = sched.scheduleSlot(2);
    c.require(retx.size() == 1 && retx[0].harqProcessId == pid &&
                  retx[0].numScheduledStreams() == 1 && retx[0].tbPerStream[1].has_value(),
              "retransmission must reuse the process id for the failed stream only");
    c.require(!retx[0].tbPerStream[1]->ndi && retx[0].tbPerStream[1]->rv == 1,
              "retransmission must keep NDI off and bump RV");
    c.require(retx[0].tbPerStream[1]->mcs == dcis[0].tbPerStream[1]->mcs &&
                  retx[0].tbPerStream[1]->tbsBytes == dcis[0].tbPerStream[1]->tbsBytes,
              "retransmission must not change MCS or TBS");

    // retransmission priority: pending retx blocks new data
    sched.processHarqFeedback({1, pid, {false}});
    auto blocked = sched.scheduleSlot(3);
    c.require(blocked.size() == 1 && blocked[0].harqProcessId == pid &&
                  !blocked[0].tbPerStream[1]->ndi,
              "pending retx must outrank new data");

    // RV cap: drive to rv 3 and drop
    sched.processHarqFeedback({1, pid, {false}});
    auto rv3 = sched.scheduleSlot(4);
    c.require(rv3[0].tbPerStream[1]->rv == 3, "RV must reach 3");
    fb = sched.processHarqFeedback({1, pid, {false}});
    c.require(fb.processReleased, "NACK at RV 3 must release");
    c.require(fb.perStream.size() == 1 && fb.perStream[0].second == TbOutcome::Dropped,
              "NACK at RV 3 must drop the TB");

    // pool bound: drive 20 processes into flight
    GnbMacScheduler sched2(s);
    sched2.addUe(1, BeamConfId(BeamId(0, 120), BeamId(0, 120)));
    sched2.setBufferBytes(1, 1 << 28);
    int grants = 0;
    for (uint64_t slot = 0; slot < 25; ++slot)
    {
        grants += static_cast<int>(sched2.scheduleSlot(slot).size());
        c.require(sched2.harqProcessesInUse(1) <= 20, "more than 20 processes in use");
    }
    c.require(grants == 20, "exactly 20 grants before the pool saturates");

    // error branches
    bool threw = false;
    try
    {
        sched.processHarqFeedback({1, pid, {true}});
    }
    catch (const std::invalid_argument&)
    {
        threw = true;
    }
    c.require(threw, "feedback for a released process must be rejected");

    report(7, c.ok,
           std::string("HARQ pool, RV cap, mixed feedback, retransmission priority") +
               (c.ok ? "" : " -- " + c.detail.str()));
}

// --- criterion 8: CLI determinism -------------------------------------------

std::string readFile(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void criterion8(const std::string& cliPath)
{
    Check c;
    if (cliPath.empty())
    {
        report(8, false, "CLI path not supplied (argv[1])");
        return;
    }
    const auto base = std::filesystem::temp_directory_path() / "dpmimo_acceptance_det";
    std::filesystem::remove_all(base);
    const std::string flags =
        " --sweep-distances-m 10,100,200,300,400,500,800 --sweep-rng-runs "
        "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20 --ri-scheme adaptive";
    for (int i = 0; i < 2; ++i)
    {
        const auto dir = base / ("pass" + std::to_string(i));
        std::filesystem::create_directories(dir);
        const std::string cmd =
            cliPath + flags + " --out-dir " + dir.string() + " > /dev/null";
        const int rc = std::system(cmd.c_str());
        c.require(rc == 0, "CLI invocation failed");
    }
    const std::string csv0 = readFile(base / "pass0" / "results.csv");
    const std::string csv1 = readFile(base / "pass1" / "results.csv");
    c.require(!csv0.empty(), "empty CSV");
    c.require(csv0 == csv1, "CSV outputs differ between identical invocations");
    report(8, c.ok,
           std::string("two full-sweep CLI invocations byte-identical (") +
               std::to_string(csv0.size()) + " bytes)" +
               (c.ok ? "" : " -- " + c.detail.str()));
}

// --- criterion 9: PHY numeric checks ----------------------------------------

void criterion9()
{
    Check c;

    // exact power conservation
    for (double total : {0.0, 23.0, 30.0})
    {
        c.require(dbmToMw(splitTxPowerDbm(total, 1)) == dbmToMw(total),
                  "1-stream split must be exact");
        const double per = splitTxPowerDbm(total, 2);
        c.require(std::abs(2.0 * dbmToMw(per) - dbmToMw(total)) <
                      1e-12 * dbmToMw(total),
                  "2-stream linear sum must equal the total");
    }

    // hand values for rho = 0 and rho = 1
    c.require(std::abs(computeStreamSinrDb(-50.0, -60.0, -100.0, 0.0) - 50.0) < 1e-9,
              "rho 0 hand value");
    const double rho1 = 10.0 * std::log10(1e-5 / (1e-6 + 1e-10));
    c.require(std::abs(computeStreamSinrDb(-50.0, -60.0, -100.0, 1.0) - rho1) < 1e-9,
              "rho 1 hand value");

    // harq_combine against the linear-sum oracle
    HarqSoftState state;
    state.combine(0, 5.0);
    c.require(std::abs(state.combine(0, 0.0) -
                       10.0 * std::log10(std::pow(10.0, 0.5) + 1.0)) < 1e-9,
              "combine(5, 0) oracle");
    HarqSoftState state2;
    state2.combine(1, 5.0);
    c.require(std::abs(state2.combine(1, 5.0) -
                       10.0 * std::log10(2.0 * std::pow(10.0, 0.5))) < 1e-9,
              "combine(5, 5) oracle");

    // BLER monotone over a 0.1 dB grid for every MCS
    for (int mcs = 0; mcs < mcsTable2().size(); ++mcs)
    {
        double prev = 1.0 + 1e-9;
        for (double s = -15.0; s <= 40.0; s += 0.1)
        {
            const double b = bler(s, mcs);
            if (b > prev + 1e-15)
            {
                c.require(false, "BLER not monotone for MCS " + std::to_string(mcs));
                break;
            }
            prev = b;
        }
    }

    report(9, c.ok,
           std::string("power split, SINR, HARQ combining and BLER numeric checks") +
               (c.ok ? "" : " -- " + c.detail.str()));
}

} // namespace

int main(int argc, char** argv)
{
    const std::string cliPath = argc > 1 ? argv[1] : "";
    std::cout << "dpmimo acceptance suite\n";
    const auto start = std::chrono::steady_clock::now();

    criterion1();
    criterion2();
    criteria3and4();
    criterion5();
    criterion6();
    criterion7();
    criterion8(cliPath);
    criterion9();

    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT") << " ("
              << sec << " s)\n";
    return g_failures == 0 ? 0 : 1;
}
