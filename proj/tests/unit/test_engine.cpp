// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <set>

#include <stdexcept>

#include <doctest.h>

#include "dpmimo/engine.hpp"

using namespace dpmimo;

namespace
{

ScenarioConfig shortRun(double durationS = 0.5)
{
    ScenarioConfig cfg;
    cfg.simDurationS = durationS;
    return cfg;
}

bool sameStats(const StatsRecord& a, const StatsRecord& b)
{
    return a.txBytes == b.txBytes && a.rxBytes == b.rxBytes &&
           a.lostBytes == b.lostBytes && a.throughputMbps == b.throughputMbps &&
           a.meanDelayMs == b.meanDelayMs && a.meanJitterMs == b.meanJitterMs &&
           a.meanRi == b.meanRi && a.riPerSlot == b.riPerSlot &&
           a.harqNewTx == b.harqNewTx && a.harqRetx == b.harqRetx &&
           a.tbDropped == b.tbDropped;
}

} // namespace

TEST_CASE("zero traffic produces no grants and zero throughput")
{
    ScenarioConfig cfg = shortRun(0.2);
    cfg.traffic.offeredRateBps = 0.0;
    cfg.collectMacTrace = true;
    const StatsRecord stats = runScenario(cfg);
    CHECK(stats.txBytes == 0);
    CHECK(stats.rxBytes == 0);
    CHECK(stats.throughputMbps == 0.0);
    CHECK(stats.meanRi == 0.0);
    CHECK(stats.macTrace.empty());
}

TEST_CASE("determinism: identical config and run give bit-identical records")
{
    ScenarioConfig cfg = shortRun(0.3);
    cfg.distanceM = 300.0;
    cfg.rngRun = 11;
    const StatsRecord a = runScenario(cfg);
    const StatsRecord b = runScenario(cfg);
    CHECK(sameStats(a, b));

    cfg.rngRun = 12;
    const StatsRecord c = runScenario(cfg);
    CHECK(!sameStats(a, c));
}

TEST_CASE("enabling trace consumers never perturbs the results")
{
    ScenarioConfig plain = shortRun(0.3);
    plain.distanceM = 400.0;
    plain.rngRun = 4;
    ScenarioConfig traced = plain;
    traced.collectMacTrace = true;
    traced.collectPhyTrace = true;
    traced.collectChannelTrace = true;
    const StatsRecord a = runScenario(plain);
    const StatsRecord b = runScenario(traced);
    CHECK(sameStats(a, b));
    CHECK(!b.macTrace.empty());
    CHECK(!b.phyTrace.empty());
    CHECK(!b.channelTrace.empty());
}

TEST_CASE("byte conservation holds at run end")
{
    for (double distance : {10.0, 400.0, 800.0})
    {
        ScenarioConfig cfg = shortRun(0.3);
        cfg.distanceM = distance;
        cfg.riConfig.mode = RiMode::Adaptive;
        const StatsRecord stats = runScenario(cfg);
        CHECK(stats.txBytes ==
              stats.rxBytes + stats.lostBytes + stats.queuedBytes + stats.inFlightBytes);
        CHECK(stats.rxBytes <= stats.txBytes);
    }
}

TEST_CASE("fixed RI 1 saturates at the max-MCS transport block rate")
{
    ScenarioConfig cfg = shortRun(0.5);
    cfg.riConfig.mode = RiMode::Fixed;
    cfg.riConfig.fixedRi = 1;
    cfg.collectMacTrace = true;
    const StatsRecord stats = runScenario(cfg);

    // steady state at 10 m: MCS 27, one 13565-byte TB per slot, no failures
    uint64_t steadyBytes = 0;
    uint64_t steadySlots = 0;
    for (const MacTraceRow& row : stats.macTrace)
    {
        if (row.slot >= 100 && row.slot < 400)
        {
            CHECK(row.mcs == 27);
            CHECK(row.outcome == "ack");
            CHECK(row.stream == 0);
            steadyBytes += row.tbsBytes;
            ++steadySlots;
        }
    }
    CHECK(steadySlots == 300);
    CHECK(steadyBytes == 300 * tbsBytes(27, 106, 12, 0.04));
    CHECK(stats.meanRi == doctest::Approx(1.0));
    CHECK(stats.throughputMbps > 100.0);
    CHECK(stats.throughputMbps < 115.0);
    // constant service rate: consecutive delivery delays barely move
    CHECK(stats.meanJitterMs < 0.5);
    CHECK(stats.meanDelayMs > 0.0);
}

TEST_CASE("two fixed streams double the one-stream rate")
{
    ScenarioConfig cfg1 = shortRun(0.5);
    cfg1.riConfig.mode = RiMode::Fixed;
    cfg1.riConfig.fixedRi = 1;
    ScenarioConfig cfg2 = cfg1;
    cfg2.riConfig.fixedRi = 2;
    const double t1 = runScenario(cfg1).throughputMbps;
    const double t2 = runScenario(cfg2).throughputMbps;
    CHECK(t2 / t1 > 1.9);
    CHECK(t2 / t1 < 2.05);
}

TEST_CASE("slot causality: bootstrap lasts exactly the CQI feedback delay")
{
    ScenarioConfig cfg = shortRun(0.1);
    cfg.riConfig.mode = RiMode::Fixed;
    cfg.riConfig.fixedRi = 2;
    cfg.cqiFeedbackDelaySlots = 3;
    cfg.collectMacTrace = true;
    const StatsRecord stats = runScenario(cfg);
    std::map<uint64_t, int> streamsPerSlot;
    for (const MacTraceRow& row : stats.macTrace)
    {
        ++streamsPerSlot[row.slot];
    }
    // grants exist every slot; single stream until the report lands at slot 3
    CHECK(streamsPerSlot[0] == 1);
    CHECK(streamsPerSlot[1] == 1);
    CHECK(streamsPerSlot[2] == 1);
    CHECK(streamsPerSlot[3] == 2);
    CHECK(stats.riPerSlot[2] == 1);
    CHECK(stats.riPerSlot[3] == 2);
}

TEST_CASE("adaptive RI tracks fixed RI 2 in excellent conditions")
{
    ScenarioConfig adaptive = shortRun(0.5);
    adaptive.riConfig.mode = RiMode::Adaptive;
    ScenarioConfig fixed2 = shortRun(0.5);
    fixed2.riConfig.mode = RiMode::Fixed;
    fixed2.riConfig.fixedRi = 2;
    const double ta = runScenario(adaptive).throughputMbps;
    const double tf = runScenario(fixed2).throughputMbps;
    CHECK(ta == doctest::Approx(tf).epsilon(0.05));
}

TEST_CASE("OFDMA beam grouping schedules co-beam UEs together")
{
    ScenarioConfig cfg = shortRun(0.1);
    cfg.schedulerMode = SchedulerMode::OfdmaBeamGrouped;
    cfg.collectMacTrace = true;

    SUBCASE("same position UEs share every slot")
    {
        cfg.ueDistancesM = {100.0, 100.0};
        const StatsRecord stats = runScenario(cfg);
        std::map<uint64_t, std::set<uint16_t>> perSlot;
        for (const MacTraceRow& row : stats.macTrace)
        {
            perSlot[row.slot].insert(row.rnti);
        }
        REQUIRE(!perSlot.empty());
        for (const auto& [slot, rntis] : perSlot)
        {
            CHECK(rntis.size() == 2);
        }
    }
    SUBCASE("different beams never share a slot")
    {
        cfg.ueDistancesM = {100.0, 250.0};
        const StatsRecord stats = runScenario(cfg);
        std::map<uint64_t, std::set<uint16_t>> perSlot;
        for (const MacTraceRow& row : stats.macTrace)
        {
            perSlot[row.slot].insert(row.rnti);
        }
        REQUIRE(!perSlot.empty());
        for (const auto& [slot, rntis] : perSlot)
        {
            CHECK(rntis.size() == 1);
        }
    }
}

TEST_CASE("sweep aggregates are the arithmetic means, ordered deterministically")
{
    ScenarioConfig base = shortRun(0.2);
    const SweepResult result = sweep(base, {100.0, 10.0}, {2, 1}, 2);
    REQUIRE(result.runs.size() == 4);
    REQUIRE(result.aggregates.size() == 2);
    // sorted by (distance, run)
    CHECK(result.runs[0].distanceM == 10.0);
    CHECK(result.runs[0].rngRun == 1);
    CHECK(result.runs[1].rngRun == 2);
    CHECK(result.runs[2].distanceM == 100.0);
    CHECK(result.aggregates[0].distanceM == 10.0);
    CHECK(result.aggregates[0].meanThroughputMbps ==
          doctest::Approx((result.runs[0].throughputMbps + result.runs[1].throughputMbps) /
                          2.0));

    // thread fan-out does not change results
    const SweepResult serial = sweep(base, {100.0, 10.0}, {2, 1}, 1);
    for (size_t i = 0; i < 4; ++i)
    {
        CHECK(serial.runs[i].throughputMbps == result.runs[i].throughputMbps);
    }

    CHECK_THROWS_AS(sweep(base, {}, {1}), std::invalid_argument);
}

TEST_CASE("config validation rejects inconsistent setups")
{
    ScenarioConfig cfg;
    cfg.nPrb = 100;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ScenarioConfig{};
    cfg.numerology = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ScenarioConfig{};
    cfg.rho = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ScenarioConfig{};
    cfg.ueArray.polarizationsP = 1;
    cfg.ueArray.polSlantAnglesDeg = {0.0};
    cfg.riConfig.mode = RiMode::Fixed;
    cfg.riConfig.fixedRi = 2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ScenarioConfig{};
    CHECK_NOTHROW(cfg.validate());
}
