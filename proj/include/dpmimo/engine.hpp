// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpmimo/antenna.hpp"
#include "dpmimo/channel.hpp"
#include "dpmimo/mac.hpp"
#include "dpmimo/phy.hpp"

namespace dpmimo
{

enum class Scenario
{
    UMi,
};

/// Downlink UDP constant bit rate source feeding the RLC bearer.
struct TrafficConfig
{
    uint32_t packetBytes = 1000;
    double offeredRateBps = 250e6; // above 2-stream capacity: full buffer
    double startS = 0.0;
    double stopS = -1.0; // < 0: until the end of the run
};

struct ScenarioConfig
{
    double distanceM = 10.0;
    Scenario scenario = Scenario::UMi;
    double fcGhz = 3.5;
    double bandwidthMhz = 20.0;
    int numerology = 0;
    int nPrb = 106;
    double gnbPowerDbm = 30.0;
    double gnbHeightM = 10.0;
    double ueHeightM = 1.5;
    ArrayConfig gnbArray;
    ArrayConfig ueArray;
    RiConfig riConfig{};
    double rho = 0.0; // inter-stream interference ratio at the receiver
    uint32_t rngRun = 1;
    double simDurationS = 2.0;
    TrafficConfig traffic{};

    double noiseFigureDb = 7.0;
    int dataSymbolsPerSlot = 12; // 14-symbol slot, 1 DL-CTRL + 1 UL-CTRL
    double overhead = 0.04;
    uint64_t coherenceSlots = 100;
    int cqiFeedbackDelaySlots = 2;
    int harqFeedbackDelaySlots = 1;
    int initialMcs = 0;
    XpdConfig xpd{};
    SchedulerMode schedulerMode = SchedulerMode::TdmaRoundRobin;

    // Extra UEs (same traffic each) exercise BeamConfId grouping; empty means
    // a single UE at distanceM.
    std::vector<double> ueDistancesM;

    bool collectMacTrace = false;
    bool collectPhyTrace = false;
    bool collectChannelTrace = false;

    ScenarioConfig();

    /// Throws std::invalid_argument when inconsistent.
    void validate() const;
};

struct MacTraceRow
{
    uint64_t slot;
    uint16_t rnti;
    int harqProcessId;
    int stream;
    bool ndi;
    int rv;
    int mcs;
    uint32_t tbsBytes;
    std::string outcome; // ack | nack | lost
};

struct PhyTraceRow
{
    uint64_t slot;
    uint16_t rnti;
    int stream;
    double sinrDb;
    int cqi;
    int ri;
    bool ack;
};

struct StatsRecord
{
    double distanceM = 0.0;
    uint32_t rngRun = 0;

    uint64_t txBytes = 0; // offered to RLC
    uint64_t rxBytes = 0; // completed packets
    uint64_t lostBytes = 0;
    uint64_t queuedBytes = 0;
    uint64_t inFlightBytes = 0;

    uint64_t txPackets = 0;
    uint64_t rxPackets = 0;
    uint64_t lostPackets = 0;

    double throughputMbps = 0.0;
    double meanDelayMs = 0.0;
    double meanJitterMs = 0.0;
    double meanRi = 0.0; // mean number of scheduled streams per grant

    uint64_t harqNewTx = 0;
    uint64_t harqRetx = 0;
    uint64_t tbDropped = 0;

    std::vector<uint8_t> riPerSlot; // 0 when no grant in the slot
    std::vector<MacTraceRow> macTrace;
    std::vector<PhyTraceRow> phyTrace;
    std::vector<ChannelTraceRow> channelTrace;
};

/// Runs one configured scenario end to end. Deterministic: (config, rngRun)
/// fully determines the result.
StatsRecord runScenario(const ScenarioConfig& config);

struct DistanceAggregate
{
    double distanceM = 0.0;
    double meanThroughputMbps = 0.0;
    double stdThroughputMbps = 0.0;
    double meanDelayMs = 0.0;
    double meanJitterMs = 0.0;
    double meanTxBytes = 0.0;
    double meanRxBytes = 0.0;
    double meanRi = 0.0;
};

struct SweepResult
{
    std::vector<StatsRecord> runs; // ordered by (distance, rngRun)
    std::vector<DistanceAggregate> aggregates;
};

/// Cartesian product of distances x rng runs, independent runs fanned out
/// over worker threads; result order is deterministic regardless of
/// completion order.
SweepResult sweep(const ScenarioConfig& base,
                  const std::vector<double>& distancesM,
                  const std::vector<uint32_t>& rngRuns,
                  unsigned jobs = 0);

} // namespace dpmimo
