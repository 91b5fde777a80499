// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dpmimo/amc.hpp"
#include "dpmimo/messages.hpp"
#include "dpmimo/rng.hpp"

namespace dpmimo
{

enum class RiMode
{
    Fixed,
    Adaptive,
};

struct RiConfig
{
    RiMode mode = RiMode::Adaptive;
    int fixedRi = 1;
    double threshold1Db = 7.0; // 1 -> 2 streams
    double threshold2Db = 12.0; // stay at 2 streams
};

struct RiResult
{
    int ri = 1;
    bool reportBothCqis = false;
};

/// Per-stream soft-combining state of one HARQ process: accumulated linear
/// SINR and transmission count (initial + up to 3 retransmissions).
class HarqSoftState
{
  public:
    static constexpr int kMaxTransmissions = 4;

    void reset(int stream);
    void resetAll();

    /// Adds this transmission's linear SINR to the stream's accumulator and
    /// returns the combined value in dB. Throws after the final redundancy
    /// version.
    double combine(int stream, double newSinrDb);

    double effectiveSinrDb(int stream) const;
    int transmissionCount(int stream) const
    {
        return m_txCount.at(static_cast<size_t>(stream));
    }

  private:
    std::array<double, 2> m_accumulatedLinear{0.0, 0.0};
    std::array<int, 2> m_txCount{0, 0};
};

/// Per-stream transmit power when the total is divided over the active
/// streams.
double splitTxPowerDbm(double totalDbm, int nActiveStreams);

/// SINR with tunable inter-stream interference:
/// P_co / (N + rho * P_cross), in dB. rho in [0, 1].
double computeStreamSinrDb(double coDbm,
                           double crossFromOtherStreamDbm,
                           double noiseDbm,
                           double rho);

/// Thermal noise over the allocated bandwidth plus receiver noise figure.
double noisePowerDbm(int nPrb, double noiseFigureDb, int numerology = 0);

/// Rank indicator from the per-stream data-channel SINRs. Fixed mode always
/// reports the configured value. Adaptive mode: with one active stream,
/// RI = 2 iff its SINR >= threshold1; with two, RI = 2 iff both >=
/// threshold2, otherwise RI = 1 with both CQIs flagged for reporting.
RiResult computeRi(const RiConfig& config,
                   const std::array<std::optional<double>, 2>& perStreamSinrDb);

/// Assembles the CQI+RI report; wbCqi index i maps to stream i.
DlCqiInfo buildCqiReport(uint16_t rnti,
                         const RiResult& ri,
                         const std::vector<uint8_t>& perStreamCqi);

/// Bernoulli decode of one transport block at the HARQ-combined SINR.
/// Returns true for ACK.
bool decodeTb(const TbInfo& tb,
              double effectiveSinrDb,
              RngStream& rng,
              const McsTable& table = mcsTable2());

/// Receiver-side per-UE PHY: SINR computation, HARQ soft combining and
/// decoding, CQI/RI reporting.
class UePhy
{
  public:
    struct Settings
    {
        uint16_t rnti = 1;
        double noiseDbm = -94.0;
        double rho = 0.0;
        RiConfig riConfig{};
        const McsTable* table = &mcsTable2();
        uint32_t rngRun = 1;
        int numHarqProcesses = 20;
        int maxStreams = 2; // rank the UE's subarrays can support
    };

    struct StreamRx
    {
        double coDbm = kPowerFloorDbm;
        double crossDbm = kPowerFloorDbm; // leakage from the other stream
    };

    struct SlotResult
    {
        std::vector<StreamSinrReport> sinrReports;
        std::array<std::optional<bool>, 2> ackPerStream;
        DlHarqInfo harqFeedback;
        DlCqiInfo cqiReport;
    };

    explicit UePhy(Settings settings);

    /// Processes one received DCI and its per-stream powers; decodes every
    /// scheduled stream independently and produces HARQ feedback plus the
    /// CQI+RI report for this slot.
    SlotResult receive(const DciInfo& dci,
                       const std::array<std::optional<StreamRx>, 2>& rx,
                       uint64_t slot);

    const HarqSoftState& softState(int harqProcessId) const
    {
        return m_soft.at(static_cast<size_t>(harqProcessId));
    }

  private:
    Settings m_settings;
    std::vector<HarqSoftState> m_soft;
    std::array<std::optional<uint8_t>, 2> m_lastCqi;
    RngStream m_decodeRng;
};

} // namespace dpmimo
