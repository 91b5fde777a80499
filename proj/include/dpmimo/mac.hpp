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

namespace dpmimo
{

enum class SchedulerMode
{
    TdmaRoundRobin,
    OfdmaBeamGrouped, // UEs sharing a slot must have equal BeamConfId
};

enum class TbOutcome
{
    Acked,
    PendingRetx,
    Dropped, // NACK after the final redundancy version
};

/// Scheduler-side view of one UE.
struct UeSchedInfo
{
    uint16_t rnti = 0;
    int lastRi = 1;
    std::array<std::optional<uint8_t>, 2> lastCqiPerStream{};
    uint64_t bufferBytes = 0;
    bool bootstrapDone = false;
    int preferredStream = 0; // stream with the better CQI, used when RI = 1
    BeamConfId beamConf;
};

struct FeedbackResult
{
    bool processReleased = false;
    std::vector<std::pair<int, TbOutcome>> perStream; // (stream, outcome)
};

/// Downlink scheduler: one DCI per UE per slot carrying up to two per-stream
/// transport blocks under a single HARQ process id; independent per-stream
/// retransmissions with retransmission priority over new data.
class GnbMacScheduler
{
  public:
    struct Settings
    {
        int nPrb = 106;
        int dataSymbols = 12;
        int symStart = 1;
        double overhead = 0.04;
        SchedulerMode mode = SchedulerMode::TdmaRoundRobin;
        const McsTable* table = &mcsTable2();
        int initialMcs = 0; // used until the first CQI report arrives
        int numHarqProcesses = 20;
    };

    explicit GnbMacScheduler(Settings settings);

    void addUe(uint16_t rnti, BeamConfId beamConf);
    void setBufferBytes(uint16_t rnti, uint64_t bytes);

    /// Applies a CQI+RI report: stores RI and per-stream CQIs, completes the
    /// bootstrap phase, recomputes the preferred stream (argmax CQI, ties to
    /// stream 0).
    void updateUeFromCqi(const DlCqiInfo& report);

    /// Applies per-stream HARQ feedback: all-ACK releases the process; a
    /// NACKed stream below the RV cap goes back to pending; a NACK at RV 3
    /// drops the transport block.
    FeedbackResult processHarqFeedback(const DlHarqInfo& feedback);

    /// Emits the slot's grants: pending retransmissions first, then new data
    /// (bootstrap stream, RI-driven stream count, better-CQI stream at
    /// RI = 1).
    std::vector<DciInfo> scheduleSlot(uint64_t slot);

    const UeSchedInfo& ueInfo(uint16_t rnti) const;
    int harqProcessesInUse(uint16_t rnti) const;

  private:
    enum class TbPhase
    {
        InFlight,
        PendingRetx,
        Done,
    };

    struct TbState
    {
        TbInfo tb;
        TbPhase phase = TbPhase::InFlight;
    };

    struct HarqProcess
    {
        bool inUse = false;
        uint64_t startedSlot = 0;
        std::array<std::optional<TbState>, 2> stream;
    };

    struct UeContext
    {
        UeSchedInfo info;
        std::vector<HarqProcess> pool;
    };

    UeContext& ueContext(uint16_t rnti);
    const UeContext& ueContext(uint16_t rnti) const;
    bool hasPendingRetx(const UeContext& ue) const;
    int findFreeProcess(const UeContext& ue) const;
    std::optional<DciInfo> serveUe(UeContext& ue, uint64_t slot, int nPrbForUe);
    std::vector<bool> prbMaskFor(int offset, int count) const;

    Settings m_settings;
    std::vector<UeContext> m_ues; // insertion order; RR cursor walks this
    size_t m_rrCursor = 0;
};

/// The per-stream beam pair identifying a UE's beam configuration for OFDMA
/// grouping.
BeamConfId beamConfOf(const std::array<std::optional<BeamId>, 2>& beamPerStream);

} // namespace dpmimo
