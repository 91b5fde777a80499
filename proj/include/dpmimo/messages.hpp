// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dpmimo/antenna.hpp"

namespace dpmimo
{

/// Per-stream transport block descriptor inside a DCI.
struct TbInfo
{
    int mcs = 0;
    bool ndi = true;   // new-data indicator; true implies rv == 0
    int rv = 0;        // redundancy version, 0..3
    uint32_t tbsBytes = 0;
};

/// One downlink grant. A single HARQ process id covers every scheduled
/// stream; an absent per-stream entry means that stream is not scheduled.
struct DciInfo
{
    uint16_t rnti = 0;
    uint64_t slot = 0;
    int symStart = 1;
    int numSym = 12;
    std::vector<bool> prbMask;
    int harqProcessId = 0;
    std::array<std::optional<TbInfo>, 2> tbPerStream;
    BeamConfId beamConf;

    int numScheduledStreams() const
    {
        return static_cast<int>(tbPerStream[0].has_value()) +
               static_cast<int>(tbPerStream[1].has_value());
    }
};

/// Per-stream ACK/NACK, aligned with the referenced DCI's scheduled streams
/// in ascending stream order.
struct DlHarqInfo
{
    uint16_t rnti = 0;
    int harqProcessId = 0;
    std::vector<bool> ackPerStream;
};

/// Wideband CQI report; index i of wbCqi maps to stream i. Carries the RI.
struct DlCqiInfo
{
    uint16_t rnti = 0;
    std::vector<uint8_t> wbCqi;
    uint8_t ri = 1;
};

struct StreamSinrReport
{
    int streamIndex = 0;
    double sinrDb = 0.0;
    uint64_t slot = 0;
};

} // namespace dpmimo
