// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

namespace dpmimo
{

struct RlcSegment
{
    uint64_t packetId;
    uint32_t bytes;
};

/// Unacknowledged-mode RLC over one bearer: byte-stream segmentation into
/// transport blocks and reassembly on delivery. UM itself never retransmits;
/// bytes are lost only when MAC HARQ exhausts its redundancy versions, and a
/// packet with any lost byte never completes.
class RlcUm
{
  public:
    struct Delivered
    {
        uint64_t packetId;
        double arrivalMs;
        double delayMs;
    };

    struct Lost
    {
        uint64_t packetId;
        uint32_t bytes;
    };

    void enqueue(uint64_t packetId, uint32_t bytes, double arrivalMs);

    /// Takes up to tbsBytes from the head of the queue, splitting packets as
    /// needed.
    std::vector<RlcSegment> dequeue(uint32_t tbsBytes);

    /// Marks segment bytes delivered; returns packets completed by this call
    /// (out-of-order tolerant, duplicates impossible by construction).
    std::vector<Delivered> onSegmentsDelivered(const std::vector<RlcSegment>& segments,
                                               double deliveryMs);

    /// Marks segment bytes lost; returns packets newly declared lost.
    std::vector<Lost> onSegmentsLost(const std::vector<RlcSegment>& segments);

    /// Raw queue depth as the scheduler sees it (a packet already declared
    /// lost may still have queued bytes; they are transmitted regardless).
    uint64_t bufferedBytes() const
    {
        return m_bufferedBytes;
    }

    /// Undequeued bytes of packets that are still deliverable.
    uint64_t queuedOpenBytes() const;

    /// Dequeued bytes of packets that are still deliverable: in HARQ flight
    /// or held for reassembly. queuedOpenBytes() + inFlightBytes() together
    /// cover every byte of every open packet.
    uint64_t inFlightBytes() const;

  private:
    struct PacketState
    {
        uint32_t size = 0;
        double arrivalMs = 0.0;
        uint32_t dequeued = 0;
        uint32_t delivered = 0;
        bool lost = false;
        bool completed = false;
    };

    std::unordered_map<uint64_t, PacketState> m_packets;
    std::deque<uint64_t> m_queue;
    uint64_t m_bufferedBytes = 0;
};

} // namespace dpmimo
