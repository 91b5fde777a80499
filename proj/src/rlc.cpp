// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "dpmimo/rlc.hpp"

#include <algorithm>
#include <stdexcept>

namespace dpmimo
{

void RlcUm::enqueue(uint64_t packetId, uint32_t bytes, double arrivalMs)
{
    if (bytes == 0)
    {
        throw std::invalid_argument("RlcUm: packet must have at least one byte");
    }
    if (!m_packets.emplace(packetId, PacketState{bytes, arrivalMs, 0, 0, false, false}).second)
    {
        throw std::invalid_argument("RlcUm: duplicate packet id");
    }
    m_queue.push_back(packetId);
    m_bufferedBytes += bytes;
}

std::vector<RlcSegment> RlcUm::dequeue(uint32_t tbsBytes)
{
    std::vector<RlcSegment> segments;
    uint32_t remaining = tbsBytes;
    while (remaining > 0 && !m_queue.empty())
    {
        const uint64_t id = m_queue.front();
        PacketState& p = m_packets.at(id);
        const uint32_t take = std::min(p.size - p.dequeued, remaining);
        segments.push_back({id, take});
        p.dequeued += take;
        m_bufferedBytes -= take;
        remaining -= take;
        if (p.dequeued == p.size)
        {
            m_queue.pop_front();
        }
    }
    return segments;
}

std::vector<RlcUm::Delivered> RlcUm::onSegmentsDelivered(
    const std::vector<RlcSegment>& segments, double deliveryMs)
{
    std::vector<Delivered> completed;
    for (const RlcSegment& seg : segments)
    {
        PacketState& p = m_packets.at(seg.packetId);
        p.delivered += seg.bytes;
        if (!p.lost && !p.completed && p.delivered == p.size)
        {
            p.completed = true;
            completed.push_back({seg.packetId, p.arrivalMs, deliveryMs - p.arrivalMs});
        }
    }
    return completed;
}

std::vector<RlcUm::Lost> RlcUm::onSegmentsLost(const std::vector<RlcSegment>& segments)
{
    std::vector<Lost> lost;
    for (const RlcSegment& seg : segments)
    {
        PacketState& p = m_packets.at(seg.packetId);
        if (!p.lost && !p.completed)
        {
            p.lost = true;
            lost.push_back({seg.packetId, p.size});
        }
    }
    return lost;
}

uint64_t RlcUm::queuedOpenBytes() const
{
    uint64_t bytes = 0;
    for (const auto& [id, p] : m_packets)
    {
        if (!p.completed && !p.lost)
        {
            bytes += p.size - p.dequeued;
        }
    }
    return bytes;
}

uint64_t RlcUm::inFlightBytes() const
{
    uint64_t bytes = 0;
    for (const auto& [id, p] : m_packets)
    {
        if (!p.completed && !p.lost)
        {
            bytes += p.dequeued;
        }
    }
    return bytes;
}

} // namespace dpmimo
