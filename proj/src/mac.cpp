// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "dpmimo/mac.hpp"

#include <algorithm>
#include <stdexcept>

namespace dpmimo
{

GnbMacScheduler::GnbMacScheduler(Settings settings)
    : m_settings(settings)
{
    if (m_settings.nPrb < 1 || m_settings.dataSymbols < 1 || m_settings.dataSymbols > 14)
    {
        throw std::invalid_argument("GnbMacScheduler: invalid allocation geometry");
    }
    if (m_settings.numHarqProcesses < 1)
    {
        throw std::invalid_argument("GnbMacScheduler: need at least one HARQ process");
    }
}

void GnbMacScheduler::addUe(uint16_t rnti, BeamConfId beamConf)
{
    for (const UeContext& ue : m_ues)
    {
        if (ue.info.rnti == rnti)
        {
            throw std::invalid_argument("GnbMacScheduler: duplicate RNTI");
        }
    }
    UeContext ctx;
    ctx.info.rnti = rnti;
    ctx.info.beamConf = beamConf;
    ctx.pool.resize(static_cast<size_t>(m_settings.numHarqProcesses));
    m_ues.push_back(std::move(ctx));
}

GnbMacScheduler::UeContext& GnbMacScheduler::ueContext(uint16_t rnti)
{
    for (UeContext& ue : m_ues)
    {
        if (ue.info.rnti == rnti)
        {
            return ue;
        }
    }
    throw std::out_of_range("GnbMacScheduler: unknown RNTI");
}

const GnbMacScheduler::UeContext& GnbMacScheduler::ueContext(uint16_t rnti) const
{
    for (const UeContext& ue : m_ues)
    {
        if (ue.info.rnti == rnti)
        {
            return ue;
        }
    }
    throw std::out_of_range("GnbMacScheduler: unknown RNTI");
}

const UeSchedInfo& GnbMacScheduler::ueInfo(uint16_t rnti) const
{
    return ueContext(rnti).info;
}

int GnbMacScheduler::harqProcessesInUse(uint16_t rnti) const
{
    const UeContext& ue = ueContext(rnti);
    return static_cast<int>(
        std::count_if(ue.pool.begin(), ue.pool.end(),
                      [](const HarqProcess& p) { return p.inUse; }));
}

void GnbMacScheduler::setBufferBytes(uint16_t rnti, uint64_t bytes)
{
    ueContext(rnti).info.bufferBytes = bytes;
}

void GnbMacScheduler::updateUeFromCqi(const DlCqiInfo& report)
{
    UeContext& ue = ueContext(report.rnti);
    if (report.ri != 1 && report.ri != 2)
    {
        throw std::invalid_argument("GnbMacScheduler: RI must be 1 or 2");
    }
    ue.info.lastRi = report.ri;
    for (size_t i = 0; i < report.wbCqi.size() && i < 2; ++i)
    {
        ue.info.lastCqiPerStream[i] = report.wbCqi[i];
    }
    ue.info.bootstrapDone = true;
    if (ue.info.lastCqiPerStream[0] && ue.info.lastCqiPerStream[1])
    {
        ue.info.preferredStream =
            *ue.info.lastCqiPerStream[1] > *ue.info.lastCqiPerStream[0] ? 1 : 0;
    }
    else
    {
        ue.info.preferredStream = 0;
    }
}

FeedbackResult GnbMacScheduler::processHarqFeedback(const DlHarqInfo& feedback)
{
    UeContext& ue = ueContext(feedback.rnti);
    if (feedback.harqProcessId < 0 ||
        feedback.harqProcessId >= static_cast<int>(ue.pool.size()))
    {
        throw std::out_of_range("GnbMacScheduler: HARQ process id out of range");
    }
    HarqProcess& process = ue.pool[static_cast<size_t>(feedback.harqProcessId)];
    if (!process.inUse)
    {
        throw std::invalid_argument("GnbMacScheduler: feedback for an unused HARQ process");
    }

    std::vector<int> inFlight;
    for (int stream = 0; stream < 2; ++stream)
    {
        const auto& st = process.stream[static_cast<size_t>(stream)];
        if (st && st->phase == TbPhase::InFlight)
        {
            inFlight.push_back(stream);
        }
    }
    if (feedback.ackPerStream.size() != inFlight.size())
    {
        throw std::invalid_argument(
            "GnbMacScheduler: feedback length does not match the scheduled streams");
    }

    FeedbackResult result;
    for (size_t i = 0; i < inFlight.size(); ++i)
    {
        const int stream = inFlight[i];
        TbState& st = *process.stream[static_cast<size_t>(stream)];
        if (feedback.ackPerStream[i])
        {
            st.phase = TbPhase::Done;
            result.perStream.emplace_back(stream, TbOutcome::Acked);
        }
        else if (st.tb.rv < 3)
        {
            st.phase = TbPhase::PendingRetx;
            result.perStream.emplace_back(stream, TbOutcome::PendingRetx);
        }
        else
        {
            st.phase = TbPhase::Done;
            result.perStream.emplace_back(stream, TbOutcome::Dropped);
        }
    }

    const bool anyOpen = std::any_of(process.stream.begin(), process.stream.end(),
                                     [](const std::optional<TbState>& st) {
                                         return st && st->phase != TbPhase::Done;
                                     });
    if (!anyOpen)
    {
        process = HarqProcess{};
        result.processReleased = true;
    }
    return result;
}

bool GnbMacScheduler::hasPendingRetx(const UeContext& ue) const
{
    for (const HarqProcess& p : ue.pool)
    {
        if (!p.inUse)
        {
            continue;
        }
        for (const auto& st : p.stream)
        {
            if (st && st->phase == TbPhase::PendingRetx)
            {
                return true;
            }
        }
    }
    return false;
}

int GnbMacScheduler::findFreeProcess(const UeContext& ue) const
{
    for (size_t i = 0; i < ue.pool.size(); ++i)
    {
        if (!ue.pool[i].inUse)
        {
            return static_cast<int>(i);
        }
    }
    return -1;
}

std::vector<bool> GnbMacScheduler::prbMaskFor(int offset, int count) const
{
    std::vector<bool> mask(static_cast<size_t>(m_settings.nPrb), false);
    for (int i = offset; i < offset + count && i < m_settings.nPrb; ++i)
    {
        mask[static_cast<size_t>(i)] = true;
    }
    return mask;
}

std::optional<DciInfo> GnbMacScheduler::serveUe(UeContext& ue, uint64_t slot, int nPrbForUe)
{
    DciInfo dci;
    dci.rnti = ue.info.rnti;
    dci.slot = slot;
    dci.symStart = m_settings.symStart;
    dci.numSym = m_settings.dataSymbols;
    dci.beamConf = ue.info.beamConf;

    if (hasPendingRetx(ue))
    {
        // Retransmission priority: serve the oldest process with failed
        // streams; only the failed streams are rescheduled, with the same
        // MCS and TBS, NDI unset and RV incremented.
        int pid = -1;
        uint64_t oldest = ~0ULL;
        for (size_t i = 0; i < ue.pool.size(); ++i)
        {
            const HarqProcess& p = ue.pool[i];
            if (!p.inUse)
            {
                continue;
            }
            const bool pending = std::any_of(p.stream.begin(), p.stream.end(),
                                             [](const std::optional<TbState>& st) {
                                                 return st &&
                                                        st->phase == TbPhase::PendingRetx;
                                             });
            if (pending && p.startedSlot < oldest)
            {
                oldest = p.startedSlot;
                pid = static_cast<int>(i);
            }
        }
        HarqProcess& process = ue.pool[static_cast<size_t>(pid)];
        dci.harqProcessId = pid;
        for (int stream = 0; stream < 2; ++stream)
        {
            auto& st = process.stream[static_cast<size_t>(stream)];
            if (st && st->phase == TbPhase::PendingRetx)
            {
                st->tb.rv += 1;
                st->tb.ndi = false;
                st->phase = TbPhase::InFlight;
                dci.tbPerStream[static_cast<size_t>(stream)] = st->tb;
            }
        }
        return dci;
    }

    if (ue.info.bufferBytes == 0)
    {
        return std::nullopt;
    }
    const int pid = findFreeProcess(ue);
    if (pid < 0)
    {
        return std::nullopt; // no free HARQ process: skipped this slot
    }

    std::vector<int> streams;
    if (!ue.info.bootstrapDone)
    {
        // Before the first CQI report only the first subarray's stream is
        // used, whatever the UE may be capable of.
        streams = {0};
    }
    else if (ue.info.lastRi == 2 && ue.info.beamConf.beamPerStream[1].has_value())
    {
        streams = {0, 1};
    }
    else if (ue.info.lastCqiPerStream[0] && ue.info.lastCqiPerStream[1])
    {
        streams = {ue.info.preferredStream};
    }
    else
    {
        streams = {0};
    }

    dci.harqProcessId = pid;
    HarqProcess& process = ue.pool[static_cast<size_t>(pid)];
    process.inUse = true;
    process.startedSlot = slot;
    for (const int stream : streams)
    {
        const auto& cqi = ue.info.lastCqiPerStream[static_cast<size_t>(stream)];
        const auto& otherCqi = ue.info.lastCqiPerStream[static_cast<size_t>(1 - stream)];
        int mcs = m_settings.initialMcs;
        if (cqi)
        {
            mcs = mcsFromCqi(*cqi, *m_settings.table);
        }
        else if (otherCqi)
        {
            mcs = mcsFromCqi(*otherCqi, *m_settings.table);
        }
        TbInfo tb;
        tb.mcs = mcs;
        tb.ndi = true;
        tb.rv = 0;
        tb.tbsBytes = tbsBytes(mcs, nPrbForUe, m_settings.dataSymbols, m_settings.overhead,
                               *m_settings.table);
        process.stream[static_cast<size_t>(stream)] = TbState{tb, TbPhase::InFlight};
        dci.tbPerStream[static_cast<size_t>(stream)] = tb;
    }
    return dci;
}

std::vector<DciInfo> GnbMacScheduler::scheduleSlot(uint64_t slot)
{
    std::vector<DciInfo> dcis;
    if (m_ues.empty())
    {
        return dcis;
    }

    auto servable = [this](const UeContext& ue) {
        return hasPendingRetx(ue) ||
               (ue.info.bufferBytes > 0 && findFreeProcess(ue) >= 0);
    };

    // Round-robin walk from the cursor for the first servable UE.
    int first = -1;
    for (size_t step = 0; step < m_ues.size(); ++step)
    {
        const size_t idx = (m_rrCursor + step) % m_ues.size();
        if (servable(m_ues[idx]))
        {
            first = static_cast<int>(idx);
            break;
        }
    }
    if (first < 0)
    {
        return dcis;
    }
    m_rrCursor = (static_cast<size_t>(first) + 1) % m_ues.size();

    if (m_settings.mode == SchedulerMode::TdmaRoundRobin)
    {
        auto dci = serveUe(m_ues[static_cast<size_t>(first)], slot, m_settings.nPrb);
        if (dci)
        {
            dci->prbMask = prbMaskFor(0, m_settings.nPrb);
            dcis.push_back(std::move(*dci));
        }
        return dcis;
    }

    // OFDMA: every servable UE sharing the first UE's beam configuration is
    // scheduled in this slot, splitting the PRBs equally (remainder to the
    // lowest RNTIs).
    std::vector<size_t> group;
    const BeamConfId& beam = m_ues[static_cast<size_t>(first)].info.beamConf;
    for (size_t step = 0; step < m_ues.size(); ++step)
    {
        const size_t idx = (static_cast<size_t>(first) + step) % m_ues.size();
        if (servable(m_ues[idx]) && m_ues[idx].info.beamConf == beam)
        {
            group.push_back(idx);
        }
    }
    std::sort(group.begin(), group.end(), [this](size_t l, size_t r) {
        return m_ues[l].info.rnti < m_ues[r].info.rnti;
    });

    const int k = static_cast<int>(group.size());
    const int base = m_settings.nPrb / k;
    const int remainder = m_settings.nPrb % k;
    int offset = 0;
    for (int i = 0; i < k; ++i)
    {
        const int count = base + (i < remainder ? 1 : 0);
        auto dci = serveUe(m_ues[group[static_cast<size_t>(i)]], slot, count);
        if (dci)
        {
            dci->prbMask = prbMaskFor(offset, count);
            dcis.push_back(std::move(*dci));
        }
        offset += count;
    }
    return dcis;
}

BeamConfId beamConfOf(const std::array<std::optional<BeamId>, 2>& beamPerStream)
{
    if (!beamPerStream[0] && !beamPerStream[1])
    {
        throw std::invalid_argument("beamConfOf: at least one beam must be present");
    }
    BeamConfId conf;
    conf.beamPerStream = beamPerStream;
    return conf;
}

} // namespace dpmimo
