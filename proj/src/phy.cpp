// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "dpmimo/phy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpmimo/units.hpp"

namespace dpmimo
{

void HarqSoftState::reset(int stream)
{
    m_accumulatedLinear.at(static_cast<size_t>(stream)) = 0.0;
    m_txCount.at(static_cast<size_t>(stream)) = 0;
}

void HarqSoftState::resetAll()
{
    reset(0);
    reset(1);
}

double HarqSoftState::combine(int stream, double newSinrDb)
{
    auto& accum = m_accumulatedLinear.at(static_cast<size_t>(stream));
    auto& count = m_txCount.at(static_cast<size_t>(stream));
    if (count >= kMaxTransmissions)
    {
        throw std::logic_error("HarqSoftState: combining past the final redundancy version");
    }
    accum += dbToLinear(newSinrDb);
    ++count;
    return linearToDb(accum);
}

double HarqSoftState::effectiveSinrDb(int stream) const
{
    const double accum = m_accumulatedLinear.at(static_cast<size_t>(stream));
    return accum > 0.0 ? linearToDb(accum) : -std::numeric_limits<double>::infinity();
}

double splitTxPowerDbm(double totalDbm, int nActiveStreams)
{
    if (nActiveStreams != 1 && nActiveStreams != 2)
    {
        throw std::invalid_argument("splitTxPowerDbm: active streams must be 1 or 2");
    }
    return totalDbm - 10.0 * std::log10(static_cast<double>(nActiveStreams));
}

double computeStreamSinrDb(double coDbm,
                           double crossFromOtherStreamDbm,
                           double noiseDbm,
                           double rho)
{
    if (rho < 0.0 || rho > 1.0)
    {
        throw std::invalid_argument("computeStreamSinrDb: rho must be in [0, 1]");
    }
    const double signal = dbmToMw(coDbm);
    const double denom = dbmToMw(noiseDbm) + rho * dbmToMw(crossFromOtherStreamDbm);
    return linearToDb(signal / denom);
}

double noisePowerDbm(int nPrb, double noiseFigureDb, int numerology)
{
    const double scsHz = 15e3 * std::pow(2.0, numerology);
    return -174.0 + 10.0 * std::log10(nPrb * 12.0 * scsHz) + noiseFigureDb;
}

RiResult computeRi(const RiConfig& config,
                   const std::array<std::optional<double>, 2>& perStreamSinrDb)
{
    const int nActive = static_cast<int>(perStreamSinrDb[0].has_value()) +
                        static_cast<int>(perStreamSinrDb[1].has_value());
    if (nActive == 0)
    {
        throw std::invalid_argument("computeRi: no active stream");
    }
    if (config.mode == RiMode::Fixed)
    {
        if (config.fixedRi != 1 && config.fixedRi != 2)
        {
            throw std::invalid_argument("computeRi: fixedRi must be 1 or 2");
        }
        return {config.fixedRi, nActive == 2};
    }
    if (nActive == 1)
    {
        const double sinr = perStreamSinrDb[0] ? *perStreamSinrDb[0] : *perStreamSinrDb[1];
        return {sinr >= config.threshold1Db ? 2 : 1, false};
    }
    const bool keepTwo = *perStreamSinrDb[0] >= config.threshold2Db &&
                         *perStreamSinrDb[1] >= config.threshold2Db;
    return {keepTwo ? 2 : 1, true};
}

DlCqiInfo buildCqiReport(uint16_t rnti,
                         const RiResult& ri,
                         const std::vector<uint8_t>& perStreamCqi)
{
    DlCqiInfo info;
    info.rnti = rnti;
    info.wbCqi = perStreamCqi;
    info.ri = static_cast<uint8_t>(ri.ri);
    return info;
}

bool decodeTb(const TbInfo& tb, double effectiveSinrDb, RngStream& rng, const McsTable& table)
{
    const double p = bler(effectiveSinrDb, tb.mcs, table);
    return !rng.bernoulli(p);
}

UePhy::UePhy(Settings settings)
    : m_settings(settings)
    , m_soft(static_cast<size_t>(settings.numHarqProcesses))
    , m_decodeRng(mixSeed(settings.rngRun, "phy.decode", settings.rnti))
{
}

UePhy::SlotResult UePhy::receive(const DciInfo& dci,
                                 const std::array<std::optional<StreamRx>, 2>& rx,
                                 uint64_t slot)
{
    SlotResult result;
    result.harqFeedback.rnti = m_settings.rnti;
    result.harqFeedback.harqProcessId = dci.harqProcessId;
    HarqSoftState& soft = m_soft.at(static_cast<size_t>(dci.harqProcessId));

    std::array<std::optional<double>, 2> sinrPerStream{};
    for (int stream = 0; stream < 2; ++stream)
    {
        const auto& tb = dci.tbPerStream[static_cast<size_t>(stream)];
        if (!tb)
        {
            continue;
        }
        if (!rx[static_cast<size_t>(stream)])
        {
            throw std::invalid_argument("UePhy: scheduled stream without received power");
        }
        const StreamRx& powers = *rx[static_cast<size_t>(stream)];
        const double sinrDb = computeStreamSinrDb(powers.coDbm, powers.crossDbm,
                                                  m_settings.noiseDbm, m_settings.rho);
        sinrPerStream[static_cast<size_t>(stream)] = sinrDb;
        result.sinrReports.push_back({stream, sinrDb, slot});

        if (tb->ndi)
        {
            soft.reset(stream);
        }
        const double effectiveDb = soft.combine(stream, sinrDb);
        const bool ack = decodeTb(*tb, effectiveDb, m_decodeRng, *m_settings.table);
        result.ackPerStream[static_cast<size_t>(stream)] = ack;
        result.harqFeedback.ackPerStream.push_back(ack);

        m_lastCqi[static_cast<size_t>(stream)] =
            static_cast<uint8_t>(computeCqi(sinrDb, *m_settings.table));
    }

    RiResult ri = computeRi(m_settings.riConfig, sinrPerStream);
    ri.ri = std::min(ri.ri, m_settings.maxStreams);

    // wbCqi index i maps to stream i: include stream 1 only when a CQI for it
    // is known, backfilling stream 0 from the last measurement.
    std::vector<uint8_t> cqis;
    if (m_lastCqi[1].has_value())
    {
        cqis = {m_lastCqi[0].value_or(0), *m_lastCqi[1]};
    }
    else if (m_lastCqi[0].has_value())
    {
        cqis = {*m_lastCqi[0]};
    }
    result.cqiReport = buildCqiReport(m_settings.rnti, ri, cqis);
    return result;
}

} // namespace dpmimo
