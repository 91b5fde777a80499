// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "dpmimo/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dpmimo/rlc.hpp"
#include "dpmimo/units.hpp"

namespace dpmimo
{

namespace
{

// TS 38.101-1 transmission bandwidth configuration, 15 kHz SCS.
const std::map<int, int> kPrbTableNumerology0 = {
    {5, 25}, {10, 52}, {15, 79}, {20, 106}, {25, 133}, {30, 160}, {40, 216}, {50, 270},
};

} // namespace

ScenarioConfig::ScenarioConfig()
{
    gnbArray.rowsM = 2;
    gnbArray.colsN = 2;
    gnbArray.polarizationsP = 2;
    gnbArray.pattern = ElementPattern::Directional3gpp;
    gnbArray.polSlantAnglesDeg = {45.0, -45.0};

    ueArray.rowsM = 1;
    ueArray.colsN = 1;
    ueArray.polarizationsP = 2;
    ueArray.pattern = ElementPattern::Isotropic;
    ueArray.polSlantAnglesDeg = {45.0, -45.0};
    ueArray.orientation.bearingDeg = 180.0;
}

void ScenarioConfig::validate() const
{
    gnbArray.validate();
    ueArray.validate();
    if (distanceM <= 0.0)
    {
        throw std::invalid_argument("ScenarioConfig: distance must be positive");
    }
    if (numerology != 0)
    {
        throw std::invalid_argument("ScenarioConfig: only numerology 0 is supported");
    }
    const auto it = kPrbTableNumerology0.find(static_cast<int>(std::lround(bandwidthMhz)));
    if (it == kPrbTableNumerology0.end())
    {
        throw std::invalid_argument("ScenarioConfig: unsupported channel bandwidth");
    }
    if (nPrb != it->second)
    {
        throw std::invalid_argument(
            "ScenarioConfig: nPrb inconsistent with bandwidth and numerology");
    }
    if (fcGhz < 0.5 || fcGhz > 100.0)
    {
        throw std::invalid_argument("ScenarioConfig: carrier frequency out of range");
    }
    if (gnbHeightM <= 0.0 || ueHeightM <= 0.0)
    {
        throw std::invalid_argument("ScenarioConfig: node heights must be positive");
    }
    if (rho < 0.0 || rho > 1.0)
    {
        throw std::invalid_argument("ScenarioConfig: rho must be in [0, 1]");
    }
    if (simDurationS <= 0.0)
    {
        throw std::invalid_argument("ScenarioConfig: duration must be positive");
    }
    if (traffic.packetBytes < 1)
    {
        throw std::invalid_argument("ScenarioConfig: packet size must be >= 1 byte");
    }
    if (riConfig.fixedRi != 1 && riConfig.fixedRi != 2)
    {
        throw std::invalid_argument("ScenarioConfig: fixed RI must be 1 or 2");
    }
    const int maxStreams = std::min(gnbArray.polarizationsP, ueArray.polarizationsP);
    if (riConfig.mode == RiMode::Fixed && riConfig.fixedRi > maxStreams)
    {
        throw std::invalid_argument(
            "ScenarioConfig: fixed RI exceeds the stream count the arrays support");
    }
    if (dataSymbolsPerSlot < 1 || dataSymbolsPerSlot > 14)
    {
        throw std::invalid_argument("ScenarioConfig: data symbols per slot must be in [1, 14]");
    }
    if (overhead < 0.0 || overhead >= 1.0)
    {
        throw std::invalid_argument("ScenarioConfig: overhead must be in [0, 1)");
    }
    if (coherenceSlots < 1)
    {
        throw std::invalid_argument("ScenarioConfig: coherence window must be >= 1 slot");
    }
    if (cqiFeedbackDelaySlots < 1 || harqFeedbackDelaySlots < 1)
    {
        throw std::invalid_argument("ScenarioConfig: feedback delays must be >= 1 slot");
    }
    if (initialMcs < 0 || initialMcs >= mcsTable2().size())
    {
        throw std::invalid_argument("ScenarioConfig: initial MCS out of table range");
    }
    if (ueDistancesM.size() > 8)
    {
        throw std::invalid_argument("ScenarioConfig: at most 8 UEs");
    }
    for (const double d : ueDistancesM)
    {
        if (d <= 0.0)
        {
            throw std::invalid_argument("ScenarioConfig: UE distances must be positive");
        }
    }
}

namespace
{

constexpr uint32_t kGnbNodeId = 0;
constexpr double kSlotMs = 1.0; // numerology 0

struct UeState
{
    uint16_t rnti = 0;
    uint32_t nodeId = 0;
    Position position{};
    int maxStreams = 1;
    BeamConfId beamConf;
    std::vector<ArrayEndpoint> gnbEndpoints; // gNB subarrays steered at this UE
    std::vector<ArrayEndpoint> ueEndpoints;  // UE subarrays steered at the gNB
    std::unique_ptr<UePhy> phy;
    RlcUm rlc;
    double nextArrivalMs = 0.0;
    uint64_t nextPacketId = 0;
    // Dequeued segments awaiting HARQ resolution, keyed (process, stream).
    std::map<std::pair<int, int>, std::vector<RlcSegment>> inFlight;
};

class Simulation
{
  public:
    explicit Simulation(const ScenarioConfig& config)
        : m_cfg(config)
        , m_channel(ChannelModel::Settings{config.fcGhz, config.xpd, 10.0,
                                           config.coherenceSlots, config.rngRun})
        , m_scheduler(GnbMacScheduler::Settings{config.nPrb, config.dataSymbolsPerSlot, 1,
                                                config.overhead, config.schedulerMode,
                                                &mcsTable2(), config.initialMcs, 20})
    {
        m_cfg.validate();
        m_nSlots = static_cast<uint64_t>(std::llround(config.simDurationS * 1000.0 / kSlotMs));
        m_noiseDbm = noisePowerDbm(config.nPrb, config.noiseFigureDb, config.numerology);
        setupNodes();
        const size_t horizon = m_nSlots + 16;
        m_harqQueue.resize(horizon);
        m_cqiQueue.resize(horizon);
        if (m_cfg.collectChannelTrace)
        {
            m_channel.setTraceSink(
                [this](const ChannelTraceRow& row) { m_stats.channelTrace.push_back(row); });
        }
    }

    StatsRecord run();

  private:
    void setupNodes();
    void enqueueArrivals(UeState& ue, uint64_t slot);
    void transmit(const DciInfo& dci, uint64_t slot);

    ScenarioConfig m_cfg;
    ChannelModel m_channel;
    GnbMacScheduler m_scheduler;
    std::vector<UeState> m_ues;
    uint64_t m_nSlots = 0;
    double m_noiseDbm = -94.0;

    std::vector<std::vector<DlHarqInfo>> m_harqQueue;
    std::vector<std::vector<DlCqiInfo>> m_cqiQueue;

    StatsRecord m_stats;
    uint64_t m_grantCount = 0;
    uint64_t m_grantStreamSum = 0;
    double m_delaySumMs = 0.0;
    double m_jitterSumMs = 0.0;
    uint64_t m_jitterCount = 0;
    std::optional<double> m_lastDelayMs;
};

void Simulation::setupNodes()
{
    m_channel.registerNode(kGnbNodeId, {0.0, 0.0, m_cfg.gnbHeightM},
                           m_cfg.gnbArray.polarizationsP);

    std::vector<double> distances = m_cfg.ueDistancesM;
    if (distances.empty())
    {
        distances.push_back(m_cfg.distanceM);
    }

    const auto gnbPartitions = buildSubarrays(m_cfg.gnbArray);
    const auto uePartitions = buildSubarrays(m_cfg.ueArray);

    for (size_t i = 0; i < distances.size(); ++i)
    {
        UeState ue;
        ue.rnti = static_cast<uint16_t>(i + 1);
        ue.nodeId = static_cast<uint32_t>(i + 1);
        ue.position = {distances[i], 0.0, m_cfg.ueHeightM};
        ue.maxStreams = std::min(m_cfg.gnbArray.polarizationsP, m_cfg.ueArray.polarizationsP);
        m_channel.registerNode(ue.nodeId, ue.position, m_cfg.ueArray.polarizationsP);

        const double dx = ue.position.x;
        const double dy = ue.position.y;
        const double dz = ue.position.z - m_cfg.gnbHeightM;
        const double d3 = std::hypot(dx, dy, dz);
        const BeamId dlBeam(radToDeg(std::atan2(dy, dx)),
                            radToDeg(std::acos(std::clamp(dz / d3, -1.0, 1.0))));
        const BeamId ulBeam(radToDeg(std::atan2(-dy, -dx)),
                            radToDeg(std::acos(std::clamp(-dz / d3, -1.0, 1.0))));

        for (const SubarrayPartition& part : gnbPartitions)
        {
            ArrayEndpoint ep{kGnbNodeId, &m_cfg.gnbArray, part};
            ep.partition.weights = steeringWeights(part, dlBeam, m_cfg.gnbArray);
            ue.gnbEndpoints.push_back(std::move(ep));
        }
        for (const SubarrayPartition& part : uePartitions)
        {
            ArrayEndpoint ep{ue.nodeId, &m_cfg.ueArray, part};
            ep.partition.weights = steeringWeights(part, ulBeam, m_cfg.ueArray);
            ue.ueEndpoints.push_back(std::move(ep));
        }

        ue.beamConf = ue.maxStreams == 2 ? BeamConfId(dlBeam, dlBeam) : BeamConfId(dlBeam);

        UePhy::Settings phySettings;
        phySettings.rnti = ue.rnti;
        phySettings.noiseDbm = m_noiseDbm;
        phySettings.rho = m_cfg.rho;
        phySettings.riConfig = m_cfg.riConfig;
        phySettings.table = &mcsTable2();
        phySettings.rngRun = m_cfg.rngRun;
        phySettings.maxStreams = ue.maxStreams;
        ue.phy = std::make_unique<UePhy>(phySettings);

        ue.nextArrivalMs = m_cfg.traffic.startS * 1000.0;

        m_scheduler.addUe(ue.rnti, ue.beamConf);
        m_ues.push_back(std::move(ue));
    }
}

void Simulation::enqueueArrivals(UeState& ue, uint64_t slot)
{
    if (m_cfg.traffic.offeredRateBps <= 0.0)
    {
        return;
    }
    const double slotEndMs = (static_cast<double>(slot) + 1.0) * kSlotMs;
    const double stopMs = m_cfg.traffic.stopS < 0.0
                              ? static_cast<double>(m_nSlots) * kSlotMs
                              : m_cfg.traffic.stopS * 1000.0;
    const double intervalMs =
        m_cfg.traffic.packetBytes * 8.0 * 1000.0 / m_cfg.traffic.offeredRateBps;
    while (ue.nextArrivalMs < slotEndMs && ue.nextArrivalMs < stopMs)
    {
        ue.rlc.enqueue(ue.nextPacketId++, m_cfg.traffic.packetBytes, ue.nextArrivalMs);
        m_stats.txBytes += m_cfg.traffic.packetBytes;
        ++m_stats.txPackets;
        ue.nextArrivalMs += intervalMs;
    }
}

void Simulation::transmit(const DciInfo& dci, uint64_t slot)
{
    UeState& ue = m_ues[static_cast<size_t>(dci.rnti - 1)];
    const int nActive = dci.numScheduledStreams();
    const double perStreamDbm = splitTxPowerDbm(m_cfg.gnbPowerDbm, nActive);
    auto params = m_channel.getChannelParams(kGnbNodeId, ue.nodeId, slot);

    std::array<std::optional<UePhy::StreamRx>, 2> rx{};
    for (int stream = 0; stream < 2; ++stream)
    {
        const auto& tb = dci.tbPerStream[static_cast<size_t>(stream)];
        if (!tb)
        {
            continue;
        }
        if (tb->ndi)
        {
            ue.inFlight[{dci.harqProcessId, stream}] = ue.rlc.dequeue(tb->tbsBytes);
        }
        auto entry = m_channel.getChannelMatrix(params, kGnbNodeId, ue.nodeId, stream,
                                                stream, slot);
        const PropagationSample sample =
            m_channel.rxPsd(perStreamDbm, ue.gnbEndpoints[static_cast<size_t>(stream)],
                            ue.ueEndpoints[static_cast<size_t>(stream)], entry, params, slot);
        UePhy::StreamRx powers;
        powers.coDbm = sample.rxPowerDbmCo;
        powers.crossDbm = nActive == 2 ? sample.rxPowerDbmCross : kPowerFloorDbm;
        rx[static_cast<size_t>(stream)] = powers;
    }

    const UePhy::SlotResult result = ue.phy->receive(dci, rx, slot);

    for (int stream = 0; stream < 2; ++stream)
    {
        const auto& tb = dci.tbPerStream[static_cast<size_t>(stream)];
        if (!tb)
        {
            continue;
        }
        const bool ack = *result.ackPerStream[static_cast<size_t>(stream)];
        const auto key = std::make_pair(dci.harqProcessId, stream);
        std::string outcome;
        if (ack)
        {
            const auto completed = ue.rlc.onSegmentsDelivered(
                ue.inFlight[key], (static_cast<double>(slot) + 1.0) * kSlotMs);
            for (const RlcUm::Delivered& pkt : completed)
            {
                m_stats.rxBytes += m_cfg.traffic.packetBytes;
                ++m_stats.rxPackets;
                m_delaySumMs += pkt.delayMs;
                if (m_lastDelayMs)
                {
                    m_jitterSumMs += std::abs(pkt.delayMs - *m_lastDelayMs);
                    ++m_jitterCount;
                }
                m_lastDelayMs = pkt.delayMs;
            }
            ue.inFlight.erase(key);
            outcome = "ack";
        }
        else if (tb->rv >= 3)
        {
            for (const RlcUm::Lost& pkt : ue.rlc.onSegmentsLost(ue.inFlight[key]))
            {
                m_stats.lostBytes += pkt.bytes;
                ++m_stats.lostPackets;
            }
            ue.inFlight.erase(key);
            ++m_stats.tbDropped;
            outcome = "lost";
        }
        else
        {
            outcome = "nack";
        }
        if (tb->ndi)
        {
            ++m_stats.harqNewTx;
        }
        else
        {
            ++m_stats.harqRetx;
        }
        if (m_cfg.collectMacTrace)
        {
            m_stats.macTrace.push_back({slot, dci.rnti, dci.harqProcessId, stream, tb->ndi,
                                        tb->rv, tb->mcs, tb->tbsBytes, outcome});
        }
    }

    if (m_cfg.collectPhyTrace)
    {
        for (const StreamSinrReport& report : result.sinrReports)
        {
            m_stats.phyTrace.push_back(
                {slot, dci.rnti, report.streamIndex, report.sinrDb,
                 computeCqi(report.sinrDb), result.cqiReport.ri,
                 *result.ackPerStream[static_cast<size_t>(report.streamIndex)]});
        }
    }

    const uint64_t harqDue = slot + static_cast<uint64_t>(m_cfg.harqFeedbackDelaySlots);
    const uint64_t cqiDue = slot + static_cast<uint64_t>(m_cfg.cqiFeedbackDelaySlots);
    if (harqDue < m_harqQueue.size())
    {
        m_harqQueue[harqDue].push_back(result.harqFeedback);
    }
    if (cqiDue < m_cqiQueue.size())
    {
        m_cqiQueue[cqiDue].push_back(result.cqiReport);
    }

    ++m_grantCount;
    m_grantStreamSum += static_cast<uint64_t>(nActive);
    m_stats.riPerSlot[slot] =
        std::max(m_stats.riPerSlot[slot], static_cast<uint8_t>(nActive));
}

StatsRecord Simulation::run()
{
    m_stats = StatsRecord{};
    m_stats.distanceM = m_cfg.distanceM;
    m_stats.rngRun = m_cfg.rngRun;
    m_stats.riPerSlot.assign(m_nSlots, 0);

    for (uint64_t slot = 0; slot < m_nSlots; ++slot)
    {
        m_channel.updateChannel(slot);

        for (UeState& ue : m_ues)
        {
            enqueueArrivals(ue, slot);
            m_scheduler.setBufferBytes(ue.rnti, ue.rlc.bufferedBytes());
        }

        for (const DlHarqInfo& fb : m_harqQueue[slot])
        {
            m_scheduler.processHarqFeedback(fb);
        }
        m_harqQueue[slot].clear();
        for (const DlCqiInfo& report : m_cqiQueue[slot])
        {
            m_scheduler.updateUeFromCqi(report);
        }
        m_cqiQueue[slot].clear();

        for (const DciInfo& dci : m_scheduler.scheduleSlot(slot))
        {
            transmit(dci, slot);
        }
    }

    for (UeState& ue : m_ues)
    {
        m_stats.queuedBytes += ue.rlc.queuedOpenBytes();
        m_stats.inFlightBytes += ue.rlc.inFlightBytes();
    }

    const double startMs = m_cfg.traffic.startS * 1000.0;
    const double stopMs = m_cfg.traffic.stopS < 0.0
                              ? static_cast<double>(m_nSlots) * kSlotMs
                              : std::min(m_cfg.traffic.stopS * 1000.0,
                                         static_cast<double>(m_nSlots) * kSlotMs);
    const double intervalS = std::max((stopMs - startMs) / 1000.0, kSlotMs / 1000.0);
    m_stats.throughputMbps = static_cast<double>(m_stats.rxBytes) * 8.0 / intervalS / 1e6;
    m_stats.meanDelayMs = m_stats.rxPackets > 0
                              ? m_delaySumMs / static_cast<double>(m_stats.rxPackets)
                              : 0.0;
    m_stats.meanJitterMs =
        m_jitterCount > 0 ? m_jitterSumMs / static_cast<double>(m_jitterCount) : 0.0;
    m_stats.meanRi = m_grantCount > 0
                         ? static_cast<double>(m_grantStreamSum) /
                               static_cast<double>(m_grantCount)
                         : 0.0;

    // Byte conservation: everything offered is delivered, lost, queued or in
    // flight.
    if (m_stats.txBytes !=
        m_stats.rxBytes + m_stats.lostBytes + m_stats.queuedBytes + m_stats.inFlightBytes)
    {
        throw std::logic_error("Simulation: byte conservation violated");
    }
    return m_stats;
}

} // namespace

StatsRecord runScenario(const ScenarioConfig& config)
{
    config.validate();
    Simulation sim(config);
    return sim.run();
}

SweepResult sweep(const ScenarioConfig& base,
                  const std::vector<double>& distancesM,
                  const std::vector<uint32_t>& rngRuns,
                  unsigned jobs)
{
    if (distancesM.empty() || rngRuns.empty())
    {
        throw std::invalid_argument("sweep: distance and rng-run lists must be non-empty");
    }

    struct Job
    {
        double distance;
        uint32_t run;
    };
    std::vector<Job> matrix;
    std::vector<double> sortedDistances = distancesM;
    std::sort(sortedDistances.begin(), sortedDistances.end());
    std::vector<uint32_t> sortedRuns = rngRuns;
    std::sort(sortedRuns.begin(), sortedRuns.end());
    for (const double d : sortedDistances)
    {
        for (const uint32_t r : sortedRuns)
        {
            matrix.push_back({d, r});
        }
    }

    SweepResult result;
    result.runs.resize(matrix.size());

    if (jobs == 0)
    {
        jobs = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
    }
    std::atomic<size_t> next{0};
    std::exception_ptr firstError;
    std::mutex errorMutex;
    auto worker = [&]() {
        for (;;)
        {
            const size_t i = next.fetch_add(1);
            if (i >= matrix.size())
            {
                return;
            }
            try
            {
                ScenarioConfig cfg = base;
                cfg.distanceM = matrix[i].distance;
                cfg.rngRun = matrix[i].run;
                result.runs[i] = runScenario(cfg);
            }
            catch (...)
            {
                const std::lock_guard<std::mutex> lock(errorMutex);
                if (!firstError)
                {
                    firstError = std::current_exception();
                }
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t)
    {
        threads.emplace_back(worker);
    }
    for (std::thread& t : threads)
    {
        t.join();
    }
    if (firstError)
    {
        std::rethrow_exception(firstError);
    }

    const size_t runsPerDistance = sortedRuns.size();
    for (size_t d = 0; d < sortedDistances.size(); ++d)
    {
        DistanceAggregate agg;
        agg.distanceM = sortedDistances[d];
        double sum = 0.0;
        double sumSq = 0.0;
        for (size_t r = 0; r < runsPerDistance; ++r)
        {
            const StatsRecord& rec = result.runs[d * runsPerDistance + r];
            sum += rec.throughputMbps;
            sumSq += rec.throughputMbps * rec.throughputMbps;
            agg.meanDelayMs += rec.meanDelayMs;
            agg.meanJitterMs += rec.meanJitterMs;
            agg.meanTxBytes += static_cast<double>(rec.txBytes);
            agg.meanRxBytes += static_cast<double>(rec.rxBytes);
            agg.meanRi += rec.meanRi;
        }
        const double n = static_cast<double>(runsPerDistance);
        agg.meanThroughputMbps = sum / n;
        const double variance = std::max(sumSq / n - agg.meanThroughputMbps *
                                                         agg.meanThroughputMbps,
                                         0.0);
        agg.stdThroughputMbps = std::sqrt(variance);
        agg.meanDelayMs /= n;
        agg.meanJitterMs /= n;
        agg.meanTxBytes /= n;
        agg.meanRxBytes /= n;
        agg.meanRi /= n;
        result.aggregates.push_back(agg);
    }
    return result;
}

} // namespace dpmimo
