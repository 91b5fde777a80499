// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "dpmimo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpmimo/rng.hpp"
#include "dpmimo/units.hpp"

namespace dpmimo
{

ChannelModel::ChannelModel(Settings settings)
    : m_settings(settings)
{
    if (m_settings.coherenceSlots < 1)
    {
        throw std::invalid_argument("ChannelModel: coherenceSlots must be >= 1");
    }
    if (m_settings.forceLos && m_settings.forceNlos)
    {
        throw std::invalid_argument("ChannelModel: forceLos and forceNlos are exclusive");
    }
}

void ChannelModel::registerNode(uint32_t nodeId, Position position, int numPartitions)
{
    if (numPartitions < 1 || numPartitions > 2)
    {
        throw std::invalid_argument("ChannelModel: numPartitions must be 1 or 2");
    }
    m_nodes[nodeId] = {position, numPartitions};
}

const ChannelModel::NodeInfo& ChannelModel::nodeInfo(uint32_t nodeId) const
{
    const auto it = m_nodes.find(nodeId);
    if (it == m_nodes.end())
    {
        throw std::invalid_argument("ChannelModel: node not registered");
    }
    return it->second;
}

double ChannelModel::losProbability(double distance2dM)
{
    if (distance2dM <= 18.0)
    {
        return 1.0;
    }
    return 18.0 / distance2dM +
           std::exp(-distance2dM / 36.0) * (1.0 - 18.0 / distance2dM);
}

std::shared_ptr<const ChannelParams> ChannelModel::generateParams(NodePairKey key,
                                                                  uint64_t epoch,
                                                                  uint64_t nowSlot)
{
    const NodeInfo& na = nodeInfo(key.a);
    const NodeInfo& nb = nodeInfo(key.b);
    const double dx = na.position.x - nb.position.x;
    const double dy = na.position.y - nb.position.y;
    const double dz = na.position.z - nb.position.z;

    auto params = std::make_shared<ChannelParams>();
    params->pair = key;
    params->distance2dM = std::hypot(dx, dy);
    params->distance3dM = std::hypot(dx, dy, dz);
    params->generatedAtSlot = nowSlot;
    params->epoch = epoch;

    RngStream rng = makeStream(m_settings.rngRun, "channel.params", key.a, key.b, epoch);
    const double losDraw = rng.uniform();
    params->los = m_settings.forceLos ||
                  (!m_settings.forceNlos && losDraw < losProbability(params->distance2dM));

    // TR 38.901 UMi shadow fading std: 4 dB LOS / 7.82 dB NLOS.
    const double shadowStd = params->los ? 4.0 : 7.82;
    params->shadowingDb = rng.normal(0.0, shadowStd);

    switch (m_settings.xpd.mode)
    {
    case XpdMode::Gaussian3gpp: {
        // TR 38.901 UMi XPR: N(9,3) dB LOS, N(8,3) dB NLOS.
        const double mean = params->los ? 9.0 : 8.0;
        params->xpdDb = std::clamp(rng.normal(mean, 3.0), 0.0, kXpdCapDb);
        break;
    }
    case XpdMode::Fixed:
        params->xpdDb = std::clamp(m_settings.xpd.fixedDb, 0.0, kXpdCapDb);
        break;
    case XpdMode::PerfectIsolation:
        params->xpdDb = kXpdCapDb;
        break;
    }
    return params;
}

std::shared_ptr<const ChannelParams> ChannelModel::getChannelParams(uint32_t nodeA,
                                                                    uint32_t nodeB,
                                                                    uint64_t nowSlot)
{
    if (!sameNodeGuard(nodeA, nodeB))
    {
        throw std::invalid_argument(
            "ChannelModel: channel requested between arrays of the same node");
    }
    const NodePairKey key = NodePairKey::make(nodeA, nodeB);
    const auto it = m_params.find(key);
    if (it != m_params.end())
    {
        return it->second;
    }
    auto params = generateParams(key, 0, nowSlot);
    m_params.emplace(key, params);
    return params;
}

void ChannelModel::dropEntriesForPair(const NodePairKey& key)
{
    for (auto it = m_entries.begin(); it != m_entries.end();)
    {
        if (it->first.pair == key)
        {
            it = m_entries.erase(it);
        }
        else
        {
            ++it;
        }
    }
}

void ChannelModel::updateChannel(uint64_t nowSlot)
{
    std::vector<NodePairKey> expired;
    for (const auto& [key, params] : m_params)
    {
        if (nowSlot - params->generatedAtSlot >= m_settings.coherenceSlots)
        {
            expired.push_back(key);
        }
    }
    for (const NodePairKey& key : expired)
    {
        const uint64_t epoch = m_params[key]->epoch + 1;
        m_params[key] = generateParams(key, epoch, nowSlot);
        dropEntriesForPair(key);
    }
}

std::shared_ptr<const ChannelMatrixEntry> ChannelModel::getChannelMatrix(
    const std::shared_ptr<const ChannelParams>& params,
    uint32_t txNode,
    uint32_t rxNode,
    int txPartition,
    int rxPartition,
    uint64_t nowSlot)
{
    if (!params)
    {
        throw std::invalid_argument("ChannelModel: null params");
    }
    const NodePairKey key = NodePairKey::make(txNode, rxNode);
    if (!(key == params->pair))
    {
        throw std::invalid_argument("ChannelModel: nodes do not match the params pair");
    }
    const auto current = m_params.find(key);
    if (current == m_params.end() || current->second != params)
    {
        throw std::invalid_argument("ChannelModel: params instance is stale");
    }
    if (txPartition < 0 || txPartition >= nodeInfo(txNode).numPartitions ||
        rxPartition < 0 || rxPartition >= nodeInfo(rxNode).numPartitions)
    {
        throw std::out_of_range("ChannelModel: partition index out of range");
    }

    // Reciprocity: store partition indices in (lower node, higher node) order.
    const bool txIsA = txNode == key.a;
    const MatrixKey mkey{key,
                         txIsA ? txPartition : rxPartition,
                         txIsA ? rxPartition : txPartition};
    const auto it = m_entries.find(mkey);
    if (it != m_entries.end())
    {
        return it->second;
    }

    RngStream rng = makeStream(m_settings.rngRun,
                               "channel.matrix",
                               (static_cast<uint64_t>(key.a) << 32) | key.b,
                               (static_cast<uint64_t>(mkey.partitionAtA) << 8) |
                                   static_cast<uint64_t>(mkey.partitionAtB),
                               params->epoch);

    auto entry = std::make_shared<ChannelMatrixEntry>();
    entry->key = mkey;
    entry->params = params;
    entry->epoch = params->epoch;

    // Small-scale fading with unit mean power: Rician when LOS, Rayleigh
    // otherwise.
    std::complex<double> co;
    if (params->los)
    {
        const double k = dbToLinear(m_settings.ricianKDb);
        const std::complex<double> losComp =
            std::polar(std::sqrt(k / (k + 1.0)), 2.0 * kPi * rng.uniform());
        const std::complex<double> scatter(rng.normal() / std::sqrt(2.0),
                                           rng.normal() / std::sqrt(2.0));
        co = losComp + scatter / std::sqrt(k + 1.0);
    }
    else
    {
        co = std::complex<double>(rng.normal() / std::sqrt(2.0),
                                  rng.normal() / std::sqrt(2.0));
    }
    entry->coPolarGain = co;
    entry->smallScaleFadingDb = 20.0 * std::log10(std::max(std::abs(co), 1e-150));

    // Cross-polar leakage: magnitude locked to |co| * 10^(-xpd/20) so the
    // per-draw power ratio never exceeds the XPD bound; independent phase.
    if (params->xpdDb >= kXpdCapDb)
    {
        entry->crossPolarGain = {0.0, 0.0};
    }
    else
    {
        const double mag = std::abs(co) * std::pow(10.0, -params->xpdDb / 20.0);
        entry->crossPolarGain = std::polar(mag, 2.0 * kPi * rng.uniform());
    }

    if (m_traceSink)
    {
        const double coDb = 20.0 * std::log10(std::max(std::abs(entry->coPolarGain), 1e-150));
        const double crossAbs = std::abs(entry->crossPolarGain);
        m_traceSink({nowSlot, key, txPartition, rxPartition, params->los,
                     params->shadowingDb, params->xpdDb, coDb,
                     crossAbs > 0.0 ? 20.0 * std::log10(crossAbs) : kPowerFloorDbm});
    }

    m_entries.emplace(mkey, entry);
    return entry;
}

double ChannelModel::pathlossDb(const ChannelParams& params,
                                double fcGhz,
                                double hBsM,
                                double hUtM)
{
    if (fcGhz < 0.5 || fcGhz > 100.0)
    {
        throw std::invalid_argument("pathlossDb: carrier frequency out of [0.5, 100] GHz");
    }
    if (params.distance3dM < 1.0)
    {
        throw std::invalid_argument("pathlossDb: distance must be >= 1 m");
    }

    // TR 38.901 Table 7.4.1-1, UMi street canyon; hE = 1 m.
    const double dbp = 4.0 * (hBsM - 1.0) * (hUtM - 1.0) * fcGhz * 1e9 / kSpeedOfLight;
    const double d3 = params.distance3dM;

    double plLos;
    if (params.distance2dM <= dbp)
    {
        plLos = 32.4 + 21.0 * std::log10(d3) + 20.0 * std::log10(fcGhz);
    }
    else
    {
        plLos = 32.4 + 40.0 * std::log10(d3) + 20.0 * std::log10(fcGhz) -
                9.5 * std::log10(dbp * dbp + (hBsM - hUtM) * (hBsM - hUtM));
    }
    if (params.los)
    {
        return plLos;
    }
    const double plNlos = 22.4 + 35.3 * std::log10(d3) + 21.3 * std::log10(fcGhz) -
                          0.3 * (hUtM - 1.5);
    return std::max(plLos, plNlos);
}

PropagationSample ChannelModel::rxPsd(double txPowerDbmPerStream,
                                      const ArrayEndpoint& tx,
                                      const ArrayEndpoint& rx,
                                      const std::shared_ptr<const ChannelMatrixEntry>& entry,
                                      const std::shared_ptr<const ChannelParams>& params,
                                      uint64_t nowSlot)
{
    if (!entry || !params)
    {
        throw std::invalid_argument("rxPsd: null entry or params");
    }
    const NodePairKey key = NodePairKey::make(tx.nodeId, rx.nodeId);
    if (!(key == params->pair) || !(key == entry->key.pair))
    {
        throw std::invalid_argument("rxPsd: endpoint nodes do not match the entry key");
    }
    const bool txIsA = tx.nodeId == key.a;
    const int expectedAtA = txIsA ? tx.partition.partitionIndex : rx.partition.partitionIndex;
    const int expectedAtB = txIsA ? rx.partition.partitionIndex : tx.partition.partitionIndex;
    if (entry->key.partitionAtA != expectedAtA || entry->key.partitionAtB != expectedAtB)
    {
        throw std::invalid_argument("rxPsd: entry does not match the endpoint partitions");
    }

    const Position& tp = nodeInfo(tx.nodeId).position;
    const Position& rp = nodeInfo(rx.nodeId).position;
    const double dx = rp.x - tp.x;
    const double dy = rp.y - tp.y;
    const double dz = rp.z - tp.z;
    const double d3 = std::max(std::hypot(dx, dy, dz), 1e-9);
    const BeamId txDir(radToDeg(std::atan2(dy, dx)),
                       radToDeg(std::acos(std::clamp(dz / d3, -1.0, 1.0))));
    const BeamId rxDir(radToDeg(std::atan2(-dy, -dx)),
                       radToDeg(std::acos(std::clamp(-dz / d3, -1.0, 1.0))));

    const double txGainDb = arrayGainDb(tx.partition, tx.partition.weights, txDir, *tx.config);
    const double rxGainDb = arrayGainDb(rx.partition, rx.partition.weights, rxDir, *rx.config);
    // Downlink orientation: the transmitter is the base station.
    const double plDb = pathlossDb(*params, m_settings.fcGhz, tp.z, rp.z);
    const double budgetDb =
        txPowerDbmPerStream + txGainDb + rxGainDb - plDb - params->shadowingDb;

    PropagationSample sample;
    sample.streamIndex = rx.partition.partitionIndex;
    sample.rxPowerDbmCo =
        std::max(budgetDb + 20.0 * std::log10(std::max(std::abs(entry->coPolarGain), 1e-150)),
                 kPowerFloorDbm);

    // Leakage from the other TX subarray into this RX subarray, through the
    // cross-pair entry's cross-polar coefficient. With a single TX partition
    // there is no other stream to leak.
    if (nodeInfo(tx.nodeId).numPartitions > 1)
    {
        const int otherTxPartition = 1 - tx.partition.partitionIndex;
        const auto crossEntry = getChannelMatrix(params, tx.nodeId, rx.nodeId,
                                                 otherTxPartition,
                                                 rx.partition.partitionIndex, nowSlot);
        const double crossAbs = std::abs(crossEntry->crossPolarGain);
        sample.rxPowerDbmCross =
            crossAbs > 0.0
                ? std::max(budgetDb + 20.0 * std::log10(crossAbs), kPowerFloorDbm)
                : kPowerFloorDbm;
    }
    else
    {
        sample.rxPowerDbmCross = kPowerFloorDbm;
    }
    return sample;
}

} // namespace dpmimo
