// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>

#include "dpmimo/antenna.hpp"

namespace dpmimo
{

/// Unordered node pair: (A,B) and (B,A) address the same channel state.
struct NodePairKey
{
    uint32_t a; // lower node id
    uint32_t b; // higher node id

    static NodePairKey make(uint32_t x, uint32_t y)
    {
        return x < y ? NodePairKey{x, y} : NodePairKey{y, x};
    }

    friend bool operator==(const NodePairKey&, const NodePairKey&) = default;
};

struct NodePairKeyHash
{
    size_t operator()(const NodePairKey& k) const
    {
        return std::hash<uint64_t>()((static_cast<uint64_t>(k.a) << 32) | k.b);
    }
};

/// Long-term state shared by every subarray pair between two nodes.
struct ChannelParams
{
    NodePairKey pair;
    bool los = true;
    double shadowingDb = 0.0;
    double xpdDb = 0.0; // cross-polarization discrimination
    double distance2dM = 0.0;
    double distance3dM = 0.0;
    uint64_t generatedAtSlot = 0;
    uint64_t epoch = 0;
};

struct MatrixKey
{
    NodePairKey pair;
    int partitionAtA; // subarray index at the lower-id node
    int partitionAtB; // subarray index at the higher-id node

    friend bool operator==(const MatrixKey&, const MatrixKey&) = default;
};

struct MatrixKeyHash
{
    size_t operator()(const MatrixKey& k) const
    {
        const uint64_t h = (static_cast<uint64_t>(k.pair.a) << 40) ^
                           (static_cast<uint64_t>(k.pair.b) << 16) ^
                           (static_cast<uint64_t>(k.partitionAtA) << 8) ^
                           static_cast<uint64_t>(k.partitionAtB);
        return std::hash<uint64_t>()(h);
    }
};

/// Per-(TX subarray, RX subarray) flat-fading coefficients. Every entry of a
/// node pair references that pair's single ChannelParams instance.
struct ChannelMatrixEntry
{
    MatrixKey key;
    std::shared_ptr<const ChannelParams> params;
    std::complex<double> coPolarGain;
    std::complex<double> crossPolarGain;
    double smallScaleFadingDb = 0.0;
    uint64_t epoch = 0;
};

/// Received power of one stream: the polarization-matched term and the
/// cross-polar leakage arriving from the other stream's TX subarray.
struct PropagationSample
{
    int streamIndex = 0;
    double rxPowerDbmCo = 0.0;
    double rxPowerDbmCross = 0.0;
};

enum class XpdMode
{
    Gaussian3gpp,     // N(9,3) dB LOS / N(8,3) dB NLOS, clamped to [0, cap]
    Fixed,            // constant value
    PerfectIsolation, // cap value; cross-polar gain exactly zero
};

struct XpdConfig
{
    XpdMode mode = XpdMode::Gaussian3gpp;
    double fixedDb = 9.0;
};

/// XPD at or above this value is treated as perfect isolation.
inline constexpr double kXpdCapDb = 200.0;

struct Position
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// One (node, subarray) attachment point, carrying the steered weights the
/// RX-PSD computation needs.
struct ArrayEndpoint
{
    uint32_t nodeId = 0;
    const ArrayConfig* config = nullptr;
    SubarrayPartition partition;
};

struct ChannelTraceRow
{
    uint64_t slot;
    NodePairKey pair;
    int txPartition;
    int rxPartition;
    bool los;
    double shadowingDb;
    double xpdDb;
    double coDb;
    double crossDb;
};

/// UMi street-canyon channel with the per-node-pair / per-subarray-pair
/// split: one ChannelParams per node pair, one ChannelMatrixEntry per
/// (pair, TX subarray, RX subarray), all entries of a pair referencing the
/// same params instance.
class ChannelModel
{
  public:
    struct Settings
    {
        double fcGhz = 3.5;
        XpdConfig xpd{};
        double ricianKDb = 10.0;
        uint64_t coherenceSlots = 100;
        uint32_t rngRun = 1;
        bool forceLos = false;  // skip the LOS probability draw
        bool forceNlos = false;
    };

    explicit ChannelModel(Settings settings);

    void registerNode(uint32_t nodeId, Position position, int numPartitions);

    /// False when the two endpoints belong to the same node; such pairs must
    /// never reach the channel computations.
    static bool sameNodeGuard(uint32_t txNode, uint32_t rxNode)
    {
        return txNode != rxNode;
    }

    /// Returns the cached per-pair instance, drawing LOS/shadowing/XPD on
    /// first use. Symmetric in (a, b). Throws on a same-node request.
    std::shared_ptr<const ChannelParams> getChannelParams(uint32_t nodeA,
                                                          uint32_t nodeB,
                                                          uint64_t nowSlot);

    /// Returns the cached entry for (params, TX subarray, RX subarray),
    /// generating co/cross coefficients on first use. Throws when the nodes
    /// do not match the params pair or a partition index is out of range.
    std::shared_ptr<const ChannelMatrixEntry> getChannelMatrix(
        const std::shared_ptr<const ChannelParams>& params,
        uint32_t txNode,
        uint32_t rxNode,
        int txPartition,
        int rxPartition,
        uint64_t nowSlot);

    /// TR 38.901 Table 7.4.1-1 UMi street-canyon pathloss.
    static double pathlossDb(const ChannelParams& params,
                             double fcGhz,
                             double hBsM,
                             double hUtM);

    /// UMi LOS probability (TR 38.901 Table 7.4.2-1).
    static double losProbability(double distance2dM);

    /// Co- and cross-polar received power for the stream arriving at the RX
    /// endpoint's subarray. The cross term uses the cross-pair entry (other
    /// TX subarray -> this RX subarray).
    PropagationSample rxPsd(double txPowerDbmPerStream,
                            const ArrayEndpoint& tx,
                            const ArrayEndpoint& rx,
                            const std::shared_ptr<const ChannelMatrixEntry>& entry,
                            const std::shared_ptr<const ChannelParams>& params,
                            uint64_t nowSlot);

    /// Regenerates every ChannelParams older than the coherence window and
    /// drops the dependent matrix entries.
    void updateChannel(uint64_t nowSlot);

    void setTraceSink(std::function<void(const ChannelTraceRow&)> sink)
    {
        m_traceSink = std::move(sink);
    }

    size_t paramsCacheSize() const
    {
        return m_params.size();
    }
    size_t matrixCacheSize() const
    {
        return m_entries.size();
    }
    const Settings& settings() const
    {
        return m_settings;
    }

  private:
    struct NodeInfo
    {
        Position position;
        int numPartitions;
    };

    const NodeInfo& nodeInfo(uint32_t nodeId) const;
    std::shared_ptr<const ChannelParams> generateParams(NodePairKey key,
                                                        uint64_t epoch,
                                                        uint64_t nowSlot);
    void dropEntriesForPair(const NodePairKey& key);

    Settings m_settings;
    std::unordered_map<uint32_t, NodeInfo> m_nodes;
    std::unordered_map<NodePairKey, std::shared_ptr<const ChannelParams>, NodePairKeyHash>
        m_params;
    std::unordered_map<MatrixKey, std::shared_ptr<const ChannelMatrixEntry>, MatrixKeyHash>
        m_entries;
    std::function<void(const ChannelTraceRow&)> m_traceSink;
};

} // namespace dpmimo
