// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "dpmimo/amc.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "dpmimo/units.hpp"

namespace dpmimo
{

namespace
{

constexpr double kBlerSlopeDb = 0.5;
constexpr double kCapacityFraction = 0.85;
// Phi^-1(0.9): offset between the 0.5 and 0.1 points of the Q-model.
constexpr double kZ01 = 1.2815515655446004;

double qFunction(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

// SINR (dB) where an entry's spectral efficiency equals 0.85x Shannon
// capacity, i.e. where the calibration pins BLER = 0.1.
double calibrationSinrDb(double spectralEfficiency)
{
    const double snr = std::pow(2.0, spectralEfficiency / kCapacityFraction) - 1.0;
    return linearToDb(snr);
}

McsEntry makeEntry(int mcs, int qm, double rate1024, double se)
{
    return {mcs, qm, rate1024, se, calibrationSinrDb(se) - kBlerSlopeDb * kZ01};
}

// TS 38.214 Table 5.1.3.1-2 (MCS index table 2 for PDSCH, 256QAM).
McsTable buildTable2()
{
    std::vector<McsEntry> e;
    e.reserve(28);
    e.push_back(makeEntry(0, 2, 120.0, 0.2344));
    e.push_back(makeEntry(1, 2, 193.0, 0.3770));
    e.push_back(makeEntry(2, 2, 308.0, 0.6016));
    e.push_back(makeEntry(3, 2, 449.0, 0.8770));
    e.push_back(makeEntry(4, 2, 602.0, 1.1758));
    e.push_back(makeEntry(5, 4, 378.0, 1.4766));
    e.push_back(makeEntry(6, 4, 434.0, 1.6953));
    e.push_back(makeEntry(7, 4, 490.0, 1.9141));
    e.push_back(makeEntry(8, 4, 553.0, 2.1602));
    e.push_back(makeEntry(9, 4, 616.0, 2.4063));
    e.push_back(makeEntry(10, 4, 658.0, 2.5703));
    e.push_back(makeEntry(11, 6, 466.0, 2.7305));
    e.push_back(makeEntry(12, 6, 517.0, 3.0293));
    e.push_back(makeEntry(13, 6, 567.0, 3.3223));
    e.push_back(makeEntry(14, 6, 616.0, 3.6094));
    e.push_back(makeEntry(15, 6, 666.0, 3.9023));
    e.push_back(makeEntry(16, 6, 719.0, 4.2129));
    e.push_back(makeEntry(17, 6, 772.0, 4.5234));
    e.push_back(makeEntry(18, 6, 822.0, 4.8164));
    e.push_back(makeEntry(19, 6, 873.0, 5.1152));
    e.push_back(makeEntry(20, 8, 682.5, 5.3320));
    e.push_back(makeEntry(21, 8, 711.0, 5.5547));
    e.push_back(makeEntry(22, 8, 754.0, 5.8906));
    e.push_back(makeEntry(23, 8, 797.0, 6.2266));
    e.push_back(makeEntry(24, 8, 841.0, 6.5703));
    e.push_back(makeEntry(25, 8, 885.0, 6.9141));
    e.push_back(makeEntry(26, 8, 916.5, 7.1602));
    e.push_back(makeEntry(27, 8, 948.0, 7.4063));
    return McsTable(std::move(e));
}

// TS 38.214 Table 5.2.2.1-3 (CQI table 2, 256QAM): spectral efficiency per
// CQI index 1..15.
constexpr std::array<double, 15> kCqiTable2Se = {
    0.1523, 0.3770, 0.8770, 1.4766, 1.9141, 2.4063, 2.7305, 3.3223,
    3.9023, 4.5234, 5.1152, 5.5547, 6.2266, 6.9141, 7.4063,
};

} // namespace

const McsEntry& McsTable::at(int mcs) const
{
    if (mcs < 0 || mcs >= size())
    {
        throw std::out_of_range("McsTable: MCS index out of range");
    }
    return m_entries[static_cast<size_t>(mcs)];
}

const McsTable& mcsTable2()
{
    static const McsTable table = buildTable2();
    return table;
}

uint32_t tbsBytes(int mcs, int nPrb, int nDataSym, double overhead, const McsTable& table)
{
    const McsEntry& entry = table.at(mcs);
    if (nPrb < 1)
    {
        throw std::invalid_argument("tbsBytes: nPrb must be >= 1");
    }
    if (nDataSym < 1 || nDataSym > 14)
    {
        throw std::invalid_argument("tbsBytes: nDataSym must be in [1, 14]");
    }
    if (overhead < 0.0 || overhead >= 1.0)
    {
        throw std::invalid_argument("tbsBytes: overhead must be in [0, 1)");
    }
    const double bits =
        entry.spectralEfficiency * nPrb * 12.0 * nDataSym * (1.0 - overhead);
    return static_cast<uint32_t>(std::floor(bits / 8.0));
}

double bler(double effectiveSinrDb, int mcs, const McsTable& table)
{
    const McsEntry& entry = table.at(mcs);
    return qFunction((effectiveSinrDb - entry.blerThresholdDb) / kBlerSlopeDb);
}

int mcsFromCqi(int cqi, const McsTable& table)
{
    if (cqi < 0 || cqi > 15)
    {
        throw std::out_of_range("mcsFromCqi: CQI must be in [0, 15]");
    }
    if (cqi == 0)
    {
        return 0;
    }
    const double target = kCqiTable2Se[static_cast<size_t>(cqi - 1)];
    int best = 0;
    for (const McsEntry& entry : table.entries())
    {
        if (entry.spectralEfficiency <= target + 1e-12)
        {
            best = entry.mcs;
        }
    }
    return best;
}

int computeCqi(double sinrDb, const McsTable& table)
{
    for (int cqi = 15; cqi >= 1; --cqi)
    {
        if (bler(sinrDb, mcsFromCqi(cqi, table), table) <= 0.1)
        {
            return cqi;
        }
    }
    return 0;
}

} // namespace dpmimo
