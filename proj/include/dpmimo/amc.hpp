// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace dpmimo
{

struct McsEntry
{
    int mcs;
    int modulationOrder;        // bits per symbol (2 = QPSK ... 8 = 256QAM)
    double codeRate1024;
    double spectralEfficiency;  // bits/s/Hz
    double blerThresholdDb;     // SINR at which the BLER model crosses 0.5
};

/// NR modulation and coding scheme table, with a BLER threshold per entry
/// calibrated so that BLER = 0.1 at the SINR where the entry's spectral
/// efficiency equals 0.85x Shannon capacity.
class McsTable
{
  public:
    explicit McsTable(std::vector<McsEntry> entries)
        : m_entries(std::move(entries))
    {
    }

    const McsEntry& at(int mcs) const; // throws std::out_of_range
    int size() const
    {
        return static_cast<int>(m_entries.size());
    }
    int maxMcs() const
    {
        return size() - 1;
    }
    const std::vector<McsEntry>& entries() const
    {
        return m_entries;
    }

  private:
    std::vector<McsEntry> m_entries;
};

/// NR MCS Table2 (up to 256QAM), 28 entries.
const McsTable& mcsTable2();

/// Transport block size for one stream over the given allocation.
uint32_t tbsBytes(int mcs, int nPrb, int nDataSym, double overhead,
                  const McsTable& table = mcsTable2());

/// Block error rate of one transmission (or HARQ-combined transmissions) at
/// the given effective SINR: Q((sinr - t_mcs) / 0.5 dB).
double bler(double effectiveSinrDb, int mcs, const McsTable& table = mcsTable2());

/// Largest CQI (0..15) whose associated MCS achieves BLER <= 0.1 at this
/// SINR; 0 when even the lowest entry does not.
int computeCqi(double sinrDb, const McsTable& table = mcsTable2());

/// MCS index a scheduler uses for a reported CQI; CQI 0 maps to MCS 0.
int mcsFromCqi(int cqi, const McsTable& table = mcsTable2());

} // namespace dpmimo
