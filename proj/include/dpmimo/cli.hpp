// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dpmimo/engine.hpp"

namespace dpmimo
{

/// Parsed command line; every default reproduces the reference scenario.
struct CliArgs
{
    double distanceM = 10.0;
    std::string riScheme = "adaptive"; // fixed | adaptive
    int fixedRi = 1;
    double threshold1Db = 7.0;
    double threshold2Db = 12.0;
    uint32_t rngRun = 1;
    std::string scenario = "UMi";
    int mcsTable = 2;
    double rho = 0.0;
    double durationS = 2.0;
    std::string outDir = ".";
    std::vector<double> sweepDistancesM;
    std::vector<uint32_t> sweepRngRuns;

    uint32_t packetBytes = 1000;
    double offeredRateMbps = 250.0;
    unsigned jobs = 0; // 0: one per hardware thread (capped)
    std::string phyTracePath;
    std::string macTracePath;
    std::string channelTracePath;

    bool sweepMode() const
    {
        return !sweepDistancesM.empty() || !sweepRngRuns.empty();
    }
};

/// Engine configuration equivalent to the parsed flags.
ScenarioConfig toScenarioConfig(const CliArgs& args);

/// Writes results.csv and summary.txt under outDir and prints the summary to
/// `out`. Throws std::runtime_error when the directory is not writable.
void emitOutputs(const SweepResult& result, const std::string& outDir, std::ostream& out);

/// Full CLI entry point. Exit codes: 0 ok, 2 usage error, 1 runtime error.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dpmimo
