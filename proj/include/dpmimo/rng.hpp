// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "dpmimo/units.hpp"

namespace dpmimo
{

/// Deterministic random stream. Uniform and normal variates are produced from
/// raw 64-bit draws (not std:: distributions) so a given seed yields the same
/// sequence on every platform.
class RngStream
{
  public:
    explicit RngStream(uint64_t seed)
        : m_gen(seed)
    {
    }

    uint64_t nextU64()
    {
        return m_gen();
    }

    /// Uniform in [0, 1).
    double uniform()
    {
        return static_cast<double>(m_gen() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller.
    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0)
        {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    double normal(double mean, double stddev)
    {
        return mean + stddev * normal();
    }

    bool bernoulli(double p)
    {
        return uniform() < p;
    }

  private:
    std::mt19937_64 m_gen;
};

namespace detail
{
inline uint64_t splitmix64(uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a(std::string_view s)
{
    uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : s)
    {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}
} // namespace detail

/// Derives a seed from (run, component tag, context ids). Streams are
/// namespaced so that adding a new consumer never shifts the draws seen by
/// existing ones.
inline uint64_t mixSeed(uint64_t runIndex,
                        std::string_view tag,
                        uint64_t a = 0,
                        uint64_t b = 0,
                        uint64_t c = 0)
{
    uint64_t h = detail::splitmix64(runIndex ^ 0xD1B54A32D192ED03ULL);
    h = detail::splitmix64(h ^ detail::fnv1a(tag));
    h = detail::splitmix64(h ^ a);
    h = detail::splitmix64(h ^ b);
    h = detail::splitmix64(h ^ c);
    return h;
}

inline RngStream makeStream(uint64_t runIndex,
                            std::string_view tag,
                            uint64_t a = 0,
                            uint64_t b = 0,
                            uint64_t c = 0)
{
    return RngStream(mixSeed(runIndex, tag, a, b, c));
}

} // namespace dpmimo
