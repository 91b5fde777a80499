// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace dpmimo
{

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSpeedOfLight = 299792458.0; // m/s

// Power floor used wherever a linear quantity can underflow to zero.
inline constexpr double kPowerFloorDbm = -300.0;

inline double degToRad(double deg)
{
    return deg * kPi / 180.0;
}

inline double radToDeg(double rad)
{
    return rad * 180.0 / kPi;
}

inline double dbToLinear(double db)
{
    return std::pow(10.0, db / 10.0);
}

inline double linearToDb(double lin)
{
    return 10.0 * std::log10(lin);
}

inline double dbmToMw(double dbm)
{
    return std::pow(10.0, dbm / 10.0);
}

inline double mwToDbm(double mw)
{
    return mw > 0.0 ? 10.0 * std::log10(mw) : kPowerFloorDbm;
}

} // namespace dpmimo
