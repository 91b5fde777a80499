// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "dpmimo/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpmimo/units.hpp"

namespace dpmimo
{

void ArrayConfig::validate() const
{
    if (rowsM < 1 || colsN < 1)
    {
        throw std::invalid_argument("ArrayConfig: rowsM and colsN must be >= 1");
    }
    if (polarizationsP != 1 && polarizationsP != 2)
    {
        throw std::invalid_argument("ArrayConfig: polarizationsP must be 1 or 2");
    }
    if (dvLambda <= 0.0 || dhLambda <= 0.0)
    {
        throw std::invalid_argument("ArrayConfig: element spacings must be strictly positive");
    }
    if (polSlantAnglesDeg.size() != static_cast<size_t>(polarizationsP))
    {
        throw std::invalid_argument(
            "ArrayConfig: polSlantAnglesDeg must have one entry per polarization");
    }
}

BeamId::BeamId(double azimuthDeg, double elevationDeg)
{
    if (!std::isfinite(azimuthDeg) || !std::isfinite(elevationDeg))
    {
        throw std::invalid_argument("BeamId: angles must be finite");
    }
    // normalize azimuth into [-180, 180)
    double az = std::fmod(azimuthDeg + 180.0, 360.0);
    if (az < 0.0)
    {
        az += 360.0;
    }
    az -= 180.0;
    m_azimuthCenti = static_cast<int32_t>(std::lround(az * 100.0));
    if (m_azimuthCenti == 18000)
    {
        m_azimuthCenti = -18000;
    }
    if (elevationDeg < -1e-9 || elevationDeg > 180.0 + 1e-9)
    {
        throw std::invalid_argument("BeamId: elevation must be in [0, 180]");
    }
    m_elevationCenti = std::clamp(static_cast<int32_t>(std::lround(elevationDeg * 100.0)),
                                  static_cast<int32_t>(0),
                                  static_cast<int32_t>(18000));
}

std::vector<SubarrayPartition> buildSubarrays(const ArrayConfig& config)
{
    config.validate();
    const int n = config.numElementsPerPartition();
    const double w = 1.0 / std::sqrt(static_cast<double>(n));

    std::vector<SubarrayPartition> partitions;
    partitions.reserve(config.polarizationsP);
    for (int p = 0; p < config.polarizationsP; ++p)
    {
        SubarrayPartition part;
        part.partitionIndex = p;
        part.polSlantDeg = config.polSlantAnglesDeg[p];
        part.numElements = n;
        part.weights.assign(n, std::complex<double>(w, 0.0));
        partitions.push_back(std::move(part));
    }
    return partitions;
}

double elementAmplitudeGain(double thetaDeg, double phiDeg, ElementPattern pattern)
{
    if (pattern == ElementPattern::Isotropic)
    {
        return 1.0;
    }
    // TR 38.901 sec. 7.3: 65 deg HPBW in both planes, 30 dB limits, 8 dBi peak.
    const double av = -std::min(12.0 * std::pow((thetaDeg - 90.0) / 65.0, 2.0), 30.0);
    const double ah = -std::min(12.0 * std::pow(phiDeg / 65.0, 2.0), 30.0);
    const double a = -std::min(-(av + ah), 30.0);
    return dbToLinear(8.0 + a);
}

FieldComponents elementField(double thetaDeg,
                             double phiDeg,
                             double slantDeg,
                             ElementPattern pattern)
{
    const double amp = std::sqrt(elementAmplitudeGain(thetaDeg, phiDeg, pattern));
    const double slantRad = degToRad(slantDeg);
    return {amp * std::cos(slantRad), amp * std::sin(slantRad)};
}

namespace
{

struct Vec3
{
    double x;
    double y;
    double z;
};

Vec3 unitVector(double azimuthDeg, double elevationDeg)
{
    const double az = degToRad(azimuthDeg);
    const double el = degToRad(elevationDeg);
    return {std::sin(el) * std::cos(az), std::sin(el) * std::sin(az), std::cos(el)};
}

// Rotates a global-frame vector into the array's local frame (bearing about
// z, then downtilt about the rotated y axis).
Vec3 globalToLocal(const Vec3& v, const ArrayOrientation& o)
{
    const double a = degToRad(o.bearingDeg);
    const double b = degToRad(o.downtiltDeg);
    const Vec3 v1{v.x * std::cos(a) + v.y * std::sin(a),
                  -v.x * std::sin(a) + v.y * std::cos(a),
                  v.z};
    return {v1.x * std::cos(b) - v1.z * std::sin(b),
            v1.y,
            v1.x * std::sin(b) + v1.z * std::cos(b)};
}

struct LocalAngles
{
    double thetaDeg;
    double phiDeg;
    Vec3 unit;
};

LocalAngles localAngles(const BeamId& direction, const ArrayConfig& config)
{
    const Vec3 u = globalToLocal(unitVector(direction.azimuthDeg(), direction.elevationDeg()),
                                 config.orientation);
    const double theta = radToDeg(std::acos(std::clamp(u.z, -1.0, 1.0)));
    const double phi = radToDeg(std::atan2(u.y, u.x));
    return {theta, phi, u};
}

// Local-frame element position in wavelengths; column-major indexing.
Vec3 elementPosition(int index, const ArrayConfig& config)
{
    const int m = index % config.rowsM;
    const int n = index / config.rowsM;
    return {0.0, n * config.dhLambda, m * config.dvLambda};
}

double elementPhase(int index, const ArrayConfig& config, const Vec3& unit)
{
    const Vec3 p = elementPosition(index, config);
    return 2.0 * kPi * (p.x * unit.x + p.y * unit.y + p.z * unit.z);
}

} // namespace

std::vector<std::complex<double>> steeringWeights(const SubarrayPartition& partition,
                                                  const BeamId& direction,
                                                  const ArrayConfig& config)
{
    config.validate();
    const LocalAngles local = localAngles(direction, config);
    const int n = partition.numElements;
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));

    std::vector<std::complex<double>> weights(n);
    for (int k = 0; k < n; ++k)
    {
        const double psi = elementPhase(k, config, local.unit);
        weights[k] = std::polar(norm, psi);
    }
    return weights;
}

double arrayGainDb(const SubarrayPartition& partition,
                   std::span<const std::complex<double>> weights,
                   const BeamId& direction,
                   const ArrayConfig& config)
{
    if (weights.size() != static_cast<size_t>(partition.numElements))
    {
        throw std::invalid_argument("arrayGainDb: weights size does not match partition");
    }
    const LocalAngles local = localAngles(direction, config);

    std::complex<double> response{0.0, 0.0};
    for (int k = 0; k < partition.numElements; ++k)
    {
        const double psi = elementPhase(k, config, local.unit);
        response += std::conj(weights[k]) * std::polar(1.0, psi);
    }
    const double mag = std::abs(response);
    const double afDb = mag > 1e-150 ? 20.0 * std::log10(mag) : kPowerFloorDbm;
    const double elemDb = linearToDb(elementAmplitudeGain(local.thetaDeg, local.phiDeg,
                                                          config.pattern));
    return afDb + elemDb;
}

} // namespace dpmimo
