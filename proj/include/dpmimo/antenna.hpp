// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dpmimo
{

enum class ElementPattern
{
    Isotropic,
    Directional3gpp, // TR 38.901 sec. 7.3 element, 8 dBi peak gain
};

struct ArrayOrientation
{
    double bearingDeg = 0.0;  // rotation about +z, 0 = boresight along +x
    double downtiltDeg = 0.0; // positive tilts the boresight below the horizon
};

/// Dual-polarized uniform planar array: N columns, M same-polarization
/// elements per column, P polarizations. Elements sit on a rectangular
/// lattice in the local y-z plane (boresight +x), indexed column-major:
/// element k -> row k % M, column k / M.
struct ArrayConfig
{
    int rowsM = 1;
    int colsN = 1;
    int polarizationsP = 1;
    double dvLambda = 0.5; // vertical spacing, carrier wavelengths
    double dhLambda = 0.5; // horizontal spacing, carrier wavelengths
    ElementPattern pattern = ElementPattern::Isotropic;
    ArrayOrientation orientation{};
    std::vector<double> polSlantAnglesDeg = {0.0};

    int numElementsPerPartition() const
    {
        return rowsM * colsN;
    }

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/// One polarization group of the planar array, driven by one RF chain and one
/// analog beamforming vector.
struct SubarrayPartition
{
    int partitionIndex = 0;
    double polSlantDeg = 0.0;
    int numElements = 1;
    std::vector<std::complex<double>> weights;
};

/// Beam steering direction, quantized to 0.01 degrees.
/// Azimuth in [-180, 180) measured from +x in the x-y plane, elevation is the
/// zenith angle in [0, 180] measured from +z (boresight = 90).
class BeamId
{
  public:
    BeamId(double azimuthDeg, double elevationDeg);

    double azimuthDeg() const
    {
        return m_azimuthCenti / 100.0;
    }

    double elevationDeg() const
    {
        return m_elevationCenti / 100.0;
    }

    friend bool operator==(const BeamId& lhs, const BeamId& rhs) = default;

  private:
    int32_t m_azimuthCenti;
    int32_t m_elevationCenti;
};

/// The pair of per-stream beams a gNB uses towards one UE. An absent second
/// beam differs from any present one.
struct BeamConfId
{
    std::array<std::optional<BeamId>, 2> beamPerStream;

    BeamConfId() = default;
    explicit BeamConfId(BeamId b0)
        : beamPerStream{b0, std::nullopt}
    {
    }
    BeamConfId(BeamId b0, BeamId b1)
        : beamPerStream{b0, b1}
    {
    }

    friend bool operator==(const BeamConfId& lhs, const BeamConfId& rhs) = default;
};

struct FieldComponents
{
    double fTheta; // vertical polarization component
    double fPhi;   // horizontal polarization component
};

/// Builds the P per-polarization partitions of the array, each with M*N
/// elements and uniform zero-phase weights of norm 1.
std::vector<SubarrayPartition> buildSubarrays(const ArrayConfig& config);

/// Element amplitude (linear power) gain at local angles.
double elementAmplitudeGain(double thetaDeg, double phiDeg, ElementPattern pattern);

/// Polarized field components of one element at local angles, model-2
/// decomposition: f_theta = sqrt(A) cos(slant), f_phi = sqrt(A) sin(slant).
FieldComponents elementField(double thetaDeg,
                             double phiDeg,
                             double slantDeg,
                             ElementPattern pattern);

/// Conjugate phase-alignment weights steering the partition towards the given
/// direction (global frame); unit norm.
std::vector<std::complex<double>> steeringWeights(const SubarrayPartition& partition,
                                                  const BeamId& direction,
                                                  const ArrayConfig& config);

/// Steered array response in dB: 20*log10 |sum_k w_k^* e^{j psi_k(dir)}| plus
/// the element pattern gain at that direction. At the steered direction this
/// equals 10*log10(numElements) + element gain.
double arrayGainDb(const SubarrayPartition& partition,
                   std::span<const std::complex<double>> weights,
                   const BeamId& direction,
                   const ArrayConfig& config);

} // namespace dpmimo
