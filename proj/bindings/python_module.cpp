// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dpmimo/amc.hpp"
#include "dpmimo/antenna.hpp"
#include "dpmimo/channel.hpp"
#include "dpmimo/engine.hpp"
#include "dpmimo/phy.hpp"

namespace py = pybind11;
using namespace dpmimo;

namespace
{

// Convenience wrapper: UMi pathloss from plain geometry instead of a cached
// ChannelParams instance.
double umiPathlossDb(double distance2dM,
                     double distance3dM,
                     bool los,
                     double fcGhz,
                     double hBsM,
                     double hUtM)
{
    ChannelParams params;
    params.los = los;
    params.distance2dM = distance2dM;
    params.distance3dM = distance3dM;
    return ChannelModel::pathlossDb(params, fcGhz, hBsM, hUtM);
}

RiResult computeRiWrapper(const RiConfig& config,
                          std::optional<double> sinr0Db,
                          std::optional<double> sinr1Db)
{
    return computeRi(config, {sinr0Db, sinr1Db});
}

} // namespace

PYBIND11_MODULE(_dpmimo, m)
{
    m.doc() = "Slot-level downlink simulator of 2-stream MIMO spatial multiplexing "
              "over dual-polarized antenna subarrays";

    py::enum_<ElementPattern>(m, "ElementPattern")
        .value("Isotropic", ElementPattern::Isotropic)
        .value("Directional3gpp", ElementPattern::Directional3gpp);

    py::enum_<RiMode>(m, "RiMode")
        .value("Fixed", RiMode::Fixed)
        .value("Adaptive", RiMode::Adaptive);

    py::enum_<XpdMode>(m, "XpdMode")
        .value("Gaussian3gpp", XpdMode::Gaussian3gpp)
        .value("Fixed", XpdMode::Fixed)
        .value("PerfectIsolation", XpdMode::PerfectIsolation);

    py::enum_<SchedulerMode>(m, "SchedulerMode")
        .value("TdmaRoundRobin", SchedulerMode::TdmaRoundRobin)
        .value("OfdmaBeamGrouped", SchedulerMode::OfdmaBeamGrouped);

    py::class_<ArrayOrientation>(m, "ArrayOrientation")
        .def(py::init<>())
        .def_readwrite("bearing_deg", &ArrayOrientation::bearingDeg)
        .def_readwrite("downtilt_deg", &ArrayOrientation::downtiltDeg);

    py::class_<ArrayConfig>(m, "ArrayConfig")
        .def(py::init<>())
        .def_readwrite("rows_m", &ArrayConfig::rowsM)
        .def_readwrite("cols_n", &ArrayConfig::colsN)
        .def_readwrite("polarizations_p", &ArrayConfig::polarizationsP)
        .def_readwrite("dv_lambda", &ArrayConfig::dvLambda)
        .def_readwrite("dh_lambda", &ArrayConfig::dhLambda)
        .def_readwrite("pattern", &ArrayConfig::pattern)
        .def_readwrite("orientation", &ArrayConfig::orientation)
        .def_readwrite("pol_slant_angles_deg", &ArrayConfig::polSlantAnglesDeg)
        .def("validate", &ArrayConfig::validate);

    py::class_<SubarrayPartition>(m, "SubarrayPartition")
        .def(py::init<>())
        .def_readwrite("partition_index", &SubarrayPartition::partitionIndex)
        .def_readwrite("pol_slant_deg", &SubarrayPartition::polSlantDeg)
        .def_readwrite("num_elements", &SubarrayPartition::numElements)
        .def_readwrite("weights", &SubarrayPartition::weights);

    py::class_<BeamId>(m, "BeamId")
        .def(py::init<double, double>(), py::arg("azimuth_deg"), py::arg("elevation_deg"))
        .def_property_readonly("azimuth_deg", &BeamId::azimuthDeg)
        .def_property_readonly("elevation_deg", &BeamId::elevationDeg)
        .def(py::self == py::self);

    m.def("build_subarrays", &buildSubarrays, py::arg("config"));
    m.def("element_field",
          [](double thetaDeg, double phiDeg, double slantDeg, ElementPattern pattern) {
              const FieldComponents f = elementField(thetaDeg, phiDeg, slantDeg, pattern);
              return std::make_pair(f.fTheta, f.fPhi);
          },
          py::arg("theta_deg"), py::arg("phi_deg"), py::arg("slant_deg"),
          py::arg("pattern"));
    m.def("steering_weights", &steeringWeights, py::arg("partition"), py::arg("direction"),
          py::arg("config"));
    m.def("array_gain_db",
          [](const SubarrayPartition& partition,
             const std::vector<std::complex<double>>& weights, const BeamId& direction,
             const ArrayConfig& config) {
              return arrayGainDb(partition, weights, direction, config);
          },
          py::arg("partition"), py::arg("weights"), py::arg("direction"), py::arg("config"));

    m.def("umi_pathloss_db", &umiPathlossDb, py::arg("distance_2d_m"),
          py::arg("distance_3d_m"), py::arg("los"), py::arg("fc_ghz") = 3.5,
          py::arg("h_bs_m") = 10.0, py::arg("h_ut_m") = 1.5);
    m.def("umi_los_probability", &ChannelModel::losProbability, py::arg("distance_2d_m"));

    m.def("split_tx_power_dbm", &splitTxPowerDbm, py::arg("total_dbm"),
          py::arg("n_active_streams"));
    m.def("compute_stream_sinr_db", &computeStreamSinrDb, py::arg("co_dbm"),
          py::arg("cross_dbm"), py::arg("noise_dbm"), py::arg("rho"));
    m.def("noise_power_dbm", &noisePowerDbm, py::arg("n_prb"), py::arg("noise_figure_db"),
          py::arg("numerology") = 0);
    m.def("bler", [](double sinrDb, int mcs) { return bler(sinrDb, mcs); },
          py::arg("effective_sinr_db"), py::arg("mcs"));
    m.def("compute_cqi", [](double sinrDb) { return computeCqi(sinrDb); },
          py::arg("sinr_db"));
    m.def("mcs_from_cqi", [](int cqi) { return mcsFromCqi(cqi); }, py::arg("cqi"));
    m.def("tbs_bytes",
          [](int mcs, int nPrb, int nDataSym, double overhead) {
              return tbsBytes(mcs, nPrb, nDataSym, overhead);
          },
          py::arg("mcs"), py::arg("n_prb"), py::arg("n_data_sym"), py::arg("overhead"));
    m.def("mcs_table2", []() {
        py::list rows;
        for (const McsEntry& e : mcsTable2().entries())
        {
            py::dict row;
            row["mcs"] = e.mcs;
            row["modulation_order"] = e.modulationOrder;
            row["code_rate_1024"] = e.codeRate1024;
            row["spectral_efficiency"] = e.spectralEfficiency;
            rows.append(row);
        }
        return rows;
    });

    py::class_<RiConfig>(m, "RiConfig")
        .def(py::init<>())
        .def_readwrite("mode", &RiConfig::mode)
        .def_readwrite("fixed_ri", &RiConfig::fixedRi)
        .def_readwrite("threshold1_db", &RiConfig::threshold1Db)
        .def_readwrite("threshold2_db", &RiConfig::threshold2Db);

    py::class_<RiResult>(m, "RiResult")
        .def_readonly("ri", &RiResult::ri)
        .def_readonly("report_both_cqis", &RiResult::reportBothCqis);

    m.def("compute_ri", &computeRiWrapper, py::arg("config"), py::arg("sinr0_db"),
          py::arg("sinr1_db") = py::none());

    py::class_<HarqSoftState>(m, "HarqSoftState")
        .def(py::init<>())
        .def("reset", &HarqSoftState::reset, py::arg("stream"))
        .def("combine", &HarqSoftState::combine, py::arg("stream"), py::arg("new_sinr_db"))
        .def("effective_sinr_db", &HarqSoftState::effectiveSinrDb, py::arg("stream"))
        .def("transmission_count", &HarqSoftState::transmissionCount, py::arg("stream"));

    py::class_<XpdConfig>(m, "XpdConfig")
        .def(py::init<>())
        .def_readwrite("mode", &XpdConfig::mode)
        .def_readwrite("fixed_db", &XpdConfig::fixedDb);

    py::class_<TrafficConfig>(m, "TrafficConfig")
        .def(py::init<>())
        .def_readwrite("packet_bytes", &TrafficConfig::packetBytes)
        .def_readwrite("offered_rate_bps", &TrafficConfig::offeredRateBps)
        .def_readwrite("start_s", &TrafficConfig::startS)
        .def_readwrite("stop_s", &TrafficConfig::stopS);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("distance_m", &ScenarioConfig::distanceM)
        .def_readwrite("fc_ghz", &ScenarioConfig::fcGhz)
        .def_readwrite("bandwidth_mhz", &ScenarioConfig::bandwidthMhz)
        .def_readwrite("numerology", &ScenarioConfig::numerology)
        .def_readwrite("n_prb", &ScenarioConfig::nPrb)
        .def_readwrite("gnb_power_dbm", &ScenarioConfig::gnbPowerDbm)
        .def_readwrite("gnb_height_m", &ScenarioConfig::gnbHeightM)
        .def_readwrite("ue_height_m", &ScenarioConfig::ueHeightM)
        .def_readwrite("gnb_array", &ScenarioConfig::gnbArray)
        .def_readwrite("ue_array", &ScenarioConfig::ueArray)
        .def_readwrite("ri_config", &ScenarioConfig::riConfig)
        .def_readwrite("rho", &ScenarioConfig::rho)
        .def_readwrite("rng_run", &ScenarioConfig::rngRun)
        .def_readwrite("sim_duration_s", &ScenarioConfig::simDurationS)
        .def_readwrite("traffic", &ScenarioConfig::traffic)
        .def_readwrite("noise_figure_db", &ScenarioConfig::noiseFigureDb)
        .def_readwrite("coherence_slots", &ScenarioConfig::coherenceSlots)
        .def_readwrite("cqi_feedback_delay_slots", &ScenarioConfig::cqiFeedbackDelaySlots)
        .def_readwrite("harq_feedback_delay_slots", &ScenarioConfig::harqFeedbackDelaySlots)
        .def_readwrite("xpd", &ScenarioConfig::xpd)
        .def_readwrite("scheduler_mode", &ScenarioConfig::schedulerMode)
        .def_readwrite("ue_distances_m", &ScenarioConfig::ueDistancesM)
        .def("validate", &ScenarioConfig::validate);

    py::class_<StatsRecord>(m, "StatsRecord")
        .def_readonly("distance_m", &StatsRecord::distanceM)
        .def_readonly("rng_run", &StatsRecord::rngRun)
        .def_readonly("tx_bytes", &StatsRecord::txBytes)
        .def_readonly("rx_bytes", &StatsRecord::rxBytes)
        .def_readonly("lost_bytes", &StatsRecord::lostBytes)
        .def_readonly("queued_bytes", &StatsRecord::queuedBytes)
        .def_readonly("in_flight_bytes", &StatsRecord::inFlightBytes)
        .def_readonly("tx_packets", &StatsRecord::txPackets)
        .def_readonly("rx_packets", &StatsRecord::rxPackets)
        .def_readonly("lost_packets", &StatsRecord::lostPackets)
        .def_readonly("throughput_mbps", &StatsRecord::throughputMbps)
        .def_readonly("mean_delay_ms", &StatsRecord::meanDelayMs)
        .def_readonly("mean_jitter_ms", &StatsRecord::meanJitterMs)
        .def_readonly("mean_ri", &StatsRecord::meanRi)
        .def_readonly("harq_new_tx", &StatsRecord::harqNewTx)
        .def_readonly("harq_retx", &StatsRecord::harqRetx)
        .def_readonly("tb_dropped", &StatsRecord::tbDropped);

    py::class_<DistanceAggregate>(m, "DistanceAggregate")
        .def_readonly("distance_m", &DistanceAggregate::distanceM)
        .def_readonly("mean_throughput_mbps", &DistanceAggregate::meanThroughputMbps)
        .def_readonly("std_throughput_mbps", &DistanceAggregate::stdThroughputMbps)
        .def_readonly("mean_ri", &DistanceAggregate::meanRi);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("runs", &SweepResult::runs)
        .def_readonly("aggregates", &SweepResult::aggregates);

    m.def("run", &runScenario, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("sweep", &sweep, py::arg("base_config"), py::arg("distances_m"),
          py::arg("rng_runs"), py::arg("jobs") = 0,
          py::call_guard<py::gil_scoped_release>());
}
