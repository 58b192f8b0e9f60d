#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usma/stats.hpp"

namespace usma::aiot {

/// Inventory-scenario deployment constants for ambient IoT.
struct AiotDeployment {
    double max_latency_s = 1.0;
    double coverage_m = 30.0;
    double max_data_rate_bps = 1000.0;
    int message_bits = 96;
    double connection_density_per_km2 = 1.5e6;
    double max_speed_kmh = 6.0;
    int peak_inventory_per_s = 100;
    double band_hz = 900e6;
    double bandwidth_hz = 180e3;
    int rx_antennas_max = 2;
    double bler_target = 0.05;
};

/// Slotted ALOHA peak throughput as used for the RFID baseline (1/e truncated to 0.367).
constexpr double kAlohaPeak = 0.367;

/// T-fold slotted ALOHA: up to `capacity` users per slot are decodable.
struct SlottedAlohaModel {
    std::size_t n_slots = 1;
    std::size_t n_users = 1;
    std::size_t capacity = 1;
};

/// floor(n_slots * 0.367).
std::size_t rfid_slotted_aloha_capacity(std::size_t n_slots);

struct OverflowEstimate {
    double fixed_slot_exact = 0.0;  ///< P(a given slot gets > T users), binomial tail
    double fixed_slot_mc = 0.0;
    Interval fixed_slot_ci{};
    double any_slot_mc = 0.0;       ///< P(some slot gets > T users)
    Interval any_slot_ci{};
    std::size_t n_mc = 0;
};

/// Monte Carlo over independent uniform slot choices, both event readings.
OverflowEstimate slot_overflow_probability(const SlottedAlohaModel& model, std::size_t n_mc, std::uint64_t seed);

struct EfficiencyReport {
    // data multiplexing
    std::size_t usma_users_per_slot = 15;
    std::size_t usma_data_chips = 800;
    std::size_t rfid_epc_chips = 200;
    std::size_t rfid_tdm_users = 0;
    double data_ratio = 0.0;
    // random access
    std::size_t rn16_slots = 60;
    std::size_t rn16_symbols = 16;
    std::size_t cs_preamble_symbols = 96;
    std::size_t cs_slots = 0;
    std::size_t rfid_served = 0;
    std::size_t usma_served = 0;
    double access_ratio = 0.0;
    OverflowEstimate overflow{};
    double overflow_claim = 0.03;
};

EfficiencyReport efficiency_report(std::size_t n_mc = 200000, std::uint64_t seed = 1);

/// Human-readable table with the intermediate arithmetic.
std::string format_report(const EfficiencyReport& r);
/// quantity,value rows.
std::string report_csv(const EfficiencyReport& r);

}  // namespace usma::aiot
