#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usma/channel.hpp"
#include "usma/cs_preamble.hpp"
#include "usma/fec.hpp"
#include "usma/sensing_matrix.hpp"
#include "usma/sidma.hpp"

namespace usma {

/// Every parameter of one USMA configuration.
struct SystemProfile {
    std::string name;
    int packet_bits = 0;  ///< B
    int id_bits = 0;      ///< L, carried by the preamble
    TransformKind sensing = TransformKind::PartialDft;
    std::size_t n_columns = 0;  ///< N = 2^L
    std::size_t preamble_len = 0;  ///< M
    std::uint64_t selection_seed = 0;
    ConvCode code{};
    int repetition = 1;
    std::size_t data_chips = 0;  ///< M_d
    InterleaverFamily interleaver = InterleaverFamily::SeededRandom;
    std::size_t qpp_length = 32;
    bool alternating_signs = false;  ///< spreading signature on repetition copies
    double power_ratio_db = 10.0;  ///< P_p / P_d
    double data_power = 1.0;       ///< P_d
    ChannelModel channel{};
    AmpConfig amp{};
    int outer_iterations = 10;
    std::size_t total_resources = 0;
    /// Informational: chip rate used for the coherence-time argument (0 if unused).
    double chip_rate_hz = 0.0;

    int payload_bits() const { return packet_bits - id_bits; }
    std::size_t coded_bits() const { return code.n_coded(static_cast<std::size_t>(payload_bits())); }
    std::size_t occupied_chips() const { return static_cast<std::size_t>(repetition) * coded_bits(); }
    double preamble_power() const { return data_power * db_to_linear(power_ratio_db); }
    double frame_duration_s() const;

    /// Arithmetic self-checks; throws ConfigError on the first violation.
    void validate() const;
};

/// Built-ins: "gmac-paper", "aiot-paper", "aiot-single".
SystemProfile make_profile(const std::string& name);
std::vector<std::string> builtin_profile_names();

EnergyBudget energy_budget(const SystemProfile& p);
NoiseLevel noise_from_ebn0(const SystemProfile& p, double ebn0_db);
PreambleConfig preamble_config(const SystemProfile& p, const SensingMatrix& matrix);
SensingMatrix build_sensing_matrix(const SystemProfile& p);
PatternSpec pattern_spec(const SystemProfile& p);
inline ExpansionPattern build_pattern(const SystemProfile& p, std::size_t temporal_id) {
    return build_pattern(pattern_spec(p), temporal_id);
}

}  // namespace usma
