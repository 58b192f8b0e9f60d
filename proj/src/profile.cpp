#include "usma/profile.hpp"

#include <bit>
#include <cmath>

namespace usma {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

SystemProfile gmac_paper() {
    SystemProfile p;
    p.name = "gmac-paper";
    p.packet_bits = 100;
    p.id_bits = 13;
    p.sensing = TransformKind::PartialDft;
    p.n_columns = 8192;
    p.preamble_len = 2000;
    p.selection_seed = 0x5eed0001;
    // 87 info + 6 tail -> 186 coded bits; floor(28000/186) = 150 copies, 100 spare chips.
    p.repetition = 150;
    p.data_chips = 28000;
    p.interleaver = InterleaverFamily::SeededRandom;
    // Unsigned copies of one bit meet the same interferer bits r^2/C ~ 121 times,
    // which correlates interference across the combined copies.
    p.alternating_signs = true;
    p.power_ratio_db = 10.0;
    p.channel = ChannelModel::gmac();
    p.outer_iterations = 10;
    p.total_resources = 30000;
    return p;
}

SystemProfile aiot_paper() {
    SystemProfile p;
    p.name = "aiot-paper";
    p.packet_bits = 96;
    p.id_bits = 8;
    p.sensing = TransformKind::PartialHadamard;
    p.n_columns = 256;
    p.preamble_len = 96;
    p.selection_seed = 0x5eed0002;
    // 88 info + 6 tail -> 188 coded bits, x2 -> 376 chips in an 800-chip frame.
    p.repetition = 2;
    p.data_chips = 800;
    p.interleaver = InterleaverFamily::AiotQpp;
    p.qpp_length = 32;
    p.power_ratio_db = 10.0;
    p.channel = ChannelModel::rayleigh(2);
    p.outer_iterations = 10;
    p.total_resources = 896;
    p.chip_rate_hz = 180e3;
    return p;
}

// Single-user reference: same code and preamble, no repetition, padding or
// interleaving. P_p/P_d = 5 keeps the preamble's share of packet energy equal
// to aiot-paper's (960 : 376 == 480 : 188), so E_b/N_0 axes line up.
SystemProfile aiot_single() {
    SystemProfile p = aiot_paper();
    p.name = "aiot-single";
    p.repetition = 1;
    p.data_chips = 188;
    p.interleaver = InterleaverFamily::Identity;
    p.power_ratio_db = 10.0 * std::log10(5.0);
    p.total_resources = 96 + 188;
    return p;
}

}  // namespace

double SystemProfile::frame_duration_s() const {
    return chip_rate_hz > 0.0 ? static_cast<double>(total_resources) / chip_rate_hz : 0.0;
}

void SystemProfile::validate() const {
    if (packet_bits <= id_bits) throw ConfigError(name + ": packet must carry more bits than the temporal id");
    if (id_bits < 1 || id_bits > 30) throw ConfigError(name + ": id_bits out of range");
    if (n_columns != (std::size_t{1} << id_bits)) throw ConfigError(name + ": L must equal log2(N)");
    if (preamble_len == 0 || preamble_len > n_columns) throw ConfigError(name + ": need 0 < M <= N");
    if (sensing == TransformKind::PartialHadamard && !std::has_single_bit(n_columns)) {
        throw ConfigError(name + ": Hadamard needs power-of-two N");
    }
    if (preamble_len + data_chips != total_resources) throw ConfigError(name + ": M + M_d must equal the total resources");
    if (repetition < 1) throw ConfigError(name + ": repetition must be >= 1");
    if (occupied_chips() > data_chips) throw ConfigError(name + ": r * C exceeds M_d");
    if (interleaver == InterleaverFamily::AiotQpp && data_chips % qpp_length != 0) {
        throw ConfigError(name + ": M_d must be a multiple of the QPP length");
    }
    if (!(data_power > 0.0)) throw ConfigError(name + ": data power must be positive");
    if (outer_iterations < 1) throw ConfigError(name + ": need at least one outer iteration");
    channel.validate();
    amp.validate();
}

std::vector<std::string> builtin_profile_names() { return {"gmac-paper", "aiot-paper", "aiot-single"}; }

SystemProfile make_profile(const std::string& name) {
    SystemProfile p;
    if (name == "gmac-paper") {
        p = gmac_paper();
    } else if (name == "aiot-paper") {
        p = aiot_paper();
    } else if (name == "aiot-single") {
        p = aiot_single();
    } else {
        throw ConfigError("unknown profile '" + name + "'");
    }
    p.validate();
    return p;
}

EnergyBudget energy_budget(const SystemProfile& p) {
    return {p.preamble_power() * static_cast<double>(p.preamble_len),
            p.data_power * static_cast<double>(p.occupied_chips()), p.packet_bits};
}

NoiseLevel noise_from_ebn0(const SystemProfile& p, double ebn0_db) {
    return noise_from_ebn0(energy_budget(p), ebn0_db);
}

SensingMatrix build_sensing_matrix(const SystemProfile& p) {
    return SensingMatrix::build(p.sensing, p.n_columns, p.preamble_len, p.selection_seed);
}

PreambleConfig preamble_config(const SystemProfile& p, const SensingMatrix& matrix) {
    PreambleConfig cfg{matrix, p.id_bits, p.preamble_power(), p.channel.rx_antennas};
    cfg.validate();
    return cfg;
}

PatternSpec pattern_spec(const SystemProfile& p) {
    PatternSpec s;
    s.family = p.interleaver;
    s.repetition = p.repetition;
    s.n_coded = p.coded_bits();
    s.frame_len = p.data_chips;
    s.n_ids = p.n_columns;
    s.seed = fnv1a(p.name);
    s.qpp_length = p.qpp_length;
    s.alternating_signs = p.alternating_signs;
    return s;
}

}  // namespace usma
