#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "usma/common.hpp"
#include "usma/fec.hpp"

namespace usma {

enum class InterleaverFamily {
    SeededRandom,  ///< one seeded random permutation of the whole frame per temporal id
    AiotQpp,       ///< seeded block interleaver followed by a per-chunk QPP
    Identity,      ///< no repetition spreading, chips in coded-bit order
};

const char* to_string(InterleaverFamily family);

struct QppParams {
    unsigned f1 = 1;
    unsigned f2 = 0;
    bool operator==(const QppParams&) const = default;
};

/// Everything needed to derive a user's chip pattern from its temporal id.
struct PatternSpec {
    InterleaverFamily family = InterleaverFamily::SeededRandom;
    int repetition = 1;
    std::size_t n_coded = 0;
    std::size_t frame_len = 0;
    std::size_t n_ids = 1;
    std::uint64_t seed = 0;          ///< profile-level tag mixed into per-id seeds
    std::size_t qpp_length = 32;
    /// Spreading signature: copy c is sent with sign (-1)^c.
    bool alternating_signs = false;
};

/// Placement of r copies of C coded bits onto distinct chips of an M_d-chip frame.
/// `placement[copy * n_coded + bit]` is the chip index carrying that copy.
struct ExpansionPattern {
    InterleaverFamily family = InterleaverFamily::SeededRandom;
    int repetition = 1;
    std::size_t n_coded = 0;
    std::size_t frame_len = 0;
    std::vector<std::uint32_t> placement;
    QppParams qpp{};
    std::size_t block_rows = 0;
    std::size_t block_cols = 0;
    bool alternating_signs = false;

    std::size_t occupied() const { return placement.size(); }
    /// +1 or -1 applied to the coded-bit value of copy `q` (placement order).
    double copy_sign(std::size_t q) const { return alternating_signs && (q / n_coded) % 2 == 1 ? -1.0 : 1.0; }
    bool operator==(const ExpansionPattern&) const = default;
};

/// pi(i) = (f1*i + f2*i^2) mod K. Throws ConfigError unless pi is a bijection on [0, K).
std::vector<std::uint32_t> qpp_permutation(std::size_t length, unsigned f1, unsigned f2);

/// The 128 distinct QPPs for K = 32 (f1 odd, f2 even below 16), indexed by temporal id mod 128.
const std::vector<QppParams>& qpp_table_32();

ExpansionPattern build_pattern(const PatternSpec& spec, std::size_t temporal_id);

/// Copies coded bit b onto its r chips as +sqrt(P_d) (bit 0) or -sqrt(P_d),
/// times copy_sign for signed patterns; all other chips are 0.
RVec expand_to_frame(std::span<const std::uint8_t> coded_bits, const ExpansionPattern& pattern,
                     double data_power);

struct SoftSymbol {
    double mean = 0.0;
    double variance = 0.0;
};

/// BPSK soft estimate: mean = sqrt(P_d) tanh(llr/2), variance = P_d - mean^2.
SoftSymbol soft_symbol_stats(double llr, double data_power);

/// Received data chips in split real/imag layout, one row per antenna.
struct ChipObservation {
    std::vector<RVec> re;
    std::vector<RVec> im;

    static ChipObservation from(std::span<const CVec> per_antenna);
    std::size_t antennas() const { return re.size(); }
    std::size_t chips() const { return re.empty() ? 0 : re.front().size(); }
};

/// One user's view inside the chip-level detector.
struct UserSoftState {
    const ExpansionPattern* pattern = nullptr;
    std::vector<cplx> gains;  ///< per antenna
    RVec mean;                ///< dense over the frame; 0 on unoccupied chips
    RVec var;                 ///< dense over the frame; 0 on unoccupied chips
};

/// Initial state: no feedback yet, every occupied chip has mean 0 and variance P_d.
UserSoftState make_soft_state(const ExpansionPattern& pattern, std::vector<cplx> gains, double data_power);

/// Elementary signal estimator, Jacobi schedule. Returns per user the
/// extrinsic LLR of every occupied chip, in `placement` order. Interference
/// is treated as Gaussian; statistics are accounted per real dimension and
/// LLRs from different antennas are summed. `noise_var` is the complex noise
/// variance N_0 per antenna.
std::vector<RVec> ese_iterate(const ChipObservation& rx, std::span<const UserSoftState> users,
                              double noise_var, double data_power);

struct ReceiverUser {
    const ExpansionPattern* pattern = nullptr;
    std::vector<cplx> gains;
};

struct ReceiverConfig {
    ConvCode code{};
    int outer_iterations = 10;
    double data_power = 1.0;
    double noise_var = 1.0;
    /// Replace noise_var by max(noise_var, residual power not explained by the
    /// soft estimates) before every ESE pass, so interference the receiver does
    /// not model (a shared id, gain estimation error) is not treated as absent.
    bool track_residual = false;
};

struct ReceiverOutput {
    std::vector<Bits> info_bits;
    std::vector<bool> converged;      ///< hard decisions unchanged over the last outer iteration
    std::vector<double> mean_abs_llr; ///< per outer iteration, over all users' info posteriors
};

/// ESE <-> BCJR turbo loop. Each coded bit's chip LLRs are summed into a
/// channel LLR; each chip is fed back the bit's decoder extrinsic plus the
/// LLRs of the bit's other copies (posterior minus its own contribution).
ReceiverOutput iterative_receive(const ChipObservation& rx, std::span<const ReceiverUser> users,
                                 const ReceiverConfig& cfg);

}  // namespace usma
