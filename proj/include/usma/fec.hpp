#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "usma/common.hpp"

namespace usma {

/// LLRs are natural-log ratios log P(bit=0)/P(bit=1); positive means 0.
constexpr double kLlrClamp = 50.0;

/// Rate-1/2 feed-forward convolutional code, zero-tail terminated.
///
/// Generators are octal with the MSB tapping the current input bit, so the
/// impulse response of 133 is 1,0,1,1,0,1,1. Coded output for input step t is
/// [g0(t), g1(t)].
class ConvCode {
public:
    ConvCode(unsigned g0 = 0133, unsigned g1 = 0171, int constraint_length = 7);

    int constraint_length() const { return constraint_length_; }
    int memory() const { return constraint_length_ - 1; }
    std::size_t n_states() const { return std::size_t{1} << memory(); }
    std::array<unsigned, 2> generators() const { return generators_; }

    std::size_t n_coded(std::size_t k_info) const { return 2 * (k_info + static_cast<std::size_t>(memory())); }
    std::size_t n_info(std::size_t n_coded) const;

    std::size_t next_state(std::size_t state, unsigned input) const { return next_[2 * state + input]; }
    /// Two coded bits packed as (c0 << 1) | c1.
    unsigned output(std::size_t state, unsigned input) const { return out_[2 * state + input]; }

private:
    std::array<unsigned, 2> generators_;
    int constraint_length_;
    std::vector<std::uint32_t> next_;
    std::vector<std::uint8_t> out_;
};

Bits conv_encode(const ConvCode& code, std::span<const std::uint8_t> info_bits);

struct BcjrOutput {
    RVec extrinsic;       ///< per coded bit: posterior - channel - prior
    RVec coded_posterior; ///< per coded bit
    RVec info_posterior;  ///< per info bit (tail excluded)
    Bits hard_info;
};

/// Exact MAP forward-backward over the full trellis, run in the probability
/// domain with per-step normalization (equivalent to log-MAP with exact max*).
/// `prior_llr` may be empty (all zero).
BcjrOutput bcjr_decode(const ConvCode& code, std::span<const double> channel_llr,
                       std::span<const double> prior_llr = {});

/// Maximum-likelihood sequence decision for the same branch metrics.
Bits viterbi_decode(const ConvCode& code, std::span<const double> channel_llr);

}  // namespace usma
