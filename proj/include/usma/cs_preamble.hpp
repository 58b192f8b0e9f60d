#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "usma/common.hpp"
#include "usma/sensing_matrix.hpp"

namespace usma {

/// Preamble side of the scheme: L temporal-ID bits pick one of N = 2^L
/// columns, transmitted at power P_p per symbol.
struct PreambleConfig {
    SensingMatrix matrix;
    int id_bits = 0;
    double preamble_power = 1.0;
    int rx_antennas = 1;

    void validate() const;
    /// sqrt(P_p * N): maps a unit channel gain onto the unitary-column coefficient.
    double amplitude_scale() const;
};

struct AmpConfig {
    int n_iterations = 20;
    double damping = 0.7;
    /// Bernoulli activity prior. Unset: estimated from posterior mass each iteration.
    std::optional<double> sparsity_prior;
    double gain_prior_variance = 1.0;
    double activity_threshold = 0.5;

    void validate() const;
};

struct Detection {
    std::size_t column = 0;
    /// Per-antenna coefficient estimate, in units of the unitary column (i.e. still scaled by sqrt(P_p*N)).
    std::vector<cplx> gain_estimate;
};

/// Per-iteration variances of the two message-passing modules.
struct AmpIterate {
    double lmmse_extrinsic_var = 0.0;
    double denoiser_posterior_var = 0.0;
    double sparsity = 0.0;
};

struct DetectionResult {
    std::vector<Detection> detected;  ///< sorted by column, distinct
    RVec posteriors;                  ///< activity probability per column
    std::vector<AmpIterate> trace;
};

/// Big-endian: bits[0] is the most significant.
std::size_t index_from_bits(std::span<const std::uint8_t> bits, int n_bits);
Bits bits_from_index(std::size_t index, int n_bits);

/// sqrt(P_p*N) times column `index`: every symbol has magnitude sqrt(P_p).
CVec make_preamble_symbols(const PreambleConfig& cfg, std::size_t index);

/// Joint activity detection and channel estimation from the received
/// preamble (one M-vector per antenna) with complex noise variance
/// `noise_var`. Alternates an LMMSE module matched to the row-punctured
/// unitary matrix with a Bernoulli-Gaussian MMSE denoiser that shares one
/// activity indicator across antennas.
DetectionResult amp_detect(std::span<const CVec> received, const PreambleConfig& cfg,
                           const AmpConfig& amp, double noise_var);

/// Converts detector coefficients into channel gains h (per detected user, per antenna).
std::vector<std::vector<cplx>> estimate_channels(const DetectionResult& det, const PreambleConfig& cfg);

/// Probability that at least one of the other K_a - 1 users picked the same column out of N.
double collision_probability(std::size_t n_columns, std::size_t n_active);

}  // namespace usma
