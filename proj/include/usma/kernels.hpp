#pragma once

// Data-parallel inner loops used by the transforms and the chip-level
// multi-user detector. Each kernel exists as a scalar reference and, where
// the host supports it, an AVX2 variant; `kernels()` picks one at runtime.
// Setting USMA_SIMD=scalar in the environment forces the reference path.

#include <complex>
#include <cstddef>

namespace usma::kernels {

/// Structure-of-arrays view of per-chip interference aggregates for one
/// receive antenna. `var` is sum |h|^2 v, `w` is sum h^2 v (complex).
struct AggregateView {
    double* mean_re;
    double* mean_im;
    double* var;
    double* w_re;
    double* w_im;
};

struct ConstAggregateView {
    const double* mean_re;
    const double* mean_im;
    const double* var;
    const double* w_re;
    const double* w_im;
};

struct KernelTable {
    const char* name;

    /// In-place unnormalized Walsh-Hadamard butterfly over n (power of two) complex values.
    void (*fwht)(std::complex<double>* data, std::size_t n);

    /// out[j] += gain * x[j] for a real sequence x.
    void (*accumulate_real)(std::complex<double> gain, const double* x, std::size_t n,
                            std::complex<double>* out);

    /// Adds one user's soft-symbol statistics (mean, var), scaled by its gain, to the aggregates.
    void (*ese_accumulate)(std::complex<double> gain, const double* mean, const double* var,
                           std::size_t n, AggregateView agg);

    /// llr[j] += real-dimension extrinsic LLR of one user on one antenna.
    /// `noise_real` is the noise variance per real dimension, `amplitude` is sqrt(P_d).
    void (*ese_extrinsic)(std::complex<double> gain, const double* mean, const double* var,
                          std::size_t n, const double* rx_re, const double* rx_im,
                          ConstAggregateView agg, double noise_real, double amplitude,
                          double* llr);
};

const KernelTable& scalar_table();

/// nullptr when the host CPU (or the build) lacks AVX2+FMA.
const KernelTable* avx2_table();

/// The table selected for this process.
const KernelTable& kernels();

}  // namespace usma::kernels
