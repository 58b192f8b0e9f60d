#pragma once

#include "usma/kernels.hpp"

namespace usma::kernels::detail {

constexpr double kVarianceFloor = 1e-12;

void fwht_scalar(std::complex<double>* data, std::size_t n);
void accumulate_real_scalar(std::complex<double> gain, const double* x, std::size_t n,
                            std::complex<double>* out);
void ese_accumulate_scalar(std::complex<double> gain, const double* mean, const double* var,
                           std::size_t n, AggregateView agg);
void ese_extrinsic_scalar(std::complex<double> gain, const double* mean, const double* var,
                          std::size_t n, const double* rx_re, const double* rx_im,
                          ConstAggregateView agg, double noise_real, double amplitude,
                          double* llr);

#if defined(USMA_HAVE_AVX2)
void fwht_avx2(std::complex<double>* data, std::size_t n);
void accumulate_real_avx2(std::complex<double> gain, const double* x, std::size_t n,
                          std::complex<double>* out);
void ese_accumulate_avx2(std::complex<double> gain, const double* mean, const double* var,
                         std::size_t n, AggregateView agg);
void ese_extrinsic_avx2(std::complex<double> gain, const double* mean, const double* var,
                        std::size_t n, const double* rx_re, const double* rx_im,
                        ConstAggregateView agg, double noise_real, double amplitude,
                        double* llr);
#endif

}  // namespace usma::kernels::detail
