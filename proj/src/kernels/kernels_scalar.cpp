#include <algorithm>

#include "kernels_impl.hpp"

namespace usma::kernels::detail {

void fwht_scalar(std::complex<double>* data, std::size_t n) {
    for (std::size_t half = 1; half < n; half <<= 1) {
        for (std::size_t base = 0; base < n; base += 2 * half) {
            for (std::size_t i = base; i < base + half; ++i) {
                const auto a = data[i];
                const auto b = data[i + half];
                data[i] = a + b;
                data[i + half] = a - b;
            }
        }
    }
}

void accumulate_real_scalar(std::complex<double> gain, const double* x, std::size_t n,
                            std::complex<double>* out) {
    const double hr = gain.real();
    const double hi = gain.imag();
    for (std::size_t j = 0; j < n; ++j) {
        out[j] += std::complex<double>(hr * x[j], hi * x[j]);
    }
}

void ese_accumulate_scalar(std::complex<double> gain, const double* mean, const double* var,
                           std::size_t n, AggregateView agg) {
    const double hr = gain.real();
    const double hi = gain.imag();
    const double h2 = hr * hr + hi * hi;
    const double sq_re = hr * hr - hi * hi;
    const double sq_im = 2.0 * hr * hi;
    for (std::size_t j = 0; j < n; ++j) {
        agg.mean_re[j] += hr * mean[j];
        agg.mean_im[j] += hi * mean[j];
        agg.var[j] += h2 * var[j];
        agg.w_re[j] += sq_re * var[j];
        agg.w_im[j] += sq_im * var[j];
    }
}

// Interference of user k along its own real dimension: with u = Re{conj(h) r},
// the projected variance of sum_i h_i s_i (s_i real) is
//   sum_i Re{conj(h) h_i}^2 v_i / |h|^2 = (V + Re{conj(h)^2 W} / |h|^2) / 2.
void ese_extrinsic_scalar(std::complex<double> gain, const double* mean, const double* var,
                          std::size_t n, const double* rx_re, const double* rx_im,
                          ConstAggregateView agg, double noise_real, double amplitude,
                          double* llr) {
    const double hr = gain.real();
    const double hi = gain.imag();
    const double h2 = hr * hr + hi * hi;
    const double sq_re = hr * hr - hi * hi;
    const double sq_im = 2.0 * hr * hi;
    const double inv_h2 = 1.0 / h2;
    const double scale = 2.0 * amplitude;
    for (std::size_t j = 0; j < n; ++j) {
        const double res_re = rx_re[j] - agg.mean_re[j] + hr * mean[j];
        const double res_im = rx_im[j] - agg.mean_im[j] + hi * mean[j];
        const double proj = hr * res_re + hi * res_im;
        const double v_ex = agg.var[j] - h2 * var[j];
        const double w_ex_re = agg.w_re[j] - sq_re * var[j];
        const double w_ex_im = agg.w_im[j] - sq_im * var[j];
        const double cross = sq_re * w_ex_re + sq_im * w_ex_im;
        const double v_real = std::max(0.5 * (v_ex + cross * inv_h2) + noise_real, kVarianceFloor);
        llr[j] += scale * proj / v_real;
    }
}

}  // namespace usma::kernels::detail
