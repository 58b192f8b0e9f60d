// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace usma::kernels::detail {

void fwht_avx2(std::complex<double>* data, std::size_t n) {
    if (n < 4) {
        fwht_scalar(data, n);
        return;
    }
    auto* d = reinterpret_cast<double*>(data);
    for (std::size_t base = 0; base < n; base += 2) {
        const auto a = data[base];
        const auto b = data[base + 1];
        data[base] = a + b;
        data[base + 1] = a - b;
    }
    for (std::size_t half = 2; half < n; half <<= 1) {
        for (std::size_t base = 0; base < n; base += 2 * half) {
            for (std::size_t i = base; i < base + half; i += 2) {
                double* pa = d + 2 * i;
                double* pb = d + 2 * (i + half);
                const __m256d a = _mm256_loadu_pd(pa);
                const __m256d b = _mm256_loadu_pd(pb);
                _mm256_storeu_pd(pa, _mm256_add_pd(a, b));
                _mm256_storeu_pd(pb, _mm256_sub_pd(a, b));
            }
        }
    }
}

void accumulate_real_avx2(std::complex<double> gain, const double* x, std::size_t n,
                          std::complex<double>* out) {
    const __m256d h = _mm256_setr_pd(gain.real(), gain.imag(), gain.real(), gain.imag());
    auto* o = reinterpret_cast<double*>(out);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        const __m256d pair = _mm256_castpd128_pd256(_mm_loadu_pd(x + j));
        const __m256d xx = _mm256_permute4x64_pd(pair, 0b01010000);
        _mm256_storeu_pd(o + 2 * j, _mm256_fmadd_pd(xx, h, _mm256_loadu_pd(o + 2 * j)));
    }
    if (j < n) accumulate_real_scalar(gain, x + j, n - j, out + j);
}

void ese_accumulate_avx2(std::complex<double> gain, const double* mean, const double* var,
                         std::size_t n, AggregateView agg) {
    const double hr = gain.real();
    const double hi = gain.imag();
    const __m256d vhr = _mm256_set1_pd(hr);
    const __m256d vhi = _mm256_set1_pd(hi);
    const __m256d vh2 = _mm256_set1_pd(hr * hr + hi * hi);
    const __m256d vsq_re = _mm256_set1_pd(hr * hr - hi * hi);
    const __m256d vsq_im = _mm256_set1_pd(2.0 * hr * hi);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d m = _mm256_loadu_pd(mean + j);
        const __m256d v = _mm256_loadu_pd(var + j);
        _mm256_storeu_pd(agg.mean_re + j, _mm256_fmadd_pd(vhr, m, _mm256_loadu_pd(agg.mean_re + j)));
        _mm256_storeu_pd(agg.mean_im + j, _mm256_fmadd_pd(vhi, m, _mm256_loadu_pd(agg.mean_im + j)));
        _mm256_storeu_pd(agg.var + j, _mm256_fmadd_pd(vh2, v, _mm256_loadu_pd(agg.var + j)));
        _mm256_storeu_pd(agg.w_re + j, _mm256_fmadd_pd(vsq_re, v, _mm256_loadu_pd(agg.w_re + j)));
        _mm256_storeu_pd(agg.w_im + j, _mm256_fmadd_pd(vsq_im, v, _mm256_loadu_pd(agg.w_im + j)));
    }
    if (j < n) {
        AggregateView tail{agg.mean_re + j, agg.mean_im + j, agg.var + j, agg.w_re + j, agg.w_im + j};
        ese_accumulate_scalar(gain, mean + j, var + j, n - j, tail);
    }
}

void ese_extrinsic_avx2(std::complex<double> gain, const double* mean, const double* var,
                        std::size_t n, const double* rx_re, const double* rx_im,
                        ConstAggregateView agg, double noise_real, double amplitude,
                        double* llr) {
    const double hr = gain.real();
    const double hi = gain.imag();
    const double h2 = hr * hr + hi * hi;
    const __m256d vhr = _mm256_set1_pd(hr);
    const __m256d vhi = _mm256_set1_pd(hi);
    const __m256d vh2 = _mm256_set1_pd(h2);
    const __m256d vsq_re = _mm256_set1_pd(hr * hr - hi * hi);
    const __m256d vsq_im = _mm256_set1_pd(2.0 * hr * hi);
    const __m256d vinv_h2 = _mm256_set1_pd(1.0 / h2);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d noise = _mm256_set1_pd(noise_real);
    const __m256d floor = _mm256_set1_pd(kVarianceFloor);
    const __m256d scale = _mm256_set1_pd(2.0 * amplitude);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d m = _mm256_loadu_pd(mean + j);
        const __m256d v = _mm256_loadu_pd(var + j);
        const __m256d res_re =
            _mm256_fmadd_pd(vhr, m, _mm256_sub_pd(_mm256_loadu_pd(rx_re + j), _mm256_loadu_pd(agg.mean_re + j)));
        const __m256d res_im =
            _mm256_fmadd_pd(vhi, m, _mm256_sub_pd(_mm256_loadu_pd(rx_im + j), _mm256_loadu_pd(agg.mean_im + j)));
        const __m256d proj = _mm256_fmadd_pd(vhr, res_re, _mm256_mul_pd(vhi, res_im));
        const __m256d v_ex = _mm256_fnmadd_pd(vh2, v, _mm256_loadu_pd(agg.var + j));
        const __m256d w_ex_re = _mm256_fnmadd_pd(vsq_re, v, _mm256_loadu_pd(agg.w_re + j));
        const __m256d w_ex_im = _mm256_fnmadd_pd(vsq_im, v, _mm256_loadu_pd(agg.w_im + j));
        const __m256d cross = _mm256_fmadd_pd(vsq_re, w_ex_re, _mm256_mul_pd(vsq_im, w_ex_im));
        __m256d v_real = _mm256_fmadd_pd(half, _mm256_fmadd_pd(cross, vinv_h2, v_ex), noise);
        v_real = _mm256_max_pd(v_real, floor);
        const __m256d out = _mm256_loadu_pd(llr + j);
        _mm256_storeu_pd(llr + j, _mm256_add_pd(out, _mm256_div_pd(_mm256_mul_pd(scale, proj), v_real)));
    }
    if (j < n) {
        ConstAggregateView tail{agg.mean_re + j, agg.mean_im + j, agg.var + j, agg.w_re + j, agg.w_im + j};
        ese_extrinsic_scalar(gain, mean + j, var + j, n - j, rx_re + j, rx_im + j, tail, noise_real,
                             amplitude, llr + j);
    }
}

}  // namespace usma::kernels::detail
