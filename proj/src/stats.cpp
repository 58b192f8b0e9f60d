#include "usma/stats.hpp"

#include <algorithm>
#include <cmath>

namespace usma {

Interval wilson_interval(std::size_t events, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(events) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // The endpoints are exact at 0 and n events; rounding would leave them off by an ulp.
    return {events == 0 ? 0.0 : std::max(0.0, center - half), events == n ? 1.0 : std::min(1.0, center + half)};
}

double binomial_upper_tail(std::size_t n, double p, std::size_t threshold) {
    if (threshold >= n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double lg_n = std::lgamma(static_cast<double>(n) + 1.0);
    double sum = 0.0;
    for (std::size_t k = threshold + 1; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double log_term = lg_n - std::lgamma(kk + 1.0) - std::lgamma(static_cast<double>(n - k) + 1.0) +
                                kk * lp + static_cast<double>(n - k) * lq;
        sum += std::exp(log_term);
    }
    return std::min(sum, 1.0);
}

}  // namespace usma
