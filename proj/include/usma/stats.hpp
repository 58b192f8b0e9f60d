#pragma once

#include <cstddef>
#include <utility>

namespace usma {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for a binomial proportion (z = 1.96 for 95%).
Interval wilson_interval(std::size_t events, std::size_t n, double z = 1.959963984540054);

/// P(Bin(n, p) > threshold), summed in log space.
double binomial_upper_tail(std::size_t n, double p, std::size_t threshold);

}  // namespace usma
