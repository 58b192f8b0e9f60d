#pragma once

// Brute-force references shared by the unit tests and the acceptance run.

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "usma/common.hpp"
#include "usma/sensing_matrix.hpp"

namespace usma::oracle {

// Independent encoder from the tap strings of 133/171 (octal), delay-indexed.
inline Bits encode_by_taps(const Bits& info) {
    const char* taps[2] = {"1011011", "1111001"};
    Bits u = info;
    u.insert(u.end(), 6, 0);
    Bits out;
    for (std::size_t t = 0; t < u.size(); ++t) {
        for (const char* g : taps) {
            unsigned bit = 0;
            for (std::size_t d = 0; d < 7; ++d) {
                if (g[d] == '1' && t >= d) bit ^= u[t - d];
            }
            out.push_back(static_cast<std::uint8_t>(bit));
        }
    }
    return out;
}

inline double log_likelihood(const Bits& word, const RVec& llr) {
    double s = 0.0;
    for (std::size_t i = 0; i < word.size(); ++i) s += 0.5 * (word[i] ? -llr[i] : llr[i]);
    return s;
}

inline long double log_add(long double a, long double b) {
    const long double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

struct MapOracle {
    RVec info;   // per info bit
    RVec coded;  // per coded bit
};

inline MapOracle exhaustive_map(std::size_t k, const RVec& llr) {
    const long double ninf = -1e300L;
    std::vector<long double> info0(k, ninf), info1(k, ninf), c0(llr.size(), ninf), c1(llr.size(), ninf);
    for (std::size_t w = 0; w < (std::size_t{1} << k); ++w) {
        Bits info(k);
        for (std::size_t i = 0; i < k; ++i) info[i] = (w >> (k - 1 - i)) & 1U;
        const Bits word = encode_by_taps(info);
        const long double m = log_likelihood(word, llr);
        for (std::size_t i = 0; i < k; ++i) (info[i] ? info1[i] : info0[i]) = log_add(info[i] ? info1[i] : info0[i], m);
        for (std::size_t i = 0; i < word.size(); ++i) (word[i] ? c1[i] : c0[i]) = log_add(word[i] ? c1[i] : c0[i], m);
    }
    MapOracle o;
    for (std::size_t i = 0; i < k; ++i) o.info.push_back(static_cast<double>(info0[i] - info1[i]));
    for (std::size_t i = 0; i < llr.size(); ++i) o.coded.push_back(static_cast<double>(c0[i] - c1[i]));
    return o;
}

// Dense partial matrix, entry by entry from the transform definition.
inline std::vector<CVec> dense_rows(const SensingMatrix& m) {
    const std::size_t n = m.n_cols();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<CVec> rows;
    for (std::size_t r : m.row_selection()) {
        CVec row(n);
        for (std::size_t c = 0; c < n; ++c) {
            if (m.kind() == TransformKind::PartialDft) {
                const double ang = -2.0 * std::numbers::pi * static_cast<double>((r * c) % n) / static_cast<double>(n);
                row[c] = std::polar(scale, ang);
            } else {
                row[c] = (std::popcount(r & c) % 2 ? -scale : scale);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace usma::oracle
