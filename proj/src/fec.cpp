#include "usma/fec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace usma {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double clamp_llr(double v) { return std::clamp(v, -kLlrClamp, kLlrClamp); }

// Log-probability of coded bit pair (c0, c1) under per-bit LLRs (l0, l1), up to a constant.
inline double branch_metric(unsigned bits, double l0, double l1) {
    return 0.5 * (((bits >> 1) & 1U) ? -l0 : l0) + 0.5 * ((bits & 1U) ? -l1 : l1);
}

RVec combined_llr(std::span<const double> channel, std::span<const double> prior) {
    RVec total(channel.size());
    for (std::size_t i = 0; i < channel.size(); ++i) {
        total[i] = clamp_llr(channel[i] + (prior.empty() ? 0.0 : prior[i]));
    }
    return total;
}

}  // namespace

ConvCode::ConvCode(unsigned g0, unsigned g1, int constraint_length)
    : generators_{g0, g1}, constraint_length_(constraint_length) {
    if (constraint_length < 2 || constraint_length > 16) throw ConfigError("constraint length out of range");
    const unsigned limit = 1U << constraint_length;
    for (unsigned g : generators_) {
        if (g == 0 || g >= limit) throw ConfigError("generator does not fit the constraint length");
    }
    const std::size_t ns = n_states();
    next_.resize(2 * ns);
    out_.resize(2 * ns);
    const int mem = memory();
    for (std::size_t s = 0; s < ns; ++s) {
        for (unsigned u = 0; u < 2; ++u) {
            const unsigned reg = (u << mem) | static_cast<unsigned>(s);
            next_[2 * s + u] = reg >> 1;
            const unsigned c0 = std::popcount(reg & generators_[0]) & 1U;
            const unsigned c1 = std::popcount(reg & generators_[1]) & 1U;
            out_[2 * s + u] = static_cast<std::uint8_t>((c0 << 1) | c1);
        }
    }
}

std::size_t ConvCode::n_info(std::size_t n_coded) const {
    const auto tail = static_cast<std::size_t>(memory());
    if (n_coded % 2 != 0 || n_coded / 2 <= tail) throw DimensionError("coded length is not a terminated codeword length");
    return n_coded / 2 - tail;
}

Bits conv_encode(const ConvCode& code, std::span<const std::uint8_t> info_bits) {
    if (info_bits.empty()) throw ConfigError("conv_encode needs at least one info bit");
    const std::size_t steps = info_bits.size() + static_cast<std::size_t>(code.memory());
    Bits out;
    out.reserve(2 * steps);
    std::size_t state = 0;
    for (std::size_t t = 0; t < steps; ++t) {
        const unsigned u = t < info_bits.size() ? (info_bits[t] & 1U) : 0U;
        const unsigned bits = code.output(state, u);
        out.push_back(static_cast<std::uint8_t>((bits >> 1) & 1U));
        out.push_back(static_cast<std::uint8_t>(bits & 1U));
        state = code.next_state(state, u);
    }
    return out;
}

BcjrOutput bcjr_decode(const ConvCode& code, std::span<const double> channel_llr,
                       std::span<const double> prior_llr) {
    const std::size_t k = code.n_info(channel_llr.size());
    if (!prior_llr.empty()) require_length(prior_llr.size(), channel_llr.size(), "bcjr_decode prior");
    const std::size_t steps = channel_llr.size() / 2;
    const std::size_t ns = code.n_states();
    const RVec llr = combined_llr(channel_llr, prior_llr);

    // Probability domain with per-step normalization. gamma[t][bits] is the
    // branch likelihood scaled so the largest of the four is 1.
    std::vector<double> gamma(4 * steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const double l0 = llr[2 * t], l1 = llr[2 * t + 1];
        const double top = 0.5 * (std::abs(l0) + std::abs(l1));
        for (unsigned bits = 0; bits < 4; ++bits) gamma[4 * t + bits] = std::exp(branch_metric(bits, l0, l1) - top);
    }

    // alpha[t][s]: probability of reaching state s before step t, normalized per step.
    std::vector<double> alpha((steps + 1) * ns, 0.0);
    std::vector<double> beta((steps + 1) * ns, 0.0);
    alpha[0] = 1.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const unsigned max_input = t < k ? 2U : 1U;
        const double* a = &alpha[t * ns];
        const double* g = &gamma[4 * t];
        double* a_next = &alpha[(t + 1) * ns];
        for (std::size_t s = 0; s < ns; ++s) {
            if (a[s] == 0.0) continue;
            for (unsigned u = 0; u < max_input; ++u) a_next[code.next_state(s, u)] += a[s] * g[code.output(s, u)];
        }
        double sum = 0.0;
        for (std::size_t s = 0; s < ns; ++s) sum += a_next[s];
        if (!(sum > 0.0)) throw NumericalError("bcjr_decode: forward recursion underflow");
        const double inv = 1.0 / sum;
        for (std::size_t s = 0; s < ns; ++s) a_next[s] *= inv;
    }
    beta[steps * ns] = 1.0;
    for (std::size_t t = steps; t-- > 0;) {
        const unsigned max_input = t < k ? 2U : 1U;
        const double* b_next = &beta[(t + 1) * ns];
        const double* g = &gamma[4 * t];
        double* b = &beta[t * ns];
        double sum = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
            double acc = 0.0;
            for (unsigned u = 0; u < max_input; ++u) acc += b_next[code.next_state(s, u)] * g[code.output(s, u)];
            b[s] = acc;
            sum += acc;
        }
        if (!(sum > 0.0)) throw NumericalError("bcjr_decode: backward recursion underflow");
        const double inv = 1.0 / sum;
        for (std::size_t s = 0; s < ns; ++s) b[s] *= inv;
    }

    auto log_ratio = [](double p0, double p1) {
        if (p1 <= 0.0) return kLlrClamp;
        if (p0 <= 0.0) return -kLlrClamp;
        return clamp_llr(std::log(p0 / p1));
    };

    BcjrOutput out;
    out.extrinsic.resize(channel_llr.size());
    out.coded_posterior.resize(channel_llr.size());
    out.info_posterior.resize(k);
    out.hard_info.resize(k);
    for (std::size_t t = 0; t < steps; ++t) {
        const unsigned max_input = t < k ? 2U : 1U;
        const double* a = &alpha[t * ns];
        const double* b_next = &beta[(t + 1) * ns];
        const double* g = &gamma[4 * t];
        // Path mass per output pair and per input bit.
        double by_bits[4] = {0.0, 0.0, 0.0, 0.0};
        double info[2] = {0.0, 0.0};
        for (std::size_t s = 0; s < ns; ++s) {
            if (a[s] == 0.0) continue;
            for (unsigned u = 0; u < max_input; ++u) {
                const unsigned bits = code.output(s, u);
                const double m = a[s] * b_next[code.next_state(s, u)];
                by_bits[bits] += m;
                info[u] += m * g[bits];
            }
        }
        const double coded[2][2] = {
            {(by_bits[0] * g[0] + by_bits[1] * g[1]), (by_bits[2] * g[2] + by_bits[3] * g[3])},
            {(by_bits[0] * g[0] + by_bits[2] * g[2]), (by_bits[1] * g[1] + by_bits[3] * g[3])}};
        for (std::size_t j = 0; j < 2; ++j) {
            const std::size_t i = 2 * t + j;
            const double post = log_ratio(coded[j][0], coded[j][1]);
            out.coded_posterior[i] = post;
            out.extrinsic[i] = clamp_llr(post - llr[i]);
        }
        if (t < k) {
            const double post = log_ratio(info[0], info[1]);
            out.info_posterior[t] = post;
            out.hard_info[t] = post < 0.0 ? 1 : 0;
        }
    }
    return out;
}

Bits viterbi_decode(const ConvCode& code, std::span<const double> channel_llr) {
    const std::size_t k = code.n_info(channel_llr.size());
    const std::size_t steps = channel_llr.size() / 2;
    const std::size_t ns = code.n_states();
    RVec llr(channel_llr.size());
    for (std::size_t i = 0; i < llr.size(); ++i) llr[i] = clamp_llr(channel_llr[i]);

    std::vector<double> metric(ns, kNegInf), next(ns);
    metric[0] = 0.0;
    // survivor[t][s] = (predecessor state << 1) | input
    std::vector<std::uint32_t> survivor(steps * ns);
    for (std::size_t t = 0; t < steps; ++t) {
        std::fill(next.begin(), next.end(), kNegInf);
        const unsigned max_input = t < k ? 2U : 1U;
        for (std::size_t s = 0; s < ns; ++s) {
            if (metric[s] == kNegInf) continue;
            for (unsigned u = 0; u < max_input; ++u) {
                const std::size_t d = code.next_state(s, u);
                const double m = metric[s] + branch_metric(code.output(s, u), llr[2 * t], llr[2 * t + 1]);
                if (m > next[d]) {
                    next[d] = m;
                    survivor[t * ns + d] = static_cast<std::uint32_t>((s << 1) | u);
                }
            }
        }
        metric.swap(next);
    }
    Bits decided(steps);
    std::size_t state = 0;
    for (std::size_t t = steps; t-- > 0;) {
        const std::uint32_t sv = survivor[t * ns + state];
        decided[t] = static_cast<std::uint8_t>(sv & 1U);
        state = sv >> 1;
    }
    decided.resize(k);
    return decided;
}

}  // namespace usma
