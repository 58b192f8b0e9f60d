#include "usma/sidma.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

#include "usma/kernels.hpp"
#include "usma/rng.hpp"

namespace usma {

namespace {

void check_spec(const PatternSpec& spec) {
    if (spec.repetition < 1) throw ConfigError("repetition must be >= 1");
    if (spec.n_coded == 0) throw ConfigError("pattern needs at least one coded bit");
    if (static_cast<std::size_t>(spec.repetition) * spec.n_coded > spec.frame_len) {
        throw ConfigError("r * C exceeds the frame length");
    }
}

std::vector<std::pair<std::size_t, std::size_t>> block_shapes(std::size_t len) {
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    for (std::size_t rows = 2; rows <= len / 2; ++rows) {
        if (len % rows == 0) shapes.emplace_back(rows, len / rows);
    }
    if (shapes.empty()) shapes.emplace_back(1, len);
    return shapes;
}

std::vector<std::uint32_t> block_qpp_placement(std::size_t occupied, std::size_t rows, std::size_t cols,
                                               const std::vector<std::uint32_t>& qpp) {
    // Copy-major pre-interleave vector, zero padded to the frame length;
    // written row-wise into the block, read column-wise, then each chunk is
    // permuted by the QPP.
    const std::size_t chunk = qpp.size();
    std::vector<std::uint32_t> placement(occupied);
    for (std::size_t q = 0; q < occupied; ++q) {
        const std::size_t after_block = (q % cols) * rows + q / cols;
        placement[q] = static_cast<std::uint32_t>(after_block - after_block % chunk + qpp[after_block % chunk]);
    }
    return placement;
}

std::vector<std::vector<std::uint32_t>> table_permutations(std::size_t chunk);

// Block shapes under which every QPP table entry yields a different placement.
// Few-row shapes put the occupied prefix on a sublattice of each chunk, where
// distinct QPPs agree (rows = 2 on an 800-chip frame leaves 16 patterns).
const std::vector<std::pair<std::size_t, std::size_t>>& usable_shapes(std::size_t frame_len, std::size_t occupied,
                                                                       std::size_t chunk) {
    static std::mutex mu;
    static std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, std::size_t>>> cache;
    std::lock_guard lock(mu);
    auto [it, fresh] = cache.try_emplace({frame_len, occupied});
    if (!fresh) return it->second;
    const auto perms = table_permutations(chunk);
    const auto all = block_shapes(frame_len);
    for (const auto& [rows, cols] : all) {
        std::set<std::vector<std::uint32_t>> seen;
        for (const auto& perm : perms) seen.insert(block_qpp_placement(occupied, rows, cols, perm));
        if (seen.size() == perms.size()) it->second.emplace_back(rows, cols);
    }
    if (it->second.empty()) it->second = all;
    return it->second;
}

}  // namespace

const char* to_string(InterleaverFamily family) {
    switch (family) {
        case InterleaverFamily::SeededRandom: return "seeded-random";
        case InterleaverFamily::AiotQpp: return "block+qpp";
        case InterleaverFamily::Identity: return "identity";
    }
    return "?";
}

std::vector<std::uint32_t> qpp_permutation(std::size_t length, unsigned f1, unsigned f2) {
    if (length < 2) throw ConfigError("QPP length must be >= 2");
    std::vector<std::uint32_t> perm(length);
    std::vector<bool> seen(length, false);
    for (std::size_t i = 0; i < length; ++i) {
        const auto v = static_cast<std::uint32_t>((f1 * static_cast<unsigned __int128>(i) +
                                                   f2 * static_cast<unsigned __int128>(i) * i) %
                                                  length);
        if (seen[v]) {
            throw ConfigError("QPP (" + std::to_string(f1) + ", " + std::to_string(f2) +
                              ") is not a permutation of length " + std::to_string(length));
        }
        seen[v] = true;
        perm[i] = v;
    }
    return perm;
}

const std::vector<QppParams>& qpp_table_32() {
    static const std::vector<QppParams> table = [] {
        std::vector<QppParams> t;
        // f2 and f2 + 16 give the same map mod 32 (16 i^2 == 16 i), so f2 < 16
        // keeps every entry a distinct permutation.
        for (unsigned f2 = 0; f2 < 16; f2 += 2) {
            for (unsigned f1 = 1; f1 < 32; f1 += 2) t.push_back({f1, f2});
        }
        return t;
    }();
    return table;
}

namespace {

std::vector<std::vector<std::uint32_t>> table_permutations(std::size_t chunk) {
    std::vector<std::vector<std::uint32_t>> perms;
    for (const auto& q : qpp_table_32()) perms.push_back(qpp_permutation(chunk, q.f1, q.f2));
    return perms;
}

}  // namespace

ExpansionPattern build_pattern(const PatternSpec& spec, std::size_t temporal_id) {
    check_spec(spec);
    if (temporal_id >= spec.n_ids) throw ConfigError("temporal id out of range");
    ExpansionPattern p;
    p.family = spec.family;
    p.repetition = spec.repetition;
    p.n_coded = spec.n_coded;
    p.frame_len = spec.frame_len;
    p.alternating_signs = spec.alternating_signs;
    const std::size_t occupied = static_cast<std::size_t>(spec.repetition) * spec.n_coded;

    switch (spec.family) {
        case InterleaverFamily::Identity: {
            p.placement.resize(occupied);
            std::iota(p.placement.begin(), p.placement.end(), 0U);
            break;
        }
        case InterleaverFamily::SeededRandom: {
            std::vector<std::uint32_t> perm(spec.frame_len);
            std::iota(perm.begin(), perm.end(), 0U);
            Rng rng = make_rng(spec.seed, Stream::Pattern, temporal_id);
            for (std::size_t i = 0; i < occupied; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, spec.frame_len - 1);
                std::swap(perm[i], perm[pick(rng)]);
            }
            perm.resize(occupied);
            p.placement = std::move(perm);
            break;
        }
        case InterleaverFamily::AiotQpp: {
            const std::size_t chunk = spec.qpp_length;
            if (chunk != 32) throw ConfigError("the QPP table is defined for length 32 only");
            if (spec.frame_len % chunk != 0) throw ConfigError("frame length must be a multiple of the QPP length");
            const auto& table = qpp_table_32();
            const auto& shapes = usable_shapes(spec.frame_len, occupied, chunk);
            // Ids sharing a QPP entry step to different block shapes.
            const std::size_t lap = temporal_id / table.size();
            const auto& shape =
                shapes[(derive_seed(spec.seed, Stream::Pattern, temporal_id % table.size()) + lap) % shapes.size()];
            p.block_rows = shape.first;
            p.block_cols = shape.second;
            p.qpp = table[temporal_id % table.size()];
            p.placement = block_qpp_placement(occupied, p.block_rows, p.block_cols,
                                              qpp_permutation(chunk, p.qpp.f1, p.qpp.f2));
            break;
        }
    }
    return p;
}

RVec expand_to_frame(std::span<const std::uint8_t> coded_bits, const ExpansionPattern& pattern,
                     double data_power) {
    require_length(coded_bits.size(), pattern.n_coded, "expand_to_frame coded bits");
    const double amp = std::sqrt(data_power);
    RVec chips(pattern.frame_len, 0.0);
    for (std::size_t q = 0; q < pattern.placement.size(); ++q) {
        chips[pattern.placement[q]] = pattern.copy_sign(q) * ((coded_bits[q % pattern.n_coded] & 1U) ? -amp : amp);
    }
    return chips;
}

SoftSymbol soft_symbol_stats(double llr, double data_power) {
    const double mean = std::sqrt(data_power) * std::tanh(0.5 * std::clamp(llr, -kLlrClamp, kLlrClamp));
    return {mean, std::max(data_power - mean * mean, 0.0)};
}

ChipObservation ChipObservation::from(std::span<const CVec> per_antenna) {
    ChipObservation obs;
    for (const auto& ant : per_antenna) {
        RVec re(ant.size()), im(ant.size());
        for (std::size_t j = 0; j < ant.size(); ++j) {
            re[j] = ant[j].real();
            im[j] = ant[j].imag();
        }
        obs.re.push_back(std::move(re));
        obs.im.push_back(std::move(im));
    }
    return obs;
}

UserSoftState make_soft_state(const ExpansionPattern& pattern, std::vector<cplx> gains, double data_power) {
    UserSoftState st;
    st.pattern = &pattern;
    st.gains = std::move(gains);
    st.mean.assign(pattern.frame_len, 0.0);
    st.var.assign(pattern.frame_len, 0.0);
    for (auto chip : pattern.placement) st.var[chip] = data_power;
    return st;
}

std::vector<RVec> ese_iterate(const ChipObservation& rx, std::span<const UserSoftState> users,
                              double noise_var, double data_power) {
    const auto& k = kernels::kernels();
    const std::size_t n_ant = rx.antennas();
    const std::size_t chips = rx.chips();
    for (const auto& u : users) {
        require_length(u.gains.size(), n_ant, "ese_iterate gains");
        require_length(u.mean.size(), chips, "ese_iterate soft means");
        require_length(u.var.size(), chips, "ese_iterate soft variances");
    }
    const double noise_real = 0.5 * noise_var;
    const double amplitude = std::sqrt(data_power);

    std::vector<RVec> out(users.size());
    RVec dense(chips);
    RVec mean_re(chips), mean_im(chips), var(chips), w_re(chips), w_im(chips);
    for (std::size_t k_user = 0; k_user < users.size(); ++k_user) {
        out[k_user].assign(users[k_user].pattern->placement.size(), 0.0);
    }
    // Antennas are independent observations: build that antenna's
    // aggregates once, then add every user's contribution from it.
    for (std::size_t a = 0; a < n_ant; ++a) {
        std::fill(mean_re.begin(), mean_re.end(), 0.0);
        std::fill(mean_im.begin(), mean_im.end(), 0.0);
        std::fill(var.begin(), var.end(), 0.0);
        std::fill(w_re.begin(), w_re.end(), 0.0);
        std::fill(w_im.begin(), w_im.end(), 0.0);
        const kernels::AggregateView agg{mean_re.data(), mean_im.data(), var.data(), w_re.data(), w_im.data()};
        for (const auto& u : users) k.ese_accumulate(u.gains[a], u.mean.data(), u.var.data(), chips, agg);
        const kernels::ConstAggregateView cagg{mean_re.data(), mean_im.data(), var.data(), w_re.data(), w_im.data()};
        for (std::size_t ku = 0; ku < users.size(); ++ku) {
            const auto& u = users[ku];
            if (std::norm(u.gains[a]) < 1e-300) continue;
            std::fill(dense.begin(), dense.end(), 0.0);
            k.ese_extrinsic(u.gains[a], u.mean.data(), u.var.data(), chips, rx.re[a].data(), rx.im[a].data(),
                            cagg, noise_real, amplitude, dense.data());
            auto& o = out[ku];
            const auto& place = u.pattern->placement;
            for (std::size_t q = 0; q < place.size(); ++q) o[q] += dense[place[q]];
        }
    }
    return out;
}

namespace {

// Mean over antennas and chips of |y - sum h m|^2 - sum |h|^2 v.
double unexplained_power(const ChipObservation& rx, std::span<const UserSoftState> users) {
    const std::size_t chips = rx.chips();
    double total = 0.0;
    RVec re(chips), im(chips), var(chips);
    for (std::size_t a = 0; a < rx.antennas(); ++a) {
        re = rx.re[a];
        im = rx.im[a];
        std::fill(var.begin(), var.end(), 0.0);
        for (const auto& u : users) {
            const cplx h = u.gains[a];
            const double h2 = std::norm(h);
            for (auto chip : u.pattern->placement) {
                re[chip] -= h.real() * u.mean[chip];
                im[chip] -= h.imag() * u.mean[chip];
                var[chip] += h2 * u.var[chip];
            }
        }
        for (std::size_t j = 0; j < chips; ++j) total += re[j] * re[j] + im[j] * im[j] - var[j];
    }
    return total / static_cast<double>(chips * std::max<std::size_t>(rx.antennas(), 1));
}

}  // namespace

ReceiverOutput iterative_receive(const ChipObservation& rx, std::span<const ReceiverUser> users,
                                 const ReceiverConfig& cfg) {
    if (cfg.outer_iterations < 1) throw ConfigError("need at least one outer iteration");
    std::vector<UserSoftState> state;
    state.reserve(users.size());
    for (const auto& u : users) {
        if (u.pattern == nullptr) throw ConfigError("receiver user without a pattern");
        require_length(u.pattern->frame_len, rx.chips(), "iterative_receive frame length");
        require_length(cfg.code.n_coded(cfg.code.n_info(u.pattern->n_coded)), u.pattern->n_coded,
                       "iterative_receive coded length");
        state.push_back(make_soft_state(*u.pattern, u.gains, cfg.data_power));
    }

    ReceiverOutput out;
    out.info_bits.resize(users.size());
    out.converged.assign(users.size(), false);
    RVec channel;
    for (int it = 0; it < cfg.outer_iterations; ++it) {
        const double noise = cfg.track_residual ? std::max(cfg.noise_var, unexplained_power(rx, state)) : cfg.noise_var;
        const auto chip_llr = ese_iterate(rx, state, noise, cfg.data_power);
        double abs_sum = 0.0;
        std::size_t abs_count = 0;
        for (std::size_t k = 0; k < users.size(); ++k) {
            const auto& pat = *users[k].pattern;
            const std::size_t c = pat.n_coded;
            channel.assign(c, 0.0);
            for (std::size_t q = 0; q < pat.placement.size(); ++q) channel[q % c] += pat.copy_sign(q) * chip_llr[k][q];
            const BcjrOutput dec = bcjr_decode(cfg.code, channel);

            auto& st = state[k];
            for (std::size_t q = 0; q < pat.placement.size(); ++q) {
                // Leave-one-out: decoder extrinsic plus the bit's other copies. Equal to
                // posterior minus this chip, but stays sign-correct when the decoder clamps.
                const std::size_t b = q % c;
                const double sign = pat.copy_sign(q);
                const double fb =
                    std::clamp(dec.extrinsic[b] + channel[b] - sign * chip_llr[k][q], -kLlrClamp, kLlrClamp);
                const SoftSymbol sym = soft_symbol_stats(fb, cfg.data_power);
                st.mean[pat.placement[q]] = sign * sym.mean;
                st.var[pat.placement[q]] = sym.variance;
            }
            out.converged[k] = it > 0 && dec.hard_info == out.info_bits[k];
            out.info_bits[k] = dec.hard_info;
            for (double l : dec.info_posterior) abs_sum += std::abs(l);
            abs_count += dec.info_posterior.size();
        }
        out.mean_abs_llr.push_back(abs_count ? abs_sum / static_cast<double>(abs_count) : 0.0);
    }
    return out;
}

}  // namespace usma
