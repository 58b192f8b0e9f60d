#include "usma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "usma/rng.hpp"

namespace usma {

const char* to_string(Csi csi) { return csi == Csi::Ideal ? "ideal" : "estimated"; }

Csi parse_csi(const std::string& s) {
    if (s == "ideal") return Csi::Ideal;
    if (s == "estimated") return Csi::Estimated;
    throw ConfigError("unknown csi '" + s + "' (expected ideal or estimated)");
}

const char* to_string(PupeMetric m) { return m == PupeMetric::AllCauses ? "all" : "no-collision"; }

PupeMetric parse_metric(const std::string& s) {
    if (s == "all") return PupeMetric::AllCauses;
    if (s == "no-collision") return PupeMetric::ExcludeCollisions;
    throw ConfigError("unknown metric '" + s + "' (expected all or no-collision)");
}

OutcomeCounts TrialResult::counts() const {
    OutcomeCounts c;
    for (auto o : outcomes) {
        switch (o) {
            case UserOutcome::Success: ++c.success; break;
            case UserOutcome::Collision: ++c.collision; break;
            case UserOutcome::Misdetected: ++c.misdetected; break;
            case UserOutcome::DecodeError: ++c.decode_error; break;
        }
    }
    return c;
}

Simulator::Simulator(SystemProfile profile)
    : profile_((profile.validate(), std::move(profile))),
      matrix_(build_sensing_matrix(profile_)),
      preamble_(preamble_config(profile_, matrix_)),
      pattern_spec_(pattern_spec(profile_)) {}

TrialResult Simulator::run_trial(std::size_t ka, double ebn0_db, std::uint64_t seed, Csi csi,
                                 const TrialOptions& options) const {
    const auto& p = profile_;
    if (options.forced_ids.size() > ka) throw ConfigError("more forced ids than active users");
    Rng msg_rng = make_rng(seed, Stream::Messages);
    Rng gain_rng = make_rng(seed, Stream::Gains);
    Rng noise_rng = make_rng(seed, Stream::Noise);

    TrialResult result;
    result.ebn0_db = ebn0_db;
    result.seed = seed;

    const auto B = static_cast<std::size_t>(p.packet_bits);
    const auto L = static_cast<std::size_t>(p.id_bits);
    std::vector<std::size_t> ids(ka);
    std::vector<Bits> payloads(ka);
    for (std::size_t k = 0; k < ka; ++k) {
        Bits msg(B);
        for (auto& b : msg) b = static_cast<std::uint8_t>(msg_rng() >> 63);
        if (k < options.forced_ids.size()) {
            const Bits forced = bits_from_index(options.forced_ids[k], p.id_bits);
            std::copy(forced.begin(), forced.end(), msg.begin());
        }
        ids[k] = index_from_bits(std::span(msg).first(L), p.id_bits);
        payloads[k].assign(msg.begin() + static_cast<std::ptrdiff_t>(L), msg.end());
    }
    const auto gains = draw_gains(p.channel, ka, gain_rng);
    const NoiseLevel noise = noise_from_ebn0(p, ebn0_db);

    std::map<std::size_t, ExpansionPattern> patterns;
    auto pattern_for = [&](std::size_t id) -> const ExpansionPattern& {
        auto it = patterns.find(id);
        if (it == patterns.end()) it = patterns.emplace(id, build_pattern(pattern_spec_, id)).first;
        return it->second;
    };

    Superposition sum({p.preamble_len, p.data_chips}, p.channel.rx_antennas);
    for (std::size_t k = 0; k < ka; ++k) {
        UserFrame frame;
        frame.preamble = make_preamble_symbols(preamble_, ids[k]);
        frame.data = expand_to_frame(conv_encode(p.code, payloads[k]), pattern_for(ids[k]), p.data_power);
        sum.add(frame, gains[k]);
    }
    const auto rx = std::move(sum).finish(noise.complex_var(), noise_rng);

    std::vector<CVec> rx_preamble, rx_data;
    for (const auto& ant : rx) {
        rx_preamble.emplace_back(ant.begin(), ant.begin() + static_cast<std::ptrdiff_t>(p.preamble_len));
        rx_data.emplace_back(ant.begin() + static_cast<std::ptrdiff_t>(p.preamble_len), ant.end());
    }

    // Receiver streams: (temporal id, gains). Ideal CSI gives one stream per
    // transmitting user, so users sharing an id are still cancelled with their
    // own channels. Estimated CSI gives one stream per detected column.
    std::vector<std::size_t> rx_ids;
    std::vector<std::vector<cplx>> rx_gains;
    if (csi == Csi::Ideal) {
        rx_ids = ids;
        rx_gains = gains;
    } else {
        AmpConfig amp = p.amp;
        if (!amp.sparsity_prior) {
            amp.sparsity_prior = std::min(0.5, static_cast<double>(std::max<std::size_t>(ka, 1)) /
                                                   static_cast<double>(p.n_columns));
        }
        const DetectionResult det = amp_detect(rx_preamble, preamble_, amp, noise.complex_var());
        rx_gains = estimate_channels(det, preamble_);
        for (const auto& d : det.detected) rx_ids.push_back(d.column);
    }

    std::vector<ReceiverUser> rx_users;
    rx_users.reserve(rx_ids.size());
    for (std::size_t i = 0; i < rx_ids.size(); ++i) rx_users.push_back({&pattern_for(rx_ids[i]), rx_gains[i]});

    std::vector<Bits> decoded;
    if (!rx_users.empty()) {
        const ReceiverConfig cfg{p.code, p.outer_iterations, p.data_power, noise.complex_var(), true};
        auto out = iterative_receive(ChipObservation::from(rx_data), rx_users, cfg);
        decoded = std::move(out.info_bits);
        result.mean_abs_llr = std::move(out.mean_abs_llr);
    }

    std::map<std::size_t, std::size_t> id_count;
    for (auto id : ids) ++id_count[id];
    std::map<std::size_t, std::size_t> stream_of;
    for (std::size_t i = rx_ids.size(); i-- > 0;) stream_of[rx_ids[i]] = i;
    result.outcomes.reserve(ka);
    for (std::size_t k = 0; k < ka; ++k) {
        if (id_count[ids[k]] > 1) {
            result.outcomes.push_back(UserOutcome::Collision);
            continue;
        }
        const auto it = stream_of.find(ids[k]);
        if (it == stream_of.end()) {
            result.outcomes.push_back(UserOutcome::Misdetected);
            continue;
        }
        result.outcomes.push_back(decoded[it->second] == payloads[k] ? UserOutcome::Success : UserOutcome::DecodeError);
    }
    for (auto id : rx_ids) {
        if (id_count.find(id) == id_count.end()) ++result.false_alarms;
    }
    return result;
}

TrialResult run_trial(const SystemProfile& profile, std::size_t ka, double ebn0_db, std::uint64_t seed, Csi csi) {
    return Simulator(profile).run_trial(ka, ebn0_db, seed, csi);
}

std::pair<std::size_t, std::size_t> SweepRecord::metric_counts(PupeMetric m) const {
    const std::size_t users = trials * ka;
    if (m == PupeMetric::AllCauses) return {user_errors, users};
    return {err_misdetect + err_decode, users - err_collision};
}

double SweepRecord::metric(PupeMetric m) const {
    const auto [events, n] = metric_counts(m);
    return n == 0 ? 0.0 : static_cast<double>(events) / static_cast<double>(n);
}

Interval SweepRecord::metric_ci(PupeMetric m) const {
    const auto [events, n] = metric_counts(m);
    return wilson_interval(events, n);
}

SweepRecord aggregate_trials(const SystemProfile& profile, std::size_t ka, double ebn0_db, Csi csi,
                             std::uint64_t seed, const std::vector<TrialResult>& trials) {
    SweepRecord r;
    r.profile = profile.name;
    r.channel = profile.channel.label();
    r.csi = csi;
    r.ka = ka;
    r.ebn0_db = ebn0_db;
    r.seed = seed;
    r.trials = trials.size();
    for (const auto& t : trials) {
        const auto c = t.counts();
        r.err_collision += c.collision;
        r.err_misdetect += c.misdetected;
        r.err_decode += c.decode_error;
        r.false_alarms += t.false_alarms;
    }
    r.user_errors = r.err_collision + r.err_misdetect + r.err_decode;
    const std::size_t users = r.trials * ka;
    r.pupe = users == 0 ? 0.0 : static_cast<double>(r.user_errors) / static_cast<double>(users);
    r.ci = wilson_interval(r.user_errors, users);
    return r;
}

namespace {

void run_batch(const Simulator& sim, std::size_t ka, double ebn0_db, Csi csi, std::uint64_t base_seed,
               std::size_t first, std::vector<TrialResult>& out, unsigned workers) {
    auto one = [&](std::size_t i) {
        out[i] = sim.run_trial(ka, ebn0_db, derive_seed(base_seed, Stream::Trial, first + i), csi);
    };
    if (workers <= 1 || out.size() <= 1) {
        for (std::size_t i = 0; i < out.size(); ++i) one(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(out.size()));
    for (unsigned w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < out.size(); i = next++) one(i);
        });
    }
}

}  // namespace

SweepRecord estimate_pupe(const Simulator& sim, std::size_t ka, double ebn0_db, Csi csi, const TrialBudget& budget,
                          std::uint64_t base_seed, const RunOptions& run) {
    if (budget.max_trials == 0) throw ConfigError("need at least one trial");
    const std::size_t batch = std::max<std::size_t>(run.batch, 1);
    std::vector<TrialResult> kept;
    std::size_t events = 0, denom = 0;
    bool done = false;
    while (!done) {
        const std::size_t first = kept.size();
        std::vector<TrialResult> chunk(std::min(batch, budget.max_trials - first));
        run_batch(sim, ka, ebn0_db, csi, base_seed, first, chunk, run.workers);
        for (auto& t : chunk) {
            const auto c = t.counts();
            events += c.misdetected + c.decode_error + (budget.metric == PupeMetric::AllCauses ? c.collision : 0);
            denom += ka - (budget.metric == PupeMetric::AllCauses ? 0 : c.collision);
            kept.push_back(std::move(t));
            const std::size_t n = kept.size();
            if (n >= budget.max_trials) done = true;
            if (n >= budget.min_trials) {
                if (budget.target_errors > 0 && events >= budget.target_errors) done = true;
                if (budget.decision_target && denom > 0) {
                    const Interval ci = wilson_interval(events, denom);
                    if (ci.hi < *budget.decision_target || ci.lo > *budget.decision_target) done = true;
                }
                if (ka == 0 && n >= budget.min_trials) done = done || budget.target_errors > 0;
            }
            if (done) break;
        }
    }
    return aggregate_trials(sim.profile(), ka, ebn0_db, csi, base_seed, kept);
}

SearchResult bisect_threshold(const std::function<double(double)>& error_rate_at, const SearchOptions& opts) {
    SearchResult res;
    auto probe = [&](double x) {
        const double v = error_rate_at(x);
        res.probes.emplace_back(x, v);
        return v;
    };
    double lo = opts.lo_db, hi = opts.hi_db;
    const double at_hi = probe(hi);
    if (at_hi > opts.target) {
        res.message = "target not reached at the upper bracket end";
        return res;
    }
    const double at_lo = probe(lo);
    if (at_lo <= opts.target) {
        res.message = "target already met at the lower bracket end";
        return res;
    }
    while (hi - lo > opts.tolerance_db) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid) > opts.target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    res.ebn0_db = 0.5 * (lo + hi);
    res.message = "ok";
    return res;
}

RequiredEbn0Result required_ebn0(const Simulator& sim, std::size_t ka, Csi csi, const RequiredEbn0Options& opts) {
    RequiredEbn0Result out;
    TrialBudget budget;
    budget.max_trials = opts.max_trials;
    budget.min_trials = opts.min_trials;
    budget.target_errors = opts.target_errors;
    budget.decision_target = opts.search.target;
    budget.metric = opts.metric;
    out.search = bisect_threshold(
        [&](double ebn0) {
            out.records.push_back(estimate_pupe(sim, ka, ebn0, csi, budget, opts.seed, opts.run));
            return out.records.back().metric(opts.metric);
        },
        opts.search);
    return out;
}

}  // namespace usma
