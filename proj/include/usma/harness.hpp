#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "usma/profile.hpp"
#include "usma/stats.hpp"

namespace usma {

/// Ideal: the receiver is handed every user's temporal id and true gains, one
/// stream per user even when ids collide. Estimated: one stream per column the
/// preamble detector declares active, with its gain estimate.
enum class Csi { Ideal, Estimated };

const char* to_string(Csi csi);
Csi parse_csi(const std::string& s);

enum class UserOutcome { Success, Collision, Misdetected, DecodeError };

/// Which user-error events count toward the error rate.
/// AllCauses: errors / (trials * K_a).
/// ExcludeCollisions: (misdetections + decode errors) / (trials * K_a - collisions),
/// i.e. the error rate of the receiver given the id draw was collision free.
enum class PupeMetric { AllCauses, ExcludeCollisions };

const char* to_string(PupeMetric m);
PupeMetric parse_metric(const std::string& s);

struct OutcomeCounts {
    std::size_t success = 0;
    std::size_t collision = 0;
    std::size_t misdetected = 0;
    std::size_t decode_error = 0;

    std::size_t total() const { return success + collision + misdetected + decode_error; }
    std::size_t errors() const { return collision + misdetected + decode_error; }
};

struct TrialResult {
    std::vector<UserOutcome> outcomes;  ///< one per active user, in draw order
    std::size_t false_alarms = 0;       ///< detected ids no active user chose
    double ebn0_db = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> mean_abs_llr;   ///< receiver convergence trace

    OutcomeCounts counts() const;
};

/// Test hooks for run_trial.
struct TrialOptions {
    /// If non-empty, user k < size() is forced to temporal id forced_ids[k].
    std::vector<std::size_t> forced_ids;
};

/// A profile with its sensing matrix built once; safe to share across worker threads.
class Simulator {
public:
    explicit Simulator(SystemProfile profile);

    const SystemProfile& profile() const { return profile_; }
    const SensingMatrix& matrix() const { return matrix_; }
    const PreambleConfig& preamble() const { return preamble_; }

    /// Draws K_a messages, transmits, receives and scores. Deterministic in `seed`;
    /// noise is drawn at unit scale, so equal seeds at different E_b/N_0 share
    /// every realization.
    TrialResult run_trial(std::size_t ka, double ebn0_db, std::uint64_t seed, Csi csi,
                          const TrialOptions& options = {}) const;

private:
    SystemProfile profile_;
    SensingMatrix matrix_;
    PreambleConfig preamble_;
    PatternSpec pattern_spec_;
};

TrialResult run_trial(const SystemProfile& profile, std::size_t ka, double ebn0_db, std::uint64_t seed, Csi csi);

struct SweepRecord {
    std::string profile;
    std::string channel;
    Csi csi = Csi::Ideal;
    std::size_t ka = 0;
    double ebn0_db = 0.0;
    std::size_t trials = 0;
    std::size_t user_errors = 0;
    double pupe = 0.0;
    Interval ci{};
    std::size_t err_collision = 0;
    std::size_t err_misdetect = 0;
    std::size_t err_decode = 0;
    std::uint64_t seed = 0;
    std::size_t false_alarms = 0;

    /// Events and denominator of the chosen metric.
    std::pair<std::size_t, std::size_t> metric_counts(PupeMetric m) const;
    double metric(PupeMetric m) const;
    Interval metric_ci(PupeMetric m) const;
};

/// Sequential stopping rule, evaluated after every trial in index order so the
/// outcome does not depend on batching or worker count.
struct TrialBudget {
    std::size_t max_trials = 1;
    std::size_t min_trials = 1;
    /// Stop once this many metric events were seen (0: never).
    std::size_t target_errors = 0;
    /// Stop once the 95% interval of the metric excludes this value (after min_trials).
    std::optional<double> decision_target;
    PupeMetric metric = PupeMetric::AllCauses;

    static TrialBudget fixed(std::size_t n) { return {n, n, 0, std::nullopt, PupeMetric::AllCauses}; }
};

struct RunOptions {
    unsigned workers = 1;
    std::size_t batch = 16;
};

/// Aggregates independent trials with seeds derived from `base_seed` and the trial index.
SweepRecord estimate_pupe(const Simulator& sim, std::size_t ka, double ebn0_db, Csi csi, const TrialBudget& budget,
                          std::uint64_t base_seed, const RunOptions& run = {});

/// Aggregates already-computed trials; used by estimate_pupe and by tests.
SweepRecord aggregate_trials(const SystemProfile& profile, std::size_t ka, double ebn0_db, Csi csi,
                             std::uint64_t seed, const std::vector<TrialResult>& trials);

struct SearchOptions {
    double target = 0.05;
    double tolerance_db = 0.1;
    double lo_db = -2.0;
    double hi_db = 20.0;
};

struct SearchResult {
    std::optional<double> ebn0_db;  ///< bracket midpoint, unset on bracket failure
    std::string message;
    std::vector<std::pair<double, double>> probes;  ///< (E_b/N_0, error rate)
};

/// Bisection for the E_b/N_0 at which a decreasing error-rate curve crosses
/// `target`. Both bracket ends are probed first; if the target is not
/// bracketed the failure is reported in `message`.
SearchResult bisect_threshold(const std::function<double(double)>& error_rate_at, const SearchOptions& opts);

struct RequiredEbn0Options {
    SearchOptions search{};
    PupeMetric metric = PupeMetric::ExcludeCollisions;
    std::size_t max_trials = 10000;
    std::size_t min_trials = 20;
    std::size_t target_errors = 200;
    std::uint64_t seed = 1;
    RunOptions run{};
};

struct RequiredEbn0Result {
    SearchResult search;
    std::vector<SweepRecord> records;
};

/// Required E_b/N_0 for a per-user error rate of `search.target`. Probes far
/// from the target stop early once the interval excludes it; probes near it
/// run until `target_errors` events or `max_trials`. Every probe reuses the
/// same trial seeds.
RequiredEbn0Result required_ebn0(const Simulator& sim, std::size_t ka, Csi csi, const RequiredEbn0Options& opts);

}  // namespace usma
