#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "usma/harness.hpp"
#include "usma/rng.hpp"

using namespace usma;

namespace {

const Simulator& aiot() {
    static const Simulator sim(make_profile("aiot-paper"));
    return sim;
}

bool same(const SweepRecord& a, const SweepRecord& b) {
    return a.trials == b.trials && a.user_errors == b.user_errors && a.err_collision == b.err_collision &&
           a.err_misdetect == b.err_misdetect && a.err_decode == b.err_decode && a.false_alarms == b.false_alarms &&
           a.pupe == b.pupe && a.ci.lo == b.ci.lo && a.ci.hi == b.ci.hi && a.seed == b.seed;
}

TrialResult synthetic(std::vector<UserOutcome> outcomes) {
    TrialResult t;
    t.outcomes = std::move(outcomes);
    return t;
}

}  // namespace

TEST_CASE("csi and metric names") {
    CHECK(parse_csi("ideal") == Csi::Ideal);
    CHECK(parse_csi("estimated") == Csi::Estimated);
    CHECK(std::string(to_string(Csi::Estimated)) == "estimated");
    CHECK_THROWS_AS(parse_csi("perfect"), ConfigError);
    CHECK(parse_metric("all") == PupeMetric::AllCauses);
    CHECK(parse_metric("no-collision") == PupeMetric::ExcludeCollisions);
    CHECK_THROWS_AS(parse_metric("bler"), ConfigError);
}

TEST_CASE("no active users") {
    for (Csi csi : {Csi::Ideal, Csi::Estimated}) {
        const auto t = aiot().run_trial(0, 15.0, 9, csi);
        CHECK(t.outcomes.empty());
        CHECK(t.false_alarms == 0);
        CHECK(t.counts().total() == 0);
    }
}

TEST_CASE("forced shared id scores both users as Collision") {
    TrialOptions opt;
    opt.forced_ids = {17, 17};
    for (Csi csi : {Csi::Ideal, Csi::Estimated}) {
        const auto t = aiot().run_trial(4, 20.0, 3, csi, opt);
        REQUIRE(t.outcomes.size() == 4);
        CHECK(t.outcomes[0] == UserOutcome::Collision);
        CHECK(t.outcomes[1] == UserOutcome::Collision);
    }
    TrialOptions too_many;
    too_many.forced_ids = {1, 2, 3};
    CHECK_THROWS_AS(aiot().run_trial(2, 10.0, 1, Csi::Ideal, too_many), ConfigError);
}

TEST_CASE("outcomes partition the active users") {
    for (std::size_t ka : {1U, 5U, 15U, 40U}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const auto t = aiot().run_trial(ka, 6.0, seed, Csi::Estimated);
            const auto c = t.counts();
            CHECK(t.outcomes.size() == ka);
            CHECK(c.total() == ka);
            CHECK(c.success + c.errors() == ka);
        }
    }
}

TEST_CASE("run_trial is deterministic in its seed") {
    const auto a = aiot().run_trial(15, 8.0, 1234, Csi::Estimated);
    const auto b = aiot().run_trial(15, 8.0, 1234, Csi::Estimated);
    CHECK(a.outcomes == b.outcomes);
    CHECK(a.false_alarms == b.false_alarms);
    CHECK(a.mean_abs_llr == b.mean_abs_llr);
    const auto c = run_trial(make_profile("aiot-paper"), 15, 8.0, 1234, Csi::Estimated);
    CHECK(a.outcomes == c.outcomes);
}

TEST_CASE("single gmac user at 20 dB succeeds") {
    const Simulator sim(make_profile("gmac-paper"));
    std::size_t ok = 0;
    const std::size_t n = 30;
    for (std::uint64_t s = 0; s < n; ++s) {
        ok += sim.run_trial(1, 20.0, s, Csi::Estimated).outcomes.at(0) == UserOutcome::Success;
    }
    CHECK(ok == n);
}

TEST_CASE("aiot: error rate falls with Eb/N0") {
    const auto low = estimate_pupe(aiot(), 15, 0.0, Csi::Ideal, TrialBudget::fixed(40), 5);
    const auto high = estimate_pupe(aiot(), 15, 16.0, Csi::Ideal, TrialBudget::fixed(40), 5);
    CHECK(low.metric(PupeMetric::ExcludeCollisions) > high.metric(PupeMetric::ExcludeCollisions));
    CHECK(high.metric(PupeMetric::ExcludeCollisions) < 0.05);
}

TEST_CASE("all-success trials give zero error rate and a zero lower bound") {
    std::vector<TrialResult> trials(50, synthetic(std::vector<UserOutcome>(10, UserOutcome::Success)));
    const auto r = aggregate_trials(make_profile("aiot-paper"), 10, 4.0, Csi::Ideal, 1, trials);
    CHECK(r.pupe == 0.0);
    CHECK(r.ci.lo == 0.0);
    CHECK(r.ci.hi > 0.0);
    CHECK(r.user_errors == 0);
    CHECK(r.trials == 50);
}

TEST_CASE("aggregation and metric counts") {
    std::vector<TrialResult> trials;
    trials.push_back(synthetic({UserOutcome::Success, UserOutcome::Collision, UserOutcome::Collision,
                                UserOutcome::Success}));
    trials.push_back(synthetic({UserOutcome::Misdetected, UserOutcome::DecodeError, UserOutcome::Success,
                                UserOutcome::Success}));
    trials[1].false_alarms = 2;
    const auto r = aggregate_trials(make_profile("aiot-paper"), 4, 4.0, Csi::Estimated, 7, trials);
    CHECK(r.user_errors == 4);
    CHECK(r.err_collision == 2);
    CHECK(r.err_misdetect == 1);
    CHECK(r.err_decode == 1);
    CHECK(r.false_alarms == 2);
    CHECK(r.pupe == doctest::Approx(4.0 / 8.0));
    CHECK(r.metric_counts(PupeMetric::AllCauses) == std::pair<std::size_t, std::size_t>{4, 8});
    CHECK(r.metric_counts(PupeMetric::ExcludeCollisions) == std::pair<std::size_t, std::size_t>{2, 6});
    CHECK(r.metric(PupeMetric::ExcludeCollisions) == doctest::Approx(2.0 / 6.0));
    CHECK(r.channel == "rayleigh-2rx");
}

TEST_CASE("estimate_pupe does not depend on workers or batch size") {
    TrialBudget budget;
    budget.max_trials = 60;
    budget.min_trials = 10;
    budget.target_errors = 12;
    budget.metric = PupeMetric::AllCauses;
    const auto ref = estimate_pupe(aiot(), 15, 6.0, Csi::Estimated, budget, 77, {1, 16});
    for (RunOptions run : {RunOptions{1, 1}, RunOptions{4, 16}, RunOptions{3, 7}, RunOptions{8, 64}}) {
        const auto r = estimate_pupe(aiot(), 15, 6.0, Csi::Estimated, budget, 77, run);
        CHECK(same(r, ref));
    }
    CHECK(ref.trials >= budget.min_trials);
    CHECK(ref.trials <= budget.max_trials);
    CHECK_THROWS_AS(estimate_pupe(aiot(), 15, 6.0, Csi::Ideal, TrialBudget{0, 0, 0, {}, {}}, 1), ConfigError);
}

TEST_CASE("stopping rule: target errors stops at the first trial reaching it") {
    TrialBudget budget;
    budget.max_trials = 400;
    budget.min_trials = 1;
    budget.target_errors = 5;
    budget.metric = PupeMetric::AllCauses;
    const auto r = estimate_pupe(aiot(), 15, 0.0, Csi::Ideal, budget, 3, {2, 16});
    CHECK(r.user_errors >= 5);
    // Dropping the last trial would leave fewer than 5 events.
    std::vector<TrialResult> trials;
    for (std::size_t i = 0; i + 1 < r.trials; ++i) {
        trials.push_back(aiot().run_trial(15, 0.0, derive_seed(3, Stream::Trial, i), Csi::Ideal));
    }
    CHECK(aggregate_trials(aiot().profile(), 15, 0.0, Csi::Ideal, 3, trials).user_errors < 5);
}

TEST_CASE("stopping rule: decision target ends clear-cut points early") {
    TrialBudget budget;
    budget.max_trials = 2000;
    budget.min_trials = 10;
    budget.decision_target = 0.05;
    budget.metric = PupeMetric::ExcludeCollisions;
    const auto r = estimate_pupe(aiot(), 15, 20.0, Csi::Ideal, budget, 3);
    CHECK(r.trials < 200);
    CHECK(r.metric_ci(PupeMetric::ExcludeCollisions).hi < 0.05);
}

TEST_CASE("bisection finds a step") {
    SearchOptions opt;
    opt.tolerance_db = 0.1;
    for (double step : {-1.3, 0.0, 4.321, 17.9}) {
        const auto res = bisect_threshold([&](double x) { return x < step ? 0.5 : 0.01; }, opt);
        REQUIRE(res.ebn0_db.has_value());
        CHECK(std::abs(*res.ebn0_db - step) <= opt.tolerance_db);
        CHECK(res.message == "ok");
        CHECK(res.probes.front().first == opt.hi_db);
        CHECK(res.probes[1].first == opt.lo_db);
    }
}

TEST_CASE("bisection on a smooth curve") {
    SearchOptions opt;
    opt.tolerance_db = 0.01;
    const auto res = bisect_threshold([](double x) { return std::pow(10.0, -x / 4.0); }, opt);
    REQUIRE(res.ebn0_db.has_value());
    CHECK(*res.ebn0_db == doctest::Approx(-4.0 * std::log10(0.05)).epsilon(1e-3));
}

TEST_CASE("bracket failures are reported, not thrown") {
    const auto never = bisect_threshold([](double) { return 0.9; }, {});
    CHECK_FALSE(never.ebn0_db.has_value());
    CHECK(never.message.find("upper") != std::string::npos);
    CHECK(never.probes.size() == 1);
    const auto always = bisect_threshold([](double) { return 0.0; }, {});
    CHECK_FALSE(always.ebn0_db.has_value());
    CHECK(always.message.find("lower") != std::string::npos);
    CHECK(always.probes.size() == 2);
}

TEST_CASE("required_ebn0 records every probe") {
    RequiredEbn0Options opt;
    opt.search.lo_db = 0.0;
    opt.search.hi_db = 20.0;
    opt.search.tolerance_db = 2.5;
    opt.max_trials = 60;
    opt.min_trials = 10;
    opt.target_errors = 20;
    const auto res = required_ebn0(aiot(), 5, Csi::Ideal, opt);
    REQUIRE(res.search.ebn0_db.has_value());
    CHECK(res.records.size() == res.search.probes.size());
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        CHECK(res.records[i].ebn0_db == res.search.probes[i].first);
        CHECK(res.records[i].metric(PupeMetric::ExcludeCollisions) == res.search.probes[i].second);
    }
    CHECK(*res.search.ebn0_db > 0.0);
    CHECK(*res.search.ebn0_db < 20.0);
}
