#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "usma/aiot.hpp"
#include "usma/stats.hpp"

using namespace usma;
using namespace usma::aiot;

namespace {

// Direct summation with exact integer binomial coefficients.
double tail_oracle(unsigned n, double p, unsigned t) {
    long double sum = 0.0L;
    for (unsigned k = t + 1; k <= n; ++k) {
        long double c = 1.0L;
        for (unsigned i = 1; i <= k; ++i) c = c * (n - k + i) / i;
        sum += c * std::pow(static_cast<long double>(p), k) * std::pow(1.0L - p, n - k);
    }
    return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("rfid capacity truncates n * 0.367") {
    CHECK(rfid_slotted_aloha_capacity(60) == 22);
    CHECK(rfid_slotted_aloha_capacity(1) == 0);
    CHECK(rfid_slotted_aloha_capacity(100) == 36);
    CHECK(rfid_slotted_aloha_capacity(1000) == 367);
    for (std::size_t n = 1; n < 2000; ++n) {
        CHECK(rfid_slotted_aloha_capacity(n) == static_cast<std::size_t>(std::floor(n * 0.367 + 1e-9)));
    }
}

TEST_CASE("binomial tail matches direct summation") {
    CHECK(binomial_upper_tail(90, 0.1, 15) == doctest::Approx(tail_oracle(90, 0.1, 15)).epsilon(1e-10));
    CHECK(binomial_upper_tail(90, 0.1, 15) == doctest::Approx(0.01632).epsilon(1e-3));
    CHECK(binomial_upper_tail(10, 0.5, 4) == doctest::Approx(tail_oracle(10, 0.5, 4)).epsilon(1e-12));
    CHECK(binomial_upper_tail(200, 0.03, 2) == doctest::Approx(tail_oracle(200, 0.03, 2)).epsilon(1e-10));
    CHECK(binomial_upper_tail(5, 0.3, 5) == 0.0);
    CHECK(binomial_upper_tail(5, 0.3, 9) == 0.0);
}

TEST_CASE("overflow estimate: fixed-slot MC agrees with the exact tail") {
    const auto est = slot_overflow_probability({10, 90, 15}, 50000, 7);
    CHECK(est.fixed_slot_ci.lo <= est.fixed_slot_exact);
    CHECK(est.fixed_slot_exact <= est.fixed_slot_ci.hi);
    // Any-slot is at least the fixed-slot probability and at most 10x it (union bound).
    CHECK(est.any_slot_mc >= est.fixed_slot_mc);
    CHECK(est.any_slot_mc <= 10.0 * est.fixed_slot_exact * 1.1);
}

TEST_CASE("overflow is zero when the capacity covers every user") {
    const auto est = slot_overflow_probability({10, 15, 15}, 2000, 3);
    CHECK(est.fixed_slot_exact == 0.0);
    CHECK(est.fixed_slot_mc == 0.0);
    CHECK(est.any_slot_mc == 0.0);
    CHECK_THROWS(slot_overflow_probability({0, 15, 15}, 10, 1));
    CHECK_THROWS(slot_overflow_probability({1, 15, 15}, 0, 1));
}

TEST_CASE("overflow estimate is seed deterministic") {
    const auto a = slot_overflow_probability({10, 90, 15}, 3000, 11);
    const auto b = slot_overflow_probability({10, 90, 15}, 3000, 11);
    CHECK(a.fixed_slot_mc == b.fixed_slot_mc);
    CHECK(a.any_slot_mc == b.any_slot_mc);
}

TEST_CASE("efficiency report arithmetic") {
    const auto r = efficiency_report(20000, 1);
    CHECK(r.rfid_tdm_users == 4);
    CHECK(r.data_ratio == doctest::Approx(3.75));
    CHECK(r.rfid_served == 22);
    CHECK(r.cs_slots == 10);
    CHECK(r.usma_served == 90);
    CHECK(r.access_ratio == doctest::Approx(90.0 / 22.0));
    const std::string text = format_report(r);
    CHECK(text.find("15 / 4 = 3.75") != std::string::npos);
    CHECK(text.find("90 / 22 = 4.09") != std::string::npos);
    const std::string csv = report_csv(r);
    CHECK(csv.rfind("quantity,value\n", 0) == 0);
    CHECK(csv.find("data_ratio,3.75\n") != std::string::npos);
}

TEST_CASE("wilson interval") {
    const auto zero = wilson_interval(0, 100);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);
    CHECK(zero.hi < 0.05);
    const auto all = wilson_interval(100, 100);
    CHECK(all.hi == doctest::Approx(1.0));
    const auto mid = wilson_interval(50, 100);
    CHECK(mid.lo < 0.5);
    CHECK(mid.hi > 0.5);
    CHECK(mid.lo + mid.hi == doctest::Approx(1.0));
    // Textbook value: 10/100 -> [0.0552, 0.1744].
    const auto ten = wilson_interval(10, 100);
    CHECK(ten.lo == doctest::Approx(0.0552).epsilon(2e-3));
    CHECK(ten.hi == doctest::Approx(0.1744).epsilon(2e-3));
    // Narrows with n at a fixed proportion.
    const auto big = wilson_interval(1000, 10000);
    CHECK(big.hi - big.lo < ten.hi - ten.lo);
    const auto empty = wilson_interval(0, 0);
    CHECK(empty.lo == 0.0);
    CHECK(empty.hi == 1.0);
}
