#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "usma/fec.hpp"

using namespace usma;
using namespace usma::oracle;

namespace {

RVec noisy_llr(const Bits& word, double sigma, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, sigma);
    RVec llr(word.size());
    for (std::size_t i = 0; i < word.size(); ++i) llr[i] = 2.0 * ((word[i] ? -1.0 : 1.0) + g(rng)) / (sigma * sigma);
    return llr;
}

}  // namespace

TEST_CASE("trellis tables and lengths") {
    const ConvCode code;
    CHECK(code.n_states() == 64);
    CHECK(code.memory() == 6);
    CHECK(code.n_coded(87) == 186);
    CHECK(code.n_coded(88) == 188);
    CHECK(code.n_info(188) == 88);
    CHECK_THROWS_AS(code.n_info(187), DimensionError);
    CHECK_THROWS_AS(ConvCode(0200, 0171, 7), ConfigError);
}

TEST_CASE("impulse response is the interleaved generator taps") {
    Bits info(10, 0);
    info[0] = 1;
    const Bits out = conv_encode(ConvCode{}, info);
    REQUIRE(out.size() == 32);
    const char* g0 = "1011011";
    const char* g1 = "1111001";
    for (std::size_t t = 0; t < 16; ++t) {
        CHECK(out[2 * t] == (t < 7 ? g0[t] - '0' : 0));
        CHECK(out[2 * t + 1] == (t < 7 ? g1[t] - '0' : 0));
    }
}

TEST_CASE("encoder matches the tap-string encoder; zero input gives zero output") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        Bits info(88);
        for (auto& b : info) b = rng() & 1U;
        CHECK(conv_encode(ConvCode{}, info) == encode_by_taps(info));
    }
    const Bits zeros = conv_encode(ConvCode{}, Bits(87, 0));
    CHECK(std::all_of(zeros.begin(), zeros.end(), [](auto b) { return b == 0; }));
}

TEST_CASE("BCJR equals exhaustive-codeword MAP (k = 8, 50 LLR vectors)") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0.0, 2.5);
    const ConvCode code;
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        RVec llr(code.n_coded(8));
        for (auto& l : llr) l = g(rng);
        const auto dec = bcjr_decode(code, llr);
        const auto ref = exhaustive_map(8, llr);
        for (std::size_t i = 0; i < 8; ++i) worst = std::max(worst, std::abs(dec.info_posterior[i] - ref.info[i]));
        for (std::size_t i = 0; i < llr.size(); ++i) {
            worst = std::max(worst, std::abs(dec.coded_posterior[i] - ref.coded[i]));
            CHECK(dec.extrinsic[i] == doctest::Approx(dec.coded_posterior[i] - llr[i]).epsilon(1e-12));
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("a-priori LLRs act as extra channel evidence") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 2.0);
    const ConvCode code;
    RVec ch(code.n_coded(8)), prior(ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i) {
        ch[i] = g(rng);
        prior[i] = g(rng);
    }
    RVec sum(ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i) sum[i] = ch[i] + prior[i];
    const auto with_prior = bcjr_decode(code, ch, prior);
    const auto ref = exhaustive_map(8, sum);
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(with_prior.info_posterior[i] - ref.info[i]) < 1e-9);
    for (std::size_t i = 0; i < ch.size(); ++i) {
        CHECK(with_prior.extrinsic[i] == doctest::Approx(with_prior.coded_posterior[i] - ch[i] - prior[i]).epsilon(1e-9));
    }
}

TEST_CASE("extrinsic of a bit does not depend on that bit's own channel LLR") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 2.0);
    const ConvCode code;
    RVec llr(code.n_coded(20));
    for (auto& l : llr) l = g(rng);
    const auto base = bcjr_decode(code, llr);
    for (std::size_t i : {0u, 7u, 30u, 51u}) {
        RVec changed = llr;
        changed[i] += 3.7;
        CHECK(bcjr_decode(code, changed).extrinsic[i] == doctest::Approx(base.extrinsic[i]).epsilon(1e-9));
    }
}

TEST_CASE("Viterbi picks a maximum-likelihood codeword") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 2.0);
    const ConvCode code;
    for (int t = 0; t < 30; ++t) {
        RVec llr(code.n_coded(8));
        for (auto& l : llr) l = g(rng);
        const Bits vit = viterbi_decode(code, llr);
        const double ml = log_likelihood(encode_by_taps(vit), llr);
        double best = -1e300;
        for (std::size_t w = 0; w < 256; ++w) {
            Bits info(8);
            for (std::size_t i = 0; i < 8; ++i) info[i] = (w >> (7 - i)) & 1U;
            best = std::max(best, log_likelihood(encode_by_taps(info), llr));
        }
        CHECK(ml == doctest::Approx(best).epsilon(1e-12));
        CHECK(ml >= log_likelihood(encode_by_taps(bcjr_decode(code, llr).hard_info), llr) - 1e-12);
    }
}

TEST_CASE("noiseless decode and hard-decision sign convention") {
    std::mt19937_64 rng(6);
    Bits info(87);
    for (auto& b : info) b = rng() & 1U;
    const Bits word = conv_encode(ConvCode{}, info);
    RVec llr(word.size());
    for (std::size_t i = 0; i < word.size(); ++i) llr[i] = word[i] ? -8.0 : 8.0;
    CHECK(bcjr_decode(ConvCode{}, llr).hard_info == info);
    CHECK(viterbi_decode(ConvCode{}, llr) == info);
}

TEST_CASE("single-user AWGN: BER under the union bound; Viterbi agrees with BCJR at 4 dB") {
    const ConvCode code;
    const std::size_t k = 88;
    std::mt19937_64 rng(77);
    const double rate = static_cast<double>(k) / static_cast<double>(code.n_coded(k));
    auto sigma_at = [&](double ebn0_db) { return std::sqrt(1.0 / (rate * std::pow(10.0, ebn0_db / 10.0)) / 2.0); };
    auto ber_at = [&](double ebn0_db, int blocks) {
        std::size_t errors = 0, bits = 0;
        const double s = sigma_at(ebn0_db);
        for (int blk = 0; blk < blocks; ++blk) {
            Bits info(k);
            for (auto& b : info) b = rng() & 1U;
            const auto dec = bcjr_decode(code, noisy_llr(conv_encode(code, info), s, rng));
            for (std::size_t i = 0; i < k; ++i) errors += dec.hard_info[i] != info[i];
            bits += k;
        }
        return static_cast<double>(errors) / static_cast<double>(bits);
    };
    // Bit-error union bound from the published information-weight spectrum of
    // (133, 171): B_d for d = 10, 12, ..., 24.
    auto union_bound = [&](double ebn0_db) {
        const double gamma = std::pow(10.0, ebn0_db / 10.0);
        const double weights[] = {36, 211, 1404, 11633, 77433, 502690, 3322763, 21292910};
        double pb = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double d = 10.0 + 2.0 * i;
            pb += weights[i] * 0.5 * std::erfc(std::sqrt(d * rate * gamma));
        }
        return pb;
    };
    const double ber3 = ber_at(3.0, 6000);
    const double ber35 = ber_at(3.5, 6000);
    MESSAGE("BER 3.0 dB: " << ber3 << ", 3.5 dB: " << ber35 << " (bound " << union_bound(3.5) << ")");
    CHECK(ber3 >= 1e-4);
    CHECK(ber3 <= 2e-3);
    CHECK(ber35 < ber3);
    CHECK(ber35 <= union_bound(3.5));
    CHECK(ber35 > 0.0);

    std::size_t agree = 0, total = 0;
    const double s4 = sigma_at(4.0);
    for (int blk = 0; blk < 500; ++blk) {
        Bits info(k);
        for (auto& b : info) b = rng() & 1U;
        const RVec llr = noisy_llr(conv_encode(code, info), s4, rng);
        const Bits a = viterbi_decode(code, llr);
        const Bits b = bcjr_decode(code, llr).hard_info;
        for (std::size_t i = 0; i < k; ++i) agree += a[i] == b[i];
        total += k;
    }
    CHECK(static_cast<double>(agree) / static_cast<double>(total) > 0.99);
}
