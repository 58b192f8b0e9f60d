#include "usma/aiot.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "usma/rng.hpp"

namespace usma::aiot {

std::size_t rfid_slotted_aloha_capacity(std::size_t n_slots) {
    // Integer form of floor(n * 0.367), free of binary rounding.
    return n_slots * 367 / 1000;
}

OverflowEstimate slot_overflow_probability(const SlottedAlohaModel& model, std::size_t n_mc, std::uint64_t seed) {
    if (model.n_slots == 0 || model.n_users == 0 || model.capacity == 0 || n_mc == 0) {
        throw std::invalid_argument("slot_overflow_probability: all parameters must be positive");
    }
    OverflowEstimate est;
    est.n_mc = n_mc;
    est.fixed_slot_exact =
        binomial_upper_tail(model.n_users, 1.0 / static_cast<double>(model.n_slots), model.capacity);

    Rng rng = make_rng(seed, Stream::Aloha);
    std::uniform_int_distribution<std::size_t> pick(0, model.n_slots - 1);
    std::vector<std::size_t> load(model.n_slots);
    std::size_t slot_overflows = 0;
    std::size_t frame_overflows = 0;
    for (std::size_t trial = 0; trial < n_mc; ++trial) {
        std::fill(load.begin(), load.end(), 0);
        for (std::size_t u = 0; u < model.n_users; ++u) ++load[pick(rng)];
        bool any = false;
        for (auto l : load) {
            if (l > model.capacity) {
                ++slot_overflows;
                any = true;
            }
        }
        frame_overflows += any ? 1 : 0;
    }
    // Every slot is an equally valid "fixed" slot; pooling them sharpens the estimate.
    const std::size_t slot_samples = n_mc * model.n_slots;
    est.fixed_slot_mc = static_cast<double>(slot_overflows) / static_cast<double>(slot_samples);
    est.fixed_slot_ci = wilson_interval(slot_overflows, slot_samples);
    est.any_slot_mc = static_cast<double>(frame_overflows) / static_cast<double>(n_mc);
    est.any_slot_ci = wilson_interval(frame_overflows, n_mc);
    return est;
}

EfficiencyReport efficiency_report(std::size_t n_mc, std::uint64_t seed) {
    EfficiencyReport r;
    r.rfid_tdm_users = r.usma_data_chips / r.rfid_epc_chips;
    r.data_ratio = static_cast<double>(r.usma_users_per_slot) / static_cast<double>(r.rfid_tdm_users);
    r.cs_slots = r.rn16_slots * r.rn16_symbols / r.cs_preamble_symbols;
    r.rfid_served = rfid_slotted_aloha_capacity(r.rn16_slots);
    r.usma_served = 90;
    r.access_ratio = static_cast<double>(r.usma_served) / static_cast<double>(r.rfid_served);
    r.overflow = slot_overflow_probability({r.cs_slots, r.usma_served, r.usma_users_per_slot}, n_mc, seed);
    return r;
}

std::string format_report(const EfficiencyReport& r) {
    char buf[256];
    std::ostringstream os;
    os << "Data multiplexing\n";
    std::snprintf(buf, sizeof buf, "  RFID TDM users in %zu chips: %zu / %zu = %zu\n", r.usma_data_chips,
                  r.usma_data_chips, r.rfid_epc_chips, r.rfid_tdm_users);
    os << buf;
    std::snprintf(buf, sizeof buf, "  USMA users per slot / RFID TDM users: %zu / %zu = %.2f\n", r.usma_users_per_slot,
                  r.rfid_tdm_users, r.data_ratio);
    os << buf;
    os << "Random access\n";
    std::snprintf(buf, sizeof buf, "  RFID served in %zu RN16 slots: floor(%zu * %.3f) = %zu\n", r.rn16_slots,
                  r.rn16_slots, kAlohaPeak, r.rfid_served);
    os << buf;
    std::snprintf(buf, sizeof buf, "  CS preamble slots in the same resources: %zu * %zu / %zu = %zu\n", r.rn16_slots,
                  r.rn16_symbols, r.cs_preamble_symbols, r.cs_slots);
    os << buf;
    std::snprintf(buf, sizeof buf, "  USMA offered users: %zu, access ratio %zu / %zu = %.2f\n", r.usma_served,
                  r.usma_served, r.rfid_served, r.access_ratio);
    os << buf;
    std::snprintf(buf, sizeof buf, "  P(>%zu users in a given slot): exact %.4f, MC %.4f [%.4f, %.4f]\n",
                  r.usma_users_per_slot, r.overflow.fixed_slot_exact, r.overflow.fixed_slot_mc,
                  r.overflow.fixed_slot_ci.lo, r.overflow.fixed_slot_ci.hi);
    os << buf;
    std::snprintf(buf, sizeof buf, "  P(>%zu users in any of %zu slots): MC %.4f [%.4f, %.4f]\n", r.usma_users_per_slot,
                  r.cs_slots, r.overflow.any_slot_mc, r.overflow.any_slot_ci.lo, r.overflow.any_slot_ci.hi);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "  note: the %.0f%% overflow bound holds for the given-slot event (%s) and %s for the any-slot event\n",
                  100.0 * r.overflow_claim, r.overflow.fixed_slot_exact < r.overflow_claim ? "yes" : "no",
                  r.overflow.any_slot_mc < r.overflow_claim ? "also holds" : "does not hold");
    os << buf;
    return os.str();
}

std::string report_csv(const EfficiencyReport& r) {
    std::ostringstream os;
    char buf[128];
    auto row = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%s,%.6g\n", key, v);
        os << buf;
    };
    os << "quantity,value\n";
    row("rfid_tdm_users", static_cast<double>(r.rfid_tdm_users));
    row("data_ratio", r.data_ratio);
    row("rfid_served", static_cast<double>(r.rfid_served));
    row("cs_slots", static_cast<double>(r.cs_slots));
    row("usma_served", static_cast<double>(r.usma_served));
    row("access_ratio", r.access_ratio);
    row("overflow_fixed_slot_exact", r.overflow.fixed_slot_exact);
    row("overflow_fixed_slot_mc", r.overflow.fixed_slot_mc);
    row("overflow_any_slot_mc", r.overflow.any_slot_mc);
    return os.str();
}

}  // namespace usma::aiot
