#include "usma/channel.hpp"

#include <algorithm>
#include <cmath>

#include "usma/kernels.hpp"

namespace usma {

void ChannelModel::validate() const {
    if (rx_antennas < 1) throw ConfigError("channel needs at least one receive antenna");
    if (kind == ChannelKind::Gmac && rx_antennas != 1) throw ConfigError("GMAC is single-antenna");
}

std::string ChannelModel::label() const {
    if (kind == ChannelKind::Gmac) return "gmac";
    return "rayleigh-" + std::to_string(rx_antennas) + "rx";
}

ChannelModel ChannelModel::parse(const std::string& label) {
    if (label == "gmac") return gmac();
    const std::string prefix = "rayleigh";
    if (label.rfind(prefix, 0) == 0) {
        if (label == prefix) return rayleigh(2);
        const std::string rest = label.substr(prefix.size());
        if (rest.size() >= 4 && rest.front() == '-' && rest.substr(rest.size() - 2) == "rx") {
            const int n = std::stoi(rest.substr(1, rest.size() - 3));
            auto m = rayleigh(n);
            m.validate();
            return m;
        }
    }
    throw ConfigError("unknown channel '" + label + "' (expected gmac or rayleigh-<n>rx)");
}

NoiseLevel noise_from_ebn0(const EnergyBudget& budget, double ebn0_db) {
    if (!(budget.eb() > 0.0)) throw ConfigError("energy per bit must be positive");
    return {budget.eb() / db_to_linear(ebn0_db)};
}

std::vector<std::vector<cplx>> draw_gains(const ChannelModel& model, std::size_t n_users, Rng& rng) {
    model.validate();
    const auto n_ant = static_cast<std::size_t>(model.rx_antennas);
    std::vector<std::vector<cplx>> gains(n_users, std::vector<cplx>(n_ant, cplx{1.0, 0.0}));
    if (model.kind == ChannelKind::RayleighBlock) {
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        for (auto& user : gains) {
            for (auto& g : user) {
                const double re = normal(rng);
                const double im = normal(rng);
                g = {re, im};
            }
        }
    }
    return gains;
}

Superposition::Superposition(FrameGeometry geometry, int antennas)
    : geometry_(geometry),
      rx_(static_cast<std::size_t>(std::max(antennas, 0)), CVec(geometry.preamble_len + geometry.data_len)) {
    if (antennas < 1) throw ConfigError("need at least one antenna");
}

void Superposition::add(const UserFrame& frame, std::span<const cplx> gains) {
    const std::size_t pre = geometry_.preamble_len;
    require_length(frame.preamble.size(), pre, "frame preamble");
    require_length(frame.data.size(), geometry_.data_len, "frame data");
    require_length(gains.size(), rx_.size(), "frame gains");
    const auto& k = kernels::kernels();
    for (std::size_t a = 0; a < rx_.size(); ++a) {
        auto& rx = rx_[a];
        for (std::size_t i = 0; i < pre; ++i) rx[i] += gains[a] * frame.preamble[i];
        k.accumulate_real(gains[a], frame.data.data(), geometry_.data_len, rx.data() + pre);
    }
}

std::vector<CVec> Superposition::finish(double n0, Rng& noise_rng) && {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(0.5 * n0);
    for (auto& rx : rx_) {
        for (auto& v : rx) {
            const double re = normal(noise_rng);
            const double im = normal(noise_rng);
            v += cplx{sd * re, sd * im};
        }
    }
    return std::move(rx_);
}

std::vector<CVec> propagate(std::span<const UserFrame> frames, const std::vector<std::vector<cplx>>& gains,
                            FrameGeometry geometry, int antennas, double n0, Rng& noise_rng) {
    require_length(gains.size(), frames.size(), "propagate gains");
    Superposition sum(geometry, antennas);
    for (std::size_t k = 0; k < frames.size(); ++k) sum.add(frames[k], gains[k]);
    return std::move(sum).finish(n0, noise_rng);
}

}  // namespace usma
