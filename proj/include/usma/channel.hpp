#pragma once

#include <span>
#include <string>
#include <vector>

#include "usma/common.hpp"
#include "usma/rng.hpp"

namespace usma {

enum class ChannelKind { Gmac, RayleighBlock };

/// Gains are constant over a whole frame (preamble and data).
struct ChannelModel {
    ChannelKind kind = ChannelKind::Gmac;
    int rx_antennas = 1;

    static ChannelModel gmac() { return {ChannelKind::Gmac, 1}; }
    static ChannelModel rayleigh(int antennas) { return {ChannelKind::RayleighBlock, antennas}; }

    void validate() const;
    /// "gmac", "rayleigh-1rx", "rayleigh-2rx", ...
    std::string label() const;
    static ChannelModel parse(const std::string& label);
};

/// Transmit energy of one packet. E_b counts preamble and data energy over
/// all B message bits (including the L bits carried by the preamble); chips
/// left at zero contribute nothing.
struct EnergyBudget {
    double preamble_energy = 0.0;
    double data_energy = 0.0;
    int info_bits = 1;

    double eb() const { return (preamble_energy + data_energy) / info_bits; }
};

struct NoiseLevel {
    double n0 = 1.0;
    /// Variance of complex noise per symbol per antenna, CN(0, N_0).
    double complex_var() const { return n0; }
    /// Variance per real dimension.
    double real_var() const { return 0.5 * n0; }
};

NoiseLevel noise_from_ebn0(const EnergyBudget& budget, double ebn0_db);

/// gains[user][antenna]: all 1 for GMAC, i.i.d. CN(0,1) for Rayleigh.
std::vector<std::vector<cplx>> draw_gains(const ChannelModel& model, std::size_t n_users, Rng& rng);

struct FrameGeometry {
    std::size_t preamble_len = 0;
    std::size_t data_len = 0;
};

/// One user's transmitted frame: M preamble symbols followed by M_d real data chips.
struct UserFrame {
    CVec preamble;
    RVec data;

    std::size_t length() const { return preamble.size() + data.size(); }
};

/// Streaming form of `propagate`: users are added one at a time so that a
/// trial never holds all frames in memory.
class Superposition {
public:
    Superposition(FrameGeometry geometry, int antennas);

    void add(const UserFrame& frame, std::span<const cplx> gains);
    /// Adds CN(0, n0) noise to every received sample and returns the per-antenna signal.
    std::vector<CVec> finish(double n0, Rng& noise_rng) &&;

private:
    FrameGeometry geometry_;
    std::vector<CVec> rx_;
};

/// r^a = sum_k h_k^a s_k + n^a over the whole frame.
std::vector<CVec> propagate(std::span<const UserFrame> frames, const std::vector<std::vector<cplx>>& gains,
                            FrameGeometry geometry, int antennas, double n0, Rng& noise_rng);

}  // namespace usma
