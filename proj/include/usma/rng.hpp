#pragma once

#include <cstdint>
#include <random>

namespace usma {

using Rng = std::mt19937_64;

/// Named random streams. Every draw in a trial flows from the trial seed
/// through exactly one of these, so changing how one stream is consumed never
/// perturbs the others.
enum class Stream : std::uint64_t {
    Messages = 1,
    Gains = 2,
    Noise = 3,
    MatrixSelection = 4,
    Pattern = 5,
    Trial = 6,
    Aloha = 7,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t index = 0) {
    return splitmix64(splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(stream))) + index);
}

inline Rng make_rng(std::uint64_t base, Stream stream, std::uint64_t index = 0) {
    return Rng(derive_seed(base, stream, index));
}

}  // namespace usma
