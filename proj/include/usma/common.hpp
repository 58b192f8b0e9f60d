#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace usma {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;
using Bits = std::vector<std::uint8_t>;

/// Invalid parameter combination (sizes, code polynomials, profile arithmetic).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Vector length does not match the object it is applied to.
class DimensionError : public std::length_error {
public:
    explicit DimensionError(const std::string& what) : std::length_error(what) {}
};

/// Non-finite input or a numerical breakdown the caller must know about.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require_length(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                             ", got " + std::to_string(got));
    }
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace usma
