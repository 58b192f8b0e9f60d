#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "usma/common.hpp"

namespace usma {

enum class TransformKind { PartialDft, PartialHadamard };

const char* to_string(TransformKind kind);

/// Row-punctured unitary transform: M selected rows of an N-point DFT or
/// Sylvester-Hadamard matrix, each full-transform row scaled to unit norm.
///
/// DFT entry (r, c) is exp(-2*pi*i*r*c/N)/sqrt(N); Hadamard entry (r, c) is
/// (-1)^popcount(r & c)/sqrt(N). Row m of the partial matrix is full row
/// `row_selection()[m]`. Immutable once built; copies share the FFT plans.
class SensingMatrix {
public:
    static SensingMatrix build(TransformKind kind, std::size_t n_cols, std::size_t n_rows,
                               std::uint64_t seed);

    TransformKind kind() const { return kind_; }
    std::size_t n_cols() const { return n_cols_; }
    std::size_t n_rows() const { return row_selection_.size(); }
    std::uint64_t seed() const { return seed_; }
    const std::vector<std::size_t>& row_selection() const { return row_selection_; }

    /// y = S F x, length M.
    CVec forward(std::span<const cplx> x) const;
    /// x = F^H S^T y, length N.
    CVec adjoint(std::span<const cplx> y) const;

    /// Allocation-free variants; `scratch` must hold n_cols() values.
    void forward(std::span<const cplx> x, std::span<cplx> out, std::span<cplx> scratch) const;
    void adjoint(std::span<const cplx> y, std::span<cplx> out) const;

    /// Column `col` of the partial matrix (M entries of magnitude 1/sqrt(N)).
    CVec column(std::size_t col) const;

private:
    struct FftPlans;

    SensingMatrix(TransformKind kind, std::size_t n_cols, std::vector<std::size_t> rows,
                  std::uint64_t seed);

    void transform(std::span<cplx> data, bool inverse) const;

    TransformKind kind_;
    std::size_t n_cols_;
    std::uint64_t seed_;
    std::vector<std::size_t> row_selection_;
    std::shared_ptr<const FftPlans> plans_;
};

}  // namespace usma
