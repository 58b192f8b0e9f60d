#include "usma/sensing_matrix.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include "usma/kernels.hpp"
#include "usma/rng.hpp"

namespace usma {

namespace {

// FFTW's planner is not thread-safe; execution on caller arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct SensingMatrix::FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit FftPlans(std::size_t n) {
        std::lock_guard lock(planner_mutex());
        CVec buffer(n);
        const int len = static_cast<int>(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward = fftw_plan_dft_1d(len, as_fftw(buffer.data()), as_fftw(buffer.data()), FFTW_FORWARD, flags);
        backward = fftw_plan_dft_1d(len, as_fftw(buffer.data()), as_fftw(buffer.data()), FFTW_BACKWARD, flags);
        if (forward == nullptr || backward == nullptr) throw ConfigError("FFTW planning failed");
    }
    ~FftPlans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
};

const char* to_string(TransformKind kind) {
    return kind == TransformKind::PartialDft ? "dft" : "hadamard";
}

SensingMatrix::SensingMatrix(TransformKind kind, std::size_t n_cols, std::vector<std::size_t> rows,
                             std::uint64_t seed)
    : kind_(kind), n_cols_(n_cols), seed_(seed), row_selection_(std::move(rows)) {
    if (kind_ == TransformKind::PartialDft) plans_ = std::make_shared<const FftPlans>(n_cols_);
}

SensingMatrix SensingMatrix::build(TransformKind kind, std::size_t n_cols, std::size_t n_rows,
                                   std::uint64_t seed) {
    if (n_cols == 0 || n_rows == 0) throw ConfigError("sensing matrix dimensions must be positive");
    if (n_rows > n_cols) {
        throw ConfigError("sensing matrix: n_rows (" + std::to_string(n_rows) + ") exceeds n_cols (" +
                          std::to_string(n_cols) + ")");
    }
    if (kind == TransformKind::PartialHadamard && !std::has_single_bit(n_cols)) {
        throw ConfigError("Hadamard sensing matrix requires a power-of-two column count");
    }

    // Partial Fisher-Yates: the first M slots are a uniform draw without
    // replacement, in uniformly random order.
    std::vector<std::size_t> pool(n_cols);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    Rng rng = make_rng(seed, Stream::MatrixSelection);
    for (std::size_t i = 0; i < n_rows; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n_cols - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(n_rows);
    return SensingMatrix(kind, n_cols, std::move(pool), seed);
}

void SensingMatrix::transform(std::span<cplx> data, bool inverse) const {
    if (kind_ == TransformKind::PartialHadamard) {
        kernels::kernels().fwht(data.data(), data.size());
    } else {
        fftw_execute_dft(inverse ? plans_->backward : plans_->forward, as_fftw(data.data()),
                         as_fftw(data.data()));
    }
}

void SensingMatrix::forward(std::span<const cplx> x, std::span<cplx> out, std::span<cplx> scratch) const {
    require_length(x.size(), n_cols_, "SensingMatrix::forward input");
    require_length(out.size(), n_rows(), "SensingMatrix::forward output");
    require_length(scratch.size(), n_cols_, "SensingMatrix::forward scratch");
    std::copy(x.begin(), x.end(), scratch.begin());
    transform(scratch, false);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_cols_));
    for (std::size_t m = 0; m < row_selection_.size(); ++m) out[m] = scratch[row_selection_[m]] * norm;
}

void SensingMatrix::adjoint(std::span<const cplx> y, std::span<cplx> out) const {
    require_length(y.size(), n_rows(), "SensingMatrix::adjoint input");
    require_length(out.size(), n_cols_, "SensingMatrix::adjoint output");
    std::fill(out.begin(), out.end(), cplx{});
    for (std::size_t m = 0; m < row_selection_.size(); ++m) out[row_selection_[m]] = y[m];
    transform(out, true);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_cols_));
    for (auto& v : out) v *= norm;
}

CVec SensingMatrix::forward(std::span<const cplx> x) const {
    CVec out(n_rows());
    CVec scratch(n_cols_);
    forward(x, out, scratch);
    return out;
}

CVec SensingMatrix::adjoint(std::span<const cplx> y) const {
    CVec out(n_cols_);
    adjoint(y, out);
    return out;
}

CVec SensingMatrix::column(std::size_t col) const {
    if (col >= n_cols_) throw ConfigError("column index out of range");
    CVec out(n_rows());
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_cols_));
    for (std::size_t m = 0; m < row_selection_.size(); ++m) {
        const std::size_t row = row_selection_[m];
        if (kind_ == TransformKind::PartialHadamard) {
            out[m] = (std::popcount(row & col) & 1U) ? -norm : norm;
        } else {
            // Reduce r*c mod N in integers so the phase stays exact for large N.
            const auto k = static_cast<double>((static_cast<unsigned __int128>(row) * col) % n_cols_);
            const double phase = -2.0 * std::numbers::pi * k / static_cast<double>(n_cols_);
            out[m] = std::polar(norm, phase);
        }
    }
    return out;
}

}  // namespace usma
