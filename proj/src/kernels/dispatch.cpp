#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace usma::kernels {

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar", detail::fwht_scalar, detail::accumulate_real_scalar,
                                   detail::ese_accumulate_scalar, detail::ese_extrinsic_scalar};
    return table;
}

const KernelTable* avx2_table() {
#if defined(USMA_HAVE_AVX2)
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    static const KernelTable table{"avx2", detail::fwht_avx2, detail::accumulate_real_avx2,
                                   detail::ese_accumulate_avx2, detail::ese_extrinsic_avx2};
    return supported ? &table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& kernels() {
    static const KernelTable& selected = []() -> const KernelTable& {
        const char* forced = std::getenv("USMA_SIMD");
        if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
        if (const auto* t = avx2_table()) return *t;
        return scalar_table();
    }();
    return selected;
}

}  // namespace usma::kernels
