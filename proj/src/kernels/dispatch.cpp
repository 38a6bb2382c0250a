#include <atomic>
#include <cstdlib>
#include <string_view>

#include "ioperiod/kernels.hpp"

namespace ioperiod::kernels {

#ifdef IOPERIOD_BUILD_AVX2
const KernelTable& avx2_kernels() noexcept;
#endif

const KernelTable* avx2_table() noexcept {
#ifdef IOPERIOD_BUILD_AVX2
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2_kernels() : nullptr;
#else
    return nullptr;
#endif
}

namespace {

const KernelTable* select_default() noexcept {
    if (const char* env = std::getenv("IOPERIOD_SIMD"); env && std::string_view(env) == "scalar")
        return &scalar_table();
    if (const auto* t = avx2_table()) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
    static std::atomic<const KernelTable*> table{select_default()};
    return table;
}

}  // namespace

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

void set_active(const KernelTable& table) noexcept { current().store(&table, std::memory_order_release); }

}  // namespace ioperiod::kernels
