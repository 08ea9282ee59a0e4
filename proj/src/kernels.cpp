// Runtime backend selection for the kernel table.

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "fidesr/error.hpp"
#include "fidesr/kernels.hpp"

namespace fidesr::kernels {

const KernelTable& scalar_table();
#if defined(FIDESR_KERNELS_AVX2)
const KernelTable& avx2_table();
#endif

namespace {

bool avx2_available() {
#if defined(FIDESR_KERNELS_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend pick_default() {
    if (const char* env = std::getenv("FIDESR_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Backend::avx2;
    }
    return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& active_slot() {
    static std::atomic<Backend> slot{pick_default()};
    return slot;
}

}  // namespace

const KernelTable* table_for(Backend backend) {
    switch (backend) {
        case Backend::scalar:
            return &scalar_table();
        case Backend::avx2:
#if defined(FIDESR_KERNELS_AVX2)
            if (avx2_available()) return &avx2_table();
#endif
            return nullptr;
    }
    return nullptr;
}

const KernelTable& table() {
    return *table_for(active_slot().load(std::memory_order_relaxed));
}

void force_backend(Backend backend) {
    if (table_for(backend) == nullptr)
        throw ParamError("kernel backend unavailable on this host");
    active_slot().store(backend, std::memory_order_relaxed);
}

Backend active_backend() { return active_slot().load(std::memory_order_relaxed); }

}  // namespace fidesr::kernels
