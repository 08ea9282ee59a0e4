#ifndef FIDESR_KERNELS_HPP
#define FIDESR_KERNELS_HPP

#include <cstddef>

namespace fidesr::kernels {

// Inner-loop primitives behind the tensor math. Each entry has a scalar
// reference implementation and, on x86-64 with AVX2+FMA, a vector variant.
// The active table is chosen once at startup from CPU features (override
// with force_backend() or the FIDESR_KERNELS env var). Reductions
// accumulate in double regardless of backend; elementwise ops round in
// float exactly where the vector path does, so scalar and SIMD results
// agree bit for bit on elementwise kernels.
struct KernelTable {
    const char* name;

    void (*add)(const float* a, const float* b, float* dst, std::size_t n);
    void (*sub)(const float* a, const float* b, float* dst, std::size_t n);
    void (*mul)(const float* a, const float* b, float* dst, std::size_t n);
    void (*scale)(const float* a, float s, float* dst, std::size_t n);
    void (*abs_diff)(const float* a, const float* b, float* dst, std::size_t n);

    // y += a * x
    void (*axpy)(float a, const float* x, float* y, std::size_t n);
    // y += a * (g .* x)
    void (*gated_axpy)(float a, const float* g, const float* x, float* y, std::size_t n);

    void (*leaky_relu)(const float* x, float slope, float* dst, std::size_t n);
    // gx = x > 0 ? gy : slope * gy
    void (*leaky_relu_grad)(const float* x, const float* gy, float slope, float* gx,
                            std::size_t n);

    double (*sum)(const float* x, std::size_t n);
    double (*dot)(const float* x, const float* y, std::size_t n);
    double (*sqdiff_sum)(const float* a, const float* b, std::size_t n);
    // sum of w[i] * (a[i] - b[i])^2
    double (*weighted_sqdiff_sum)(const float* w, const float* a, const float* b,
                                  std::size_t n);

    void (*min_max)(const float* x, std::size_t n, float* lo, float* hi);
};

enum class Backend { scalar, avx2 };

/// Active kernel table.
const KernelTable& table();

/// Table for a specific backend, or nullptr when unavailable on this host.
const KernelTable* table_for(Backend backend);

/// Pins the active backend. Throws ParamError when unavailable.
void force_backend(Backend backend);

Backend active_backend();

}  // namespace fidesr::kernels

#endif
