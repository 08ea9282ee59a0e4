// Scalar reference kernels. These define the semantics the SIMD variants
// must reproduce: elementwise ops round in float per element, reductions
// accumulate in double.

#include <cmath>
#include <cstddef>

#include "fidesr/kernels.hpp"

namespace fidesr::kernels {
namespace {

void add_s(const float* a, const float* b, float* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub_s(const float* a, const float* b, float* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] - b[i];
}

void mul_s(const float* a, const float* b, float* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void scale_s(const float* a, float s, float* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * s;
}

void abs_diff_s(const float* a, const float* b, float* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = std::fabs(a[i] - b[i]);
}

void axpy_s(float a, const float* x, float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void gated_axpy_s(float a, const float* g, const float* x, float* y, std::size_t n) {
    // g*x rounds first, then a single fma; matches the vector sequence.
    for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, g[i] * x[i], y[i]);
}

void leaky_relu_s(const float* x, float slope, float* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void leaky_relu_grad_s(const float* x, const float* gy, float slope, float* gx,
                       std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) gx[i] = x[i] > 0.0f ? gy[i] : slope * gy[i];
}

double sum_s(const float* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(x[i]);
    return acc;
}

double dot_s(const float* x, const float* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc = std::fma(static_cast<double>(x[i]), static_cast<double>(y[i]), acc);
    return acc;
}

double sqdiff_sum_s(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(a[i] - b[i]);  // float subtract, then widen
        acc = std::fma(d, d, acc);
    }
    return acc;
}

double weighted_sqdiff_sum_s(const float* w, const float* a, const float* b,
                             std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(a[i] - b[i]);
        acc = std::fma(static_cast<double>(w[i]), d * d, acc);
    }
    return acc;
}

void min_max_s(const float* x, std::size_t n, float* lo, float* hi) {
    float mn = x[0];
    float mx = x[0];
    for (std::size_t i = 1; i < n; ++i) {
        mn = x[i] < mn ? x[i] : mn;
        mx = x[i] > mx ? x[i] : mx;
    }
    *lo = mn;
    *hi = mx;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{
        "scalar",     add_s,        sub_s,
        mul_s,        scale_s,      abs_diff_s,
        axpy_s,       gated_axpy_s, leaky_relu_s,
        leaky_relu_grad_s,          sum_s,
        dot_s,        sqdiff_sum_s, weighted_sqdiff_sum_s,
        min_max_s,
    };
    return t;
}

}  // namespace fidesr::kernels
