// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma on x86-64 only;
// selected at runtime when the CPU reports both features. Tail elements
// fall through to the same per-element operations as the scalar table so
// elementwise kernels stay bit-identical across backends.

#if defined(FIDESR_KERNELS_AVX2)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "fidesr/kernels.hpp"

namespace fidesr::kernels {
namespace {

void add_v(const float* a, const float* b, float* dst, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(dst + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub_v(const float* a, const float* b, float* dst, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(dst + i, _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) dst[i] = a[i] - b[i];
}

void mul_v(const float* a, const float* b, float* dst, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(dst + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void scale_v(const float* a, float s, float* dst, std::size_t n) {
    const __m256 vs = _mm256_set1_ps(s);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(dst + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), vs));
    for (; i < n; ++i) dst[i] = a[i] * s;
}

void abs_diff_v(const float* a, const float* b, float* dst, std::size_t n) {
    const __m256 sign_mask = _mm256_set1_ps(-0.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
        _mm256_storeu_ps(dst + i, _mm256_andnot_ps(sign_mask, d));
    }
    for (; i < n; ++i) dst[i] = std::fabs(a[i] - b[i]);
}

void axpy_v(float a, const float* x, float* y, std::size_t n) {
    const __m256 va = _mm256_set1_ps(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 vy = _mm256_loadu_ps(y + i);
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), vy));
    }
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void gated_axpy_v(float a, const float* g, const float* x, float* y, std::size_t n) {
    const __m256 va = _mm256_set1_ps(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 gx = _mm256_mul_ps(_mm256_loadu_ps(g + i), _mm256_loadu_ps(x + i));
        __m256 vy = _mm256_loadu_ps(y + i);
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, gx, vy));
    }
    for (; i < n; ++i) y[i] = std::fma(a, g[i] * x[i], y[i]);
}

void leaky_relu_v(const float* x, float slope, float* dst, std::size_t n) {
    const __m256 vs = _mm256_set1_ps(slope);
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 v = _mm256_loadu_ps(x + i);
        __m256 mask = _mm256_cmp_ps(v, zero, _CMP_GT_OQ);
        _mm256_storeu_ps(dst + i, _mm256_blendv_ps(_mm256_mul_ps(vs, v), v, mask));
    }
    for (; i < n; ++i) dst[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void leaky_relu_grad_v(const float* x, const float* gy, float slope, float* gx,
                       std::size_t n) {
    const __m256 vs = _mm256_set1_ps(slope);
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 vx = _mm256_loadu_ps(x + i);
        __m256 vg = _mm256_loadu_ps(gy + i);
        __m256 mask = _mm256_cmp_ps(vx, zero, _CMP_GT_OQ);
        _mm256_storeu_ps(gx + i, _mm256_blendv_ps(_mm256_mul_ps(vs, vg), vg, mask));
    }
    for (; i < n; ++i) gx[i] = x[i] > 0.0f ? gy[i] : slope * gy[i];
}

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

double sum_v(const float* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 v = _mm256_loadu_ps(x + i);
        acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(v)));
        acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1)));
    }
    double acc = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += static_cast<double>(x[i]);
    return acc;
}

double dot_v(const float* x, const float* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 vx = _mm256_loadu_ps(x + i);
        __m256 vy = _mm256_loadu_ps(y + i);
        acc0 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(vx)),
                               _mm256_cvtps_pd(_mm256_castps256_ps128(vy)), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(vx, 1)),
                               _mm256_cvtps_pd(_mm256_extractf128_ps(vy, 1)), acc1);
    }
    double acc = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc = std::fma(static_cast<double>(x[i]), static_cast<double>(y[i]), acc);
    return acc;
}

double sqdiff_sum_v(const float* a, const float* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
        __m256d d0 = _mm256_cvtps_pd(_mm256_castps256_ps128(d));
        __m256d d1 = _mm256_cvtps_pd(_mm256_extractf128_ps(d, 1));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    double acc = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = static_cast<double>(a[i] - b[i]);
        acc = std::fma(d, d, acc);
    }
    return acc;
}

double weighted_sqdiff_sum_v(const float* w, const float* a, const float* b,
                             std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
        __m256 vw = _mm256_loadu_ps(w + i);
        __m256d d0 = _mm256_cvtps_pd(_mm256_castps256_ps128(d));
        __m256d d1 = _mm256_cvtps_pd(_mm256_extractf128_ps(d, 1));
        __m256d w0 = _mm256_cvtps_pd(_mm256_castps256_ps128(vw));
        __m256d w1 = _mm256_cvtps_pd(_mm256_extractf128_ps(vw, 1));
        acc0 = _mm256_fmadd_pd(w0, _mm256_mul_pd(d0, d0), acc0);
        acc1 = _mm256_fmadd_pd(w1, _mm256_mul_pd(d1, d1), acc1);
    }
    double acc = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = static_cast<double>(a[i] - b[i]);
        acc = std::fma(static_cast<double>(w[i]), d * d, acc);
    }
    return acc;
}

void min_max_v(const float* x, std::size_t n, float* lo, float* hi) {
    float mn = x[0];
    float mx = x[0];
    std::size_t i = 0;
    if (n >= 8) {
        __m256 vmn = _mm256_loadu_ps(x);
        __m256 vmx = vmn;
        for (i = 8; i + 8 <= n; i += 8) {
            __m256 v = _mm256_loadu_ps(x + i);
            vmn = _mm256_min_ps(vmn, v);
            vmx = _mm256_max_ps(vmx, v);
        }
        alignas(32) float tmp[8];
        _mm256_store_ps(tmp, vmn);
        for (float v : tmp) mn = v < mn ? v : mn;
        _mm256_store_ps(tmp, vmx);
        for (float v : tmp) mx = v > mx ? v : mx;
    }
    for (; i < n; ++i) {
        mn = x[i] < mn ? x[i] : mn;
        mx = x[i] > mx ? x[i] : mx;
    }
    *lo = mn;
    *hi = mx;
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable t{
        "avx2",       add_v,        sub_v,
        mul_v,        scale_v,      abs_diff_v,
        axpy_v,       gated_axpy_v, leaky_relu_v,
        leaky_relu_grad_v,          sum_v,
        dot_v,        sqdiff_sum_v, weighted_sqdiff_sum_v,
        min_max_v,
    };
    return t;
}

}  // namespace fidesr::kernels

#endif  // FIDESR_KERNELS_AVX2
