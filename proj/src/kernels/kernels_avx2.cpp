// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.

#include "kernels_internal.hpp"

#if defined(XLPROJECT_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace xlproject::kernels {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // mul then add, no FMA: keeps axpy bit-identical to the scalar path
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sparse_dot_avx2(const double* dense, const std::uint32_t* idx,
                       const double* val, std::size_t nnz) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= nnz; i += 4) {
        const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
        const __m256d g = _mm256_i32gather_pd(dense, vi, 8);
        acc = _mm256_fmadd_pd(g, _mm256_loadu_pd(val + i), acc);
    }
    double out = hsum(acc);
    for (; i < nnz; ++i) out += dense[idx[i]] * val[i];
    return out;
}

void adamw_update_avx2(const AdamWCoefficients& c, double* params,
                       const double* grads, double* m, double* v,
                       std::size_t n) {
    const double omb1 = 1.0 - c.beta1;
    const double omb2 = 1.0 - c.beta2;
    const __m256d b1 = _mm256_set1_pd(c.beta1);
    const __m256d b2 = _mm256_set1_pd(c.beta2);
    const __m256d o1 = _mm256_set1_pd(omb1);
    const __m256d o2 = _mm256_set1_pd(omb2);
    const __m256d bc1 = _mm256_set1_pd(c.bias_correction1);
    const __m256d bc2 = _mm256_set1_pd(c.bias_correction2);
    const __m256d eps = _mm256_set1_pd(c.epsilon);
    const __m256d lr = _mm256_set1_pd(c.lr);
    const __m256d wd = _mm256_set1_pd(c.weight_decay);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d g = _mm256_loadu_pd(grads + i);
        const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                                         _mm256_mul_pd(o1, g));
        const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                         _mm256_mul_pd(_mm256_mul_pd(o2, g), g));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        const __m256d m_hat = _mm256_div_pd(mi, bc1);
        const __m256d v_hat = _mm256_div_pd(vi, bc2);
        const __m256d step = _mm256_div_pd(m_hat, _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps));
        const __m256d p = _mm256_loadu_pd(params + i);
        const __m256d upd = _mm256_mul_pd(lr, _mm256_add_pd(step, _mm256_mul_pd(wd, p)));
        _mm256_storeu_pd(params + i, _mm256_sub_pd(p, upd));
    }
    for (; i < n; ++i) {
        const double g = grads[i];
        const double mi = c.beta1 * m[i] + omb1 * g;
        const double vi = c.beta2 * v[i] + omb2 * g * g;
        m[i] = mi;
        v[i] = vi;
        const double m_hat = mi / c.bias_correction1;
        const double v_hat = vi / c.bias_correction2;
        const double step = m_hat / (std::sqrt(v_hat) + c.epsilon);
        params[i] = params[i] - c.lr * (step + c.weight_decay * params[i]);
    }
}

bool all_finite_avx2(const double* x, std::size_t n) {
    // x - x is 0 for finite x and NaN for inf/NaN.
    __m256d bad = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(x + i);
        bad = _mm256_or_pd(bad, _mm256_cmp_pd(_mm256_sub_pd(a, a), _mm256_setzero_pd(),
                                              _CMP_NEQ_UQ));
    }
    if (_mm256_movemask_pd(bad) != 0) return false;
    for (; i < n; ++i) {
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

constexpr KernelTable kAvx2{
    "avx2",          dot_avx2,          axpy_avx2,
    sparse_dot_avx2, adamw_update_avx2, all_finite_avx2,
};

}  // namespace

namespace detail {
const KernelTable* avx2_table_if_built() { return &kAvx2; }
}  // namespace detail

}  // namespace xlproject::kernels

#else

namespace xlproject::kernels::detail {
const KernelTable* avx2_table_if_built() { return nullptr; }
}  // namespace xlproject::kernels::detail

#endif
