// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_internal.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>

namespace xlproject::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sparse_dot_neon(const double* dense, const std::uint32_t* idx,
                       const double* val, std::size_t nnz) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= nnz; i += 2) {
        const double g[2] = {dense[idx[i]], dense[idx[i + 1]]};
        acc = vfmaq_f64(acc, vld1q_f64(g), vld1q_f64(val + i));
    }
    double out = vaddvq_f64(acc);
    for (; i < nnz; ++i) out += dense[idx[i]] * val[i];
    return out;
}

void adamw_update_neon(const AdamWCoefficients& c, double* params,
                       const double* grads, double* m, double* v,
                       std::size_t n) {
    const double omb1 = 1.0 - c.beta1;
    const double omb2 = 1.0 - c.beta2;
    const float64x2_t b1 = vdupq_n_f64(c.beta1);
    const float64x2_t b2 = vdupq_n_f64(c.beta2);
    const float64x2_t o1 = vdupq_n_f64(omb1);
    const float64x2_t o2 = vdupq_n_f64(omb2);
    const float64x2_t bc1 = vdupq_n_f64(c.bias_correction1);
    const float64x2_t bc2 = vdupq_n_f64(c.bias_correction2);
    const float64x2_t eps = vdupq_n_f64(c.epsilon);
    const float64x2_t lr = vdupq_n_f64(c.lr);
    const float64x2_t wd = vdupq_n_f64(c.weight_decay);

    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t g = vld1q_f64(grads + i);
        const float64x2_t mi = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(o1, g));
        const float64x2_t vi =
            vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(vmulq_f64(o2, g), g));
        vst1q_f64(m + i, mi);
        vst1q_f64(v + i, vi);
        const float64x2_t step =
            vdivq_f64(vdivq_f64(mi, bc1), vaddq_f64(vsqrtq_f64(vdivq_f64(vi, bc2)), eps));
        const float64x2_t p = vld1q_f64(params + i);
        vst1q_f64(params + i,
                  vsubq_f64(p, vmulq_f64(lr, vaddq_f64(step, vmulq_f64(wd, p)))));
    }
    for (; i < n; ++i) {
        const double g = grads[i];
        const double mi = c.beta1 * m[i] + omb1 * g;
        const double vi = c.beta2 * v[i] + omb2 * g * g;
        m[i] = mi;
        v[i] = vi;
        const double step = (mi / c.bias_correction1) /
                            (std::sqrt(vi / c.bias_correction2) + c.epsilon);
        params[i] = params[i] - c.lr * (step + c.weight_decay * params[i]);
    }
}

bool all_finite_neon(const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

constexpr KernelTable kNeon{
    "neon",          dot_neon,          axpy_neon,
    sparse_dot_neon, adamw_update_neon, all_finite_neon,
};

}  // namespace

namespace detail {
const KernelTable* neon_table_if_built() { return &kNeon; }
}  // namespace detail

}  // namespace xlproject::kernels

#else

namespace xlproject::kernels::detail {
const KernelTable* neon_table_if_built() { return nullptr; }
}  // namespace xlproject::kernels::detail

#endif
