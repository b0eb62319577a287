// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "xlproject/kernels.hpp"

namespace xlproject::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sparse_dot_scalar(const double* dense, const std::uint32_t* idx,
                         const double* val, std::size_t nnz) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nnz; ++i) acc += dense[idx[i]] * val[i];
    return acc;
}

// The operation order here is the reference the SIMD variants reproduce
// exactly. Build with -ffp-contract=off so no FMA is introduced.
void adamw_update_scalar(const AdamWCoefficients& c, double* params,
                         const double* grads, double* m, double* v,
                         std::size_t n) {
    const double omb1 = 1.0 - c.beta1;
    const double omb2 = 1.0 - c.beta2;
    for (std::size_t i = 0; i < n; ++i) {
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

bool all_finite_scalar(const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

constexpr KernelTable kScalar{
    "scalar",          dot_scalar,          axpy_scalar,
    sparse_dot_scalar, adamw_update_scalar, all_finite_scalar,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace xlproject::kernels
