// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Dense and sparse arithmetic kernels used by the classifier. Each entry has
// a scalar reference version and, where the target supports it, an AVX2 or
// NEON version. The active table is chosen once at startup from the CPU
// features and can be pinned with XLPROJECT_KERNELS={scalar,avx2,neon}.
//
// Element-wise kernels (adamw_update, all_finite) produce bit-identical
// results across variants. Reductions (dot, sparse_dot) differ only in
// summation order.

namespace xlproject::kernels {

struct AdamWCoefficients {
    double lr = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;
    double bias_correction1 = 1.0;  // 1 - beta1^t
    double bias_correction2 = 1.0;  // 1 - beta2^t
};

struct KernelTable {
    const char* name;

    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    double (*sparse_dot)(const double* dense, const std::uint32_t* idx,
                         const double* val, std::size_t nnz);
    void (*adamw_update)(const AdamWCoefficients& c, double* params,
                         const double* grads, double* m, double* v,
                         std::size_t n);
    bool (*all_finite)(const double* x, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_table();
const KernelTable* neon_table();

const KernelTable& active();

// Pins the active table by name ("scalar", "avx2", "neon", "auto").
// Returns false if the requested variant is unavailable; the active table
// is left unchanged in that case.
bool select(std::string_view name);

// Thin span wrappers over active().

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sparse_dot(std::span<const double> dense,
                  std::span<const std::uint32_t> idx,
                  std::span<const double> val);
void adamw_update(const AdamWCoefficients& c, std::span<double> params,
                  std::span<const double> grads, std::span<double> m,
                  std::span<double> v);
bool all_finite(std::span<const double> x);

}  // namespace xlproject::kernels
