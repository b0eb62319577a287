// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace xlproject::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* best_available() {
    if (const KernelTable* t = avx2_table()) return t;
    if (const KernelTable* t = neon_table()) return t;
    return &scalar_table();
}

const KernelTable* by_name(std::string_view name) {
    if (name == "scalar") return &scalar_table();
    if (name == "avx2") return avx2_table();
    if (name == "neon") return neon_table();
    if (name == "auto" || name.empty()) return best_available();
    return nullptr;
}

const KernelTable* initial_table() {
    if (const char* env = std::getenv("XLPROJECT_KERNELS")) {
        if (const KernelTable* t = by_name(env)) return t;
    }
    return best_available();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable* t = cpu_has_avx2() ? detail::avx2_table_if_built() : nullptr;
    return t;
}

const KernelTable* neon_table() { return detail::neon_table_if_built(); }

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
    const KernelTable* t = by_name(name);
    if (t == nullptr) return false;
    current().store(t, std::memory_order_release);
    return true;
}

namespace {
void require_same(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": length mismatch");
}
}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    require_same(a.size(), b.size(), "dot");
    return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same(x.size(), y.size(), "axpy");
    active().axpy(alpha, x.data(), y.data(), x.size());
}

double sparse_dot(std::span<const double> dense, std::span<const std::uint32_t> idx,
                  std::span<const double> val) {
    require_same(idx.size(), val.size(), "sparse_dot");
    return active().sparse_dot(dense.data(), idx.data(), val.data(), idx.size());
}

void adamw_update(const AdamWCoefficients& c, std::span<double> params,
                  std::span<const double> grads, std::span<double> m,
                  std::span<double> v) {
    require_same(params.size(), grads.size(), "adamw_update");
    require_same(params.size(), m.size(), "adamw_update");
    require_same(params.size(), v.size(), "adamw_update");
    active().adamw_update(c, params.data(), grads.data(), m.data(), v.data(), params.size());
}

bool all_finite(std::span<const double> x) { return active().all_finite(x.data(), x.size()); }

}  // namespace xlproject::kernels
