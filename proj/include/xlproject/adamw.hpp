// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace xlproject::model {

class NonFiniteGradientError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct AdamWOptions {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;
};

// One trainable tensor and its gradient, viewed flat.
struct ParamSlot {
    std::span<double> params;
    std::span<const double> grads;
};

// AdamW with decoupled weight decay:
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
//   theta <- theta - lr (m_hat / (sqrt(v_hat) + eps) + wd theta)
// Moments are allocated on the first step; the slot layout must not change
// afterwards.
class AdamW {
  public:
    explicit AdamW(AdamWOptions options = {}) : options_(options) {}

    // Throws NonFiniteGradientError before touching any parameter if a
    // gradient is NaN or infinite.
    void step(std::span<const ParamSlot> slots, double lr);

    const AdamWOptions& options() const { return options_; }
    std::uint64_t steps() const { return step_; }
    const std::vector<std::vector<double>>& first_moments() const { return m_; }
    const std::vector<std::vector<double>>& second_moments() const { return v_; }

  private:
    AdamWOptions options_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::uint64_t step_ = 0;
};

}  // namespace xlproject::model
