// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/adamw.hpp"

#include <cmath>

#include "xlproject/kernels.hpp"

namespace xlproject::model {

void AdamW::step(std::span<const ParamSlot> slots, double lr) {
    if (m_.empty()) {
        for (const auto& s : slots) {
            m_.emplace_back(s.params.size(), 0.0);
            v_.emplace_back(s.params.size(), 0.0);
        }
    }
    if (slots.size() != m_.size()) throw std::invalid_argument("AdamW: parameter layout changed");
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].params.size() != m_[i].size() || slots[i].grads.size() != m_[i].size()) {
            throw std::invalid_argument("AdamW: parameter shape changed");
        }
        if (!kernels::all_finite(slots[i].grads)) {
            throw NonFiniteGradientError("non-finite gradient in parameter group " + std::to_string(i));
        }
    }

    ++step_;
    const auto t = static_cast<double>(step_);
    kernels::AdamWCoefficients c;
    c.lr = lr;
    c.beta1 = options_.beta1;
    c.beta2 = options_.beta2;
    c.epsilon = options_.epsilon;
    c.weight_decay = options_.weight_decay;
    c.bias_correction1 = 1.0 - std::pow(options_.beta1, t);
    c.bias_correction2 = 1.0 - std::pow(options_.beta2, t);
    for (std::size_t i = 0; i < slots.size(); ++i) {
        kernels::adamw_update(c, slots[i].params, slots[i].grads, m_[i], v_[i]);
    }
}

}  // namespace xlproject::model
