// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "xlproject/kernels.hpp"

namespace xlproject::model {
namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("dimension mismatch: " + what);
}

std::span<const std::uint32_t> idx_of(const FeatureVector& x) { return x.indices; }
std::span<const double> val_of(const FeatureVector& x) { return x.values; }

// logits = W0 x + b (+ scale * B u, u = A x). `u` receives A x when an
// adapter is present.
void forward_into(const LinearModel& model, const LoraAdapter* adapter, const FeatureVector& x,
                  std::span<double> logits, std::vector<double>& u) {
    const std::size_t c = model.classes();
    for (std::size_t k = 0; k < c; ++k) {
        logits[k] = kernels::sparse_dot(model.weight.row(k), idx_of(x), val_of(x)) + model.bias[k];
    }
    if (adapter == nullptr) return;
    const std::size_t r = adapter->rank();
    u.resize(r);
    for (std::size_t j = 0; j < r; ++j) {
        u[j] = kernels::sparse_dot(adapter->a.row(j), idx_of(x), val_of(x));
    }
    const double s = adapter->scale();
    for (std::size_t k = 0; k < c; ++k) logits[k] += s * kernels::dot(adapter->b.row(k), u);
}

double log_sum_exp(std::span<const double> z) {
    const double m = *std::max_element(z.begin(), z.end());
    double acc = 0.0;
    for (double v : z) acc += std::exp(v - m);
    return m + std::log(acc);
}

void scatter_add(std::span<double> dense_row, const FeatureVector& x, double coeff) {
    for (std::size_t i = 0; i < x.nnz(); ++i) dense_row[x.indices[i]] += coeff * x.values[i];
}

}  // namespace

LoraAdapter LoraAdapter::init(std::size_t classes, std::size_t features, std::size_t rank,
                              double alpha, Rng& rng, double stddev) {
    if (rank == 0) throw std::invalid_argument("LoRA rank must be at least 1");
    LoraAdapter ad;
    ad.a = Matrix(rank, features);
    ad.b = Matrix(classes, rank);
    ad.alpha = alpha;
    for (double& v : ad.a.data) v = stddev * rng.normal();
    return ad;
}

void check_dimensions(const LinearModel& model, const LoraAdapter* adapter) {
    require(model.bias.size() == model.classes(), "bias length != classes");
    require(model.weight.data.size() == model.classes() * model.features(), "weight storage");
    if (adapter == nullptr) return;
    require(adapter->rank() >= 1, "LoRA rank must be >= 1");
    require(adapter->a.cols == model.features(), "LoRA A columns != features");
    require(adapter->b.rows == model.classes(), "LoRA B rows != classes");
    require(adapter->b.cols == adapter->rank(), "LoRA B columns != rank");
}

std::vector<double> forward(const LinearModel& model, const LoraAdapter* adapter,
                            const FeatureVector& x) {
    check_dimensions(model, adapter);
    require(x.dim == model.features(), "feature vector dim != model features");
    std::vector<double> logits(model.classes());
    std::vector<double> u;
    forward_into(model, adapter, x, logits, u);
    return logits;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) return out;
    const double m = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

LinearModel merge(const LinearModel& model, const LoraAdapter& adapter) {
    check_dimensions(model, &adapter);
    LinearModel merged = model;
    const double s = adapter.scale();
    for (std::size_t c = 0; c < model.classes(); ++c) {
        for (std::size_t j = 0; j < adapter.rank(); ++j) {
            kernels::axpy(s * adapter.b(c, j), adapter.a.row(j), merged.weight.row(c));
        }
    }
    return merged;
}

Gradients Gradients::zeros_like(const LinearModel& model, const LoraAdapter* adapter) {
    Gradients g;
    g.bias.assign(model.classes(), 0.0);
    if (adapter == nullptr) {
        g.weight = Matrix(model.classes(), model.features());
    } else {
        g.lora_a = Matrix(adapter->a.rows, adapter->a.cols);
        g.lora_b = Matrix(adapter->b.rows, adapter->b.cols);
    }
    return g;
}

void Gradients::set_zero() {
    std::fill(bias.begin(), bias.end(), 0.0);
    for (auto* m : {&weight, &lora_a, &lora_b}) {
        if (*m) std::fill((*m)->data.begin(), (*m)->data.end(), 0.0);
    }
}

double accumulate_loss_and_grads(const LinearModel& model, const LoraAdapter* adapter,
                                 std::span<const Example> batch, Gradients& grads) {
    check_dimensions(model, adapter);
    if (batch.empty()) throw std::invalid_argument("loss_and_grads: empty batch");
    require((adapter == nullptr) == grads.weight.has_value(), "gradient buffer layout");
    grads.set_zero();

    const std::size_t c = model.classes();
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    std::vector<double> logits(c);
    std::vector<double> delta(c);
    std::vector<double> u;
    std::vector<double> bt_delta;
    double total = 0.0;

    for (const auto& ex : batch) {
        const FeatureVector& x = *ex.features;
        require(x.dim == model.features(), "feature vector dim != model features");
        if (ex.label >= c) throw std::out_of_range("label out of range");

        forward_into(model, adapter, x, logits, u);
        const double lse = log_sum_exp(logits);
        total += lse - logits[ex.label];
        for (std::size_t k = 0; k < c; ++k) {
            delta[k] = (std::exp(logits[k] - lse) - (k == ex.label ? 1.0 : 0.0)) * inv_n;
            grads.bias[k] += delta[k];
        }

        if (adapter == nullptr) {
            for (std::size_t k = 0; k < c; ++k) scatter_add(grads.weight->row(k), x, delta[k]);
            continue;
        }
        const double s = adapter->scale();
        const std::size_t r = adapter->rank();
        for (std::size_t k = 0; k < c; ++k) kernels::axpy(s * delta[k], u, grads.lora_b->row(k));
        bt_delta.assign(r, 0.0);
        for (std::size_t k = 0; k < c; ++k) kernels::axpy(s * delta[k], adapter->b.row(k), bt_delta);
        for (std::size_t j = 0; j < r; ++j) {
            if (bt_delta[j] != 0.0) scatter_add(grads.lora_a->row(j), x, bt_delta[j]);
        }
    }
    return total * inv_n;
}

LossAndGrads loss_and_grads(const LinearModel& model, const LoraAdapter* adapter,
                            std::span<const Example> batch) {
    Gradients g = Gradients::zeros_like(model, adapter);
    const double l = accumulate_loss_and_grads(model, adapter, batch, g);
    return {l, std::move(g)};
}

double loss(const LinearModel& model, const LoraAdapter* adapter, std::span<const Example> batch) {
    check_dimensions(model, adapter);
    if (batch.empty()) throw std::invalid_argument("loss: empty batch");
    std::vector<double> logits(model.classes());
    std::vector<double> u;
    double total = 0.0;
    for (const auto& ex : batch) {
        require(ex.features->dim == model.features(), "feature vector dim != model features");
        forward_into(model, adapter, *ex.features, logits, u);
        total += log_sum_exp(logits) - logits[ex.label];
    }
    return total / static_cast<double>(batch.size());
}

}  // namespace xlproject::model
