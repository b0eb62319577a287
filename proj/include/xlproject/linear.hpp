// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "xlproject/features.hpp"
#include "xlproject/random.hpp"

namespace xlproject::model {

// Row-major dense matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool operator==(const Matrix&) const = default;
};

// Linear classification head: logits = W0 x + b, with W0 of shape C x F.
struct LinearModel {
    Matrix weight;
    std::vector<double> bias;

    LinearModel() = default;
    LinearModel(std::size_t classes, std::size_t features)
        : weight(classes, features), bias(classes, 0.0) {}

    std::size_t classes() const { return weight.rows; }
    std::size_t features() const { return weight.cols; }
    bool operator==(const LinearModel&) const = default;
};

// Low-rank update of the head's weight: W = W0 + (alpha / r) B A, with
// A of shape r x F and B of shape C x r.
struct LoraAdapter {
    Matrix a;
    Matrix b;
    double alpha = 16.0;

    std::size_t rank() const { return a.rows; }
    double scale() const { return alpha / static_cast<double>(rank()); }

    // A ~ N(0, stddev^2), B = 0, so the adapted head starts out identical to
    // the base head.
    static LoraAdapter init(std::size_t classes, std::size_t features, std::size_t rank,
                            double alpha, Rng& rng, double stddev);

    bool operator==(const LoraAdapter&) const = default;
};

// Throws std::invalid_argument on any dimension mismatch.
void check_dimensions(const LinearModel& model, const LoraAdapter* adapter);

std::vector<double> forward(const LinearModel& model, const LoraAdapter* adapter,
                            const FeatureVector& x);

// Numerically stable (max-subtracted) softmax.
std::vector<double> softmax(std::span<const double> logits);

// W0 + (alpha / r) B A, bias unchanged.
LinearModel merge(const LinearModel& model, const LoraAdapter& adapter);

struct Example {
    const FeatureVector* features;
    std::size_t label;
};

// Gradients of the trainable parameters. With an adapter the frozen W0 has
// no gradient (weight is empty) and lora_a / lora_b are set; without one,
// weight is set and the LoRA fields are empty.
struct Gradients {
    std::optional<Matrix> weight;
    std::vector<double> bias;
    std::optional<Matrix> lora_a;
    std::optional<Matrix> lora_b;

    static Gradients zeros_like(const LinearModel& model, const LoraAdapter* adapter);
    void set_zero();
};

// Mean cross-entropy over the batch. Gradients are written into `grads`,
// which must come from Gradients::zeros_like for the same model/adapter;
// it is zeroed first.
double accumulate_loss_and_grads(const LinearModel& model, const LoraAdapter* adapter,
                                 std::span<const Example> batch, Gradients& grads);

struct LossAndGrads {
    double loss;
    Gradients grads;
};

LossAndGrads loss_and_grads(const LinearModel& model, const LoraAdapter* adapter,
                            std::span<const Example> batch);

// Mean cross-entropy only.
double loss(const LinearModel& model, const LoraAdapter* adapter, std::span<const Example> batch);

}  // namespace xlproject::model
