// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xlproject/corpus.hpp"

namespace xlproject::metrics {

using Mask = std::vector<std::uint8_t>;

// Per-word importance values; after normalize_attributions they are
// non-negative and sum to 1.
struct Attributions {
    std::vector<double> values;
};

struct ConfusionMatrix {
    // counts[gold][predicted], indexed by EmotionLabel.
    std::array<std::array<std::size_t, kNumEmotions>, kNumEmotions> counts{};

    std::size_t total() const;
    std::size_t row_sum(EmotionLabel gold) const;
    // Rows divided by their sums; all-zero rows stay zero.
    std::array<std::array<double, kNumEmotions>, kNumEmotions> row_normalized() const;
    std::string to_csv(bool normalized = false) const;
};

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;    // gold count
    std::size_t predicted = 0;  // predicted count
};

// Classes with no gold and no predicted instance are left out of the mean.
double macro_f1(std::span<const EmotionLabel> gold, std::span<const EmotionLabel> pred);
std::array<ClassScores, kNumEmotions> per_class_scores(std::span<const EmotionLabel> gold,
                                                        std::span<const EmotionLabel> pred);

// 2TP / (2TP + FP + FN); 1.0 when both masks are all zero.
double instance_token_f1(std::span<const std::uint8_t> gold, std::span<const std::uint8_t> pred);

// Mean of instance_token_f1.
double corpus_token_f1(std::span<const std::pair<Mask, Mask>> instances);

// Clamps negatives to 0 and rescales to sum 1; all-zero input after clamping
// becomes uniform.
Attributions normalize_attributions(std::span<const double> raw);

// Attribution mass on gold trigger positions.
double accumulated_importance(std::span<const std::uint8_t> gold, const Attributions& attributions);

struct AccumulatedImportance {
    std::optional<double> mean;       // empty when no instance has a trigger
    std::size_t scored = 0;
    std::size_t skipped_no_trigger = 0;
};

// Attributions are normalized before scoring. Instances whose gold mask has
// no trigger are skipped and counted.
AccumulatedImportance corpus_accumulated_importance(
    std::span<const std::pair<Mask, std::vector<double>>> instances);

ConfusionMatrix confusion_matrix(std::span<const EmotionLabel> gold,
                                 std::span<const EmotionLabel> pred);

struct MetricsReport {
    std::optional<double> macro_f1;
    std::optional<double> token_f1;
    std::optional<double> accumulated_importance;
    std::optional<std::array<ClassScores, kNumEmotions>> per_class;
    std::optional<ConfusionMatrix> confusion;
    std::size_t emotion_instances = 0;
    std::size_t token_instances = 0;
    std::size_t skipped_no_trigger = 0;
};

}  // namespace xlproject::metrics
