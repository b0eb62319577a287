// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xlproject/corpus.hpp"
#include "xlproject/features.hpp"
#include "xlproject/linear.hpp"

namespace xlproject::model {

enum class Task { Emotion, Trigger };
enum class Schedule { Constant, LinearDecay };

std::string_view to_string(Task task);
std::optional<Task> parse_task(std::string_view text);
std::string_view to_string(Schedule schedule);
std::optional<Schedule> parse_schedule(std::string_view text);

inline constexpr double kAllowedLearningRates[] = {2e-6, 2e-5, 5e-5, 2e-4};
inline constexpr std::size_t kMaxEpochs = 30;
inline constexpr std::size_t kMaxAdapterEpochs = 5;

std::size_t num_classes(Task task);

struct LoraConfig {
    std::size_t r = 64;
    double alpha = 16.0;
    double init_stddev = 0.01;  // A ~ N(0, init_stddev^2)
    bool operator==(const LoraConfig&) const = default;
};

struct TrainConfig {
    double lr = 2e-4;
    std::size_t batch_size = 16;  // sentences per step
    std::size_t epochs = 30;
    std::optional<LoraConfig> lora;
    std::uint64_t seed = 42;
    Schedule schedule = Schedule::LinearDecay;
    double weight_decay = 0.0;
    FeatureConfig features;

    // Throws ConfigError.
    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct EpochReport {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    std::optional<double> validation_metric;
};

struct TrainedModel {
    Task task = Task::Emotion;
    TrainConfig config;
    LinearModel base;
    std::optional<LoraAdapter> adapter;
    std::vector<EpochReport> history;
    std::size_t best_epoch = 0;
    std::map<std::string, std::string> provenance;

    // Base weights with the adapter folded in.
    LinearModel effective() const;
};

// Deterministic for a fixed config. With a validation corpus the parameters
// of the epoch with the best validation metric are returned (macro F1 for
// emotion, mean token F1 for triggers; ties keep the earlier epoch) and
// training stops once the metric reaches 1. Without one, the last epoch wins.
// `base` supplies W0 and b; otherwise both start at zero. Throws CorpusError
// on an empty corpus or missing labels, ConfigError on a bad config.
TrainedModel train(const Corpus& corpus, Task task, const TrainConfig& config,
                   const Corpus* validation = nullptr, const LinearModel* base = nullptr);

struct SentencePrediction {
    std::optional<EmotionLabel> emotion;
    std::optional<std::vector<std::uint8_t>> mask;
    std::vector<double> numeric;  // trigger task only
};

class Predictor {
  public:
    explicit Predictor(const TrainedModel& model);
    SentencePrediction predict(const std::vector<std::string>& tokens) const;

  private:
    Task task_;
    FeatureConfig features_;
    LinearModel merged_;
};

// Copies `corpus` with the predicted field (emotion or trigger_mask)
// replaced. `numeric`, when given, receives one attribution vector per
// sentence for the trigger task.
Corpus predict_corpus(const TrainedModel& model, const Corpus& corpus,
                      std::vector<std::vector<double>>* numeric = nullptr);

// Validation metric used for model selection.
double evaluate_task(const TrainedModel& model, const Corpus& corpus);

}  // namespace xlproject::model
