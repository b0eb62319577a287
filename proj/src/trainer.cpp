// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "xlproject/adamw.hpp"
#include "xlproject/errors.hpp"
#include "xlproject/heads.hpp"
#include "xlproject/metrics.hpp"
#include "xlproject/random.hpp"

namespace xlproject::model {
namespace {

void require_labels(const Corpus& corpus, Task task) {
    std::string missing;
    std::size_t count = 0;
    for (const auto& s : corpus.sentences) {
        const bool ok = task == Task::Emotion ? s.emotion.has_value() : s.trigger_mask.has_value();
        if (ok) continue;
        if (count < 10) missing += (count ? ", " : "") + s.id;
        ++count;
    }
    if (count) {
        throw CorpusError(std::to_string(count) + " sentence(s) lack a " +
                          (task == Task::Emotion ? "emotion label" : "trigger mask") + ": " +
                          missing + (count > 10 ? ", ..." : ""));
    }
}

struct SentenceExamples {
    std::vector<FeatureVector> features;
    std::vector<std::size_t> labels;
};

SentenceExamples featurize(const AnnotatedSentence& s, Task task, const FeatureConfig& fc) {
    SentenceExamples out;
    if (task == Task::Emotion) {
        out.features.push_back(featurize_sentence(s.tokens, fc));
        out.labels.push_back(static_cast<std::size_t>(*s.emotion));
    } else {
        out.features = featurize_tokens(s.tokens, fc);
        for (auto m : *s.trigger_mask) out.labels.push_back(m ? 1 : 0);
    }
    return out;
}

}  // namespace

std::string_view to_string(Task task) { return task == Task::Emotion ? "emotion" : "trigger"; }

std::optional<Task> parse_task(std::string_view text) {
    if (text == "emotion") return Task::Emotion;
    if (text == "trigger") return Task::Trigger;
    return std::nullopt;
}

std::string_view to_string(Schedule schedule) {
    return schedule == Schedule::Constant ? "constant" : "linear";
}

std::optional<Schedule> parse_schedule(std::string_view text) {
    if (text == "constant") return Schedule::Constant;
    if (text == "linear") return Schedule::LinearDecay;
    return std::nullopt;
}

std::size_t num_classes(Task task) { return task == Task::Emotion ? kNumEmotions : 2; }

void TrainConfig::validate() const {
    if (std::find(std::begin(kAllowedLearningRates), std::end(kAllowedLearningRates), lr) ==
        std::end(kAllowedLearningRates)) {
        throw ConfigError("learning rate " + std::to_string(lr) +
                          " is not one of 2e-6, 2e-5, 5e-5, 2e-4");
    }
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    if (epochs == 0) throw ConfigError("epochs must be positive");
    const std::size_t cap = lora ? kMaxAdapterEpochs : kMaxEpochs;
    if (epochs > cap) {
        throw ConfigError("at most " + std::to_string(cap) + " epochs" +
                          (lora ? " with a LoRA adapter" : ""));
    }
    if (lora && lora->r == 0) throw ConfigError("LoRA rank must be at least 1");
    if (lora && !(lora->alpha > 0.0)) throw ConfigError("LoRA alpha must be positive");
    if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be non-negative");
    if (features.bits == 0 || features.bits > 24) throw ConfigError("feature bits must be in [1, 24]");
    if (features.min_ngram == 0 || features.min_ngram > features.max_ngram) {
        throw ConfigError("invalid n-gram range");
    }
}

LinearModel TrainedModel::effective() const { return adapter ? merge(base, *adapter) : base; }

TrainedModel train(const Corpus& corpus, Task task, const TrainConfig& config,
                   const Corpus* validation, const LinearModel* base) {
    config.validate();
    if (corpus.empty()) throw CorpusError("cannot train on an empty corpus");
    require_labels(corpus, task);
    if (validation) require_labels(*validation, task);

    const std::size_t classes = num_classes(task);
    const std::size_t dim = config.features.dim();

    TrainedModel tm;
    tm.task = task;
    tm.config = config;
    if (base) {
        if (base->classes() != classes || base->features() != dim) {
            throw ConfigError("base model shape does not match task and feature space");
        }
        tm.base = *base;
    } else {
        tm.base = LinearModel(classes, dim);
    }

    Rng rng(config.seed);
    if (config.lora) {
        tm.adapter = LoraAdapter::init(classes, dim, config.lora->r, config.lora->alpha, rng,
                                       config.lora->init_stddev);
    }
    LoraAdapter* adapter = tm.adapter ? &*tm.adapter : nullptr;

    std::vector<SentenceExamples> data;
    data.reserve(corpus.size());
    for (const auto& s : corpus.sentences) data.push_back(featurize(s, task, config.features));

    AdamW opt({.weight_decay = config.weight_decay});
    Gradients grads = Gradients::zeros_like(tm.base, adapter);
    auto slots = [&]() {
        std::vector<ParamSlot> out;
        if (adapter) {
            out.push_back({adapter->a.data, grads.lora_a->data});
            out.push_back({adapter->b.data, grads.lora_b->data});
        } else {
            out.push_back({tm.base.weight.data, grads.weight->data});
        }
        out.push_back({tm.base.bias, grads.bias});
        return out;
    }();

    const std::size_t steps_per_epoch = (corpus.size() + config.batch_size - 1) / config.batch_size;
    const std::size_t total_steps = steps_per_epoch * config.epochs;
    std::size_t step = 0;

    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::optional<double> best_metric;
    LinearModel best_base = tm.base;
    std::optional<LoraAdapter> best_adapter = tm.adapter;
    std::vector<Example> batch;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0.0;
        for (std::size_t b = 0; b < steps_per_epoch; ++b) {
            batch.clear();
            const std::size_t end = std::min(order.size(), (b + 1) * config.batch_size);
            for (std::size_t i = b * config.batch_size; i < end; ++i) {
                const auto& ex = data[order[i]];
                for (std::size_t k = 0; k < ex.features.size(); ++k) {
                    batch.push_back({&ex.features[k], ex.labels[k]});
                }
            }
            loss_sum += accumulate_loss_and_grads(tm.base, adapter, batch, grads);
            double lr = config.lr;
            if (config.schedule == Schedule::LinearDecay) {
                lr *= 1.0 - static_cast<double>(step) / static_cast<double>(total_steps);
            }
            opt.step(slots, lr);
            ++step;
        }

        EpochReport report;
        report.epoch = epoch;
        report.train_loss = loss_sum / static_cast<double>(steps_per_epoch);
        if (validation && !validation->empty()) {
            report.validation_metric = evaluate_task(tm, *validation);
        }
        tm.history.push_back(report);

        if (!report.validation_metric) {
            tm.best_epoch = epoch;
            continue;
        }
        if (!best_metric || *report.validation_metric > *best_metric) {
            best_metric = report.validation_metric;
            tm.best_epoch = epoch;
            best_base = tm.base;
            best_adapter = tm.adapter;
        }
        if (*best_metric >= 1.0) break;
    }

    if (best_metric) {
        tm.base = std::move(best_base);
        tm.adapter = std::move(best_adapter);
    }
    return tm;
}

Predictor::Predictor(const TrainedModel& model)
    : task_(model.task), features_(model.config.features), merged_(model.effective()) {}

SentencePrediction Predictor::predict(const std::vector<std::string>& tokens) const {
    SentencePrediction out;
    if (task_ == Task::Emotion) {
        const auto logits = forward(merged_, nullptr, featurize_sentence(tokens, features_));
        out.emotion = static_cast<EmotionLabel>(argmax(logits));
        return out;
    }
    std::vector<Logits> token_logits;
    for (const auto& x : featurize_tokens(tokens, features_)) {
        token_logits.push_back(forward(merged_, nullptr, x));
    }
    // The featurizer is word-level, so each word is its own first subtoken.
    const auto word_logits = first_subtoken_aggregate(token_logits, identity_alignment(tokens.size()));
    out.mask = predict_binary(word_logits);
    out.numeric = numeric_from_logits(word_logits).values;
    return out;
}

Corpus predict_corpus(const TrainedModel& model, const Corpus& corpus,
                      std::vector<std::vector<double>>* numeric) {
    const Predictor p(model);
    Corpus out = corpus;
    if (numeric) numeric->clear();
    for (auto& s : out.sentences) {
        auto pred = p.predict(s.tokens);
        if (model.task == Task::Emotion) {
            s.emotion = pred.emotion;
        } else {
            s.trigger_mask = std::move(pred.mask);
            if (numeric) numeric->push_back(std::move(pred.numeric));
        }
    }
    return out;
}

double evaluate_task(const TrainedModel& model, const Corpus& corpus) {
    require_labels(corpus, model.task);
    if (corpus.empty()) throw CorpusError("cannot evaluate on an empty corpus");
    const Predictor p(model);
    if (model.task == Task::Emotion) {
        std::vector<EmotionLabel> gold;
        std::vector<EmotionLabel> pred;
        for (const auto& s : corpus.sentences) {
            gold.push_back(*s.emotion);
            pred.push_back(*p.predict(s.tokens).emotion);
        }
        return metrics::macro_f1(gold, pred);
    }
    std::vector<std::pair<metrics::Mask, metrics::Mask>> pairs;
    for (const auto& s : corpus.sentences) pairs.emplace_back(*s.trigger_mask, *p.predict(s.tokens).mask);
    return metrics::corpus_token_f1(pairs);
}

}  // namespace xlproject::model
