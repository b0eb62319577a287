// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace xlproject::metrics {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a) +
                                    " vs " + std::to_string(b) + ")");
    }
}

std::size_t idx(EmotionLabel l) { return static_cast<std::size_t>(l); }

}  // namespace

std::size_t ConfusionMatrix::total() const {
    std::size_t t = 0;
    for (const auto& row : counts) {
        for (auto v : row) t += v;
    }
    return t;
}

std::size_t ConfusionMatrix::row_sum(EmotionLabel gold) const {
    std::size_t t = 0;
    for (auto v : counts[idx(gold)]) t += v;
    return t;
}

std::array<std::array<double, kNumEmotions>, kNumEmotions> ConfusionMatrix::row_normalized() const {
    std::array<std::array<double, kNumEmotions>, kNumEmotions> out{};
    for (std::size_t g = 0; g < kNumEmotions; ++g) {
        const std::size_t sum = row_sum(static_cast<EmotionLabel>(g));
        if (sum == 0) continue;
        for (std::size_t p = 0; p < kNumEmotions; ++p) {
            out[g][p] = static_cast<double>(counts[g][p]) / static_cast<double>(sum);
        }
    }
    return out;
}

std::string ConfusionMatrix::to_csv(bool normalized) const {
    std::ostringstream os;
    os << "gold\\pred";
    for (auto l : kAllEmotions) os << ',' << to_string(l);
    os << '\n';
    const auto norm = row_normalized();
    for (std::size_t g = 0; g < kNumEmotions; ++g) {
        os << to_string(static_cast<EmotionLabel>(g));
        for (std::size_t p = 0; p < kNumEmotions; ++p) {
            os << ',';
            if (normalized) {
                os << norm[g][p];
            } else {
                os << counts[g][p];
            }
        }
        os << '\n';
    }
    return os.str();
}

std::array<ClassScores, kNumEmotions> per_class_scores(std::span<const EmotionLabel> gold,
                                                        std::span<const EmotionLabel> pred) {
    require_same_length(gold.size(), pred.size(), "per_class_scores");
    std::array<std::size_t, kNumEmotions> tp{};
    std::array<ClassScores, kNumEmotions> out{};
    for (std::size_t i = 0; i < gold.size(); ++i) {
        ++out[idx(gold[i])].support;
        ++out[idx(pred[i])].predicted;
        if (gold[i] == pred[i]) ++tp[idx(gold[i])];
    }
    for (std::size_t c = 0; c < kNumEmotions; ++c) {
        auto& s = out[c];
        const auto t = static_cast<double>(tp[c]);
        if (s.predicted) s.precision = t / static_cast<double>(s.predicted);
        if (s.support) s.recall = t / static_cast<double>(s.support);
        const auto denom = static_cast<double>(s.support + s.predicted);
        if (denom > 0) s.f1 = 2.0 * t / denom;
    }
    return out;
}

double macro_f1(std::span<const EmotionLabel> gold, std::span<const EmotionLabel> pred) {
    require_same_length(gold.size(), pred.size(), "macro_f1");
    if (gold.empty()) throw std::invalid_argument("macro_f1: no instances");
    const auto scores = per_class_scores(gold, pred);
    double sum = 0.0;
    std::size_t classes = 0;
    for (const auto& s : scores) {
        if (s.support == 0 && s.predicted == 0) continue;
        sum += s.f1;
        ++classes;
    }
    return sum / static_cast<double>(classes);
}

double instance_token_f1(std::span<const std::uint8_t> gold, std::span<const std::uint8_t> pred) {
    require_same_length(gold.size(), pred.size(), "instance_token_f1");
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool g = gold[i] != 0;
        const bool p = pred[i] != 0;
        tp += g && p;
        fp += !g && p;
        fn += g && !p;
    }
    if (tp + fp + fn == 0) return 1.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double corpus_token_f1(std::span<const std::pair<Mask, Mask>> instances) {
    if (instances.empty()) throw std::invalid_argument("corpus_token_f1: no instances");
    double sum = 0.0;
    for (const auto& [g, p] : instances) sum += instance_token_f1(g, p);
    return sum / static_cast<double>(instances.size());
}

Attributions normalize_attributions(std::span<const double> raw) {
    if (raw.empty()) throw std::invalid_argument("normalize_attributions: empty input");
    Attributions out;
    out.values.reserve(raw.size());
    double sum = 0.0;
    for (double v : raw) {
        if (!std::isfinite(v)) throw std::invalid_argument("normalize_attributions: non-finite value");
        const double c = v > 0.0 ? v : 0.0;
        out.values.push_back(c);
        sum += c;
    }
    if (sum > 0.0) {
        for (double& v : out.values) v /= sum;
    } else {
        const double u = 1.0 / static_cast<double>(raw.size());
        for (double& v : out.values) v = u;
    }
    return out;
}

double accumulated_importance(std::span<const std::uint8_t> gold, const Attributions& attributions) {
    require_same_length(gold.size(), attributions.values.size(), "accumulated_importance");
    double sum = 0.0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i]) sum += attributions.values[i];
    }
    return sum;
}

AccumulatedImportance corpus_accumulated_importance(
    std::span<const std::pair<Mask, std::vector<double>>> instances) {
    AccumulatedImportance out;
    double sum = 0.0;
    for (const auto& [gold, raw] : instances) {
        require_same_length(gold.size(), raw.size(), "accumulated_importance");
        bool any = false;
        for (auto g : gold) any = any || g != 0;
        if (!any) {
            ++out.skipped_no_trigger;
            continue;
        }
        sum += accumulated_importance(gold, normalize_attributions(raw));
        ++out.scored;
    }
    if (out.scored) out.mean = sum / static_cast<double>(out.scored);
    return out;
}

ConfusionMatrix confusion_matrix(std::span<const EmotionLabel> gold,
                                 std::span<const EmotionLabel> pred) {
    require_same_length(gold.size(), pred.size(), "confusion_matrix");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < gold.size(); ++i) ++m.counts[idx(gold[i])][idx(pred[i])];
    return m;
}

}  // namespace xlproject::metrics
