// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "xlproject/metrics.hpp"
#include "xlproject/random.hpp"

using namespace xlproject;
using namespace xlproject::metrics;

namespace {

using E = EmotionLabel;

// Brute-force macro F1 from explicit TP/FP/FN counts.
double oracle_macro_f1(const std::vector<E>& gold, const std::vector<E>& pred) {
    double sum = 0.0;
    int classes = 0;
    for (auto c : kAllEmotions) {
        int tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (gold[i] == c && pred[i] == c) ++tp;
            if (gold[i] != c && pred[i] == c) ++fp;
            if (gold[i] == c && pred[i] != c) ++fn;
        }
        if (tp + fp + fn == 0) continue;
        const double p = tp + fp ? double(tp) / (tp + fp) : 0.0;
        const double r = tp + fn ? double(tp) / (tp + fn) : 0.0;
        sum += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
        ++classes;
    }
    return sum / classes;
}

double oracle_token_f1(const Mask& g, const Mask& p) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        tp += g[i] && p[i];
        fp += !g[i] && p[i];
        fn += g[i] && !p[i];
    }
    if (tp + fp + fn == 0) return 1.0;
    const double prec = tp + fp ? double(tp) / (tp + fp) : 0.0;
    const double rec = tp + fn ? double(tp) / (tp + fn) : 0.0;
    return prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
}

Mask random_mask(Rng& rng, std::size_t n, double p) {
    Mask m(n);
    for (auto& v : m) v = rng.uniform() < p;
    return m;
}

std::vector<E> random_labels(Rng& rng, std::size_t n, std::size_t classes = kNumEmotions) {
    std::vector<E> out(n);
    for (auto& v : out) v = static_cast<E>(rng.below(classes));
    return out;
}

}  // namespace

TEST_CASE("token F1 example") {
    const Mask gold = {0, 1, 1, 0};
    const Mask pred = {0, 1, 0, 1};
    CHECK(instance_token_f1(gold, pred) == doctest::Approx(0.5));
    const Mask g2 = {1, 1, 0};
    const Mask p2 = {1, 0, 0};
    CHECK(instance_token_f1(g2, p2) == doctest::Approx(2.0 / 3.0));
    CHECK(instance_token_f1(Mask{0, 0}, Mask{0, 0}) == 1.0);
    CHECK(instance_token_f1(Mask{0, 0}, Mask{1, 0}) == 0.0);
    CHECK_THROWS_AS(instance_token_f1(Mask{0}, Mask{0, 1}), std::invalid_argument);
}

TEST_CASE("corpus token F1 is the mean of instance scores") {
    const std::vector<std::pair<Mask, Mask>> inst = {{{1, 1, 0}, {1, 0, 0}}, {{0, 0}, {0, 0}}};
    CHECK(corpus_token_f1(inst) == doctest::Approx((2.0 / 3.0 + 1.0) / 2.0));
    CHECK_THROWS_AS(corpus_token_f1({}), std::invalid_argument);
}

TEST_CASE("accumulated importance examples") {
    const Mask gold = {0, 1, 1, 0};
    CHECK(accumulated_importance(gold, normalize_attributions(std::vector<double>{0.1, 0.4, 0.3, 0.2})) ==
          doctest::Approx(0.7));
    CHECK(accumulated_importance(Mask{1, 0, 0}, normalize_attributions(std::vector<double>{1, 1, 1})) ==
          doctest::Approx(1.0 / 3.0));
    const auto clamped = normalize_attributions(std::vector<double>{0.5, -0.2, 0.5});
    CHECK(clamped.values == std::vector<double>{0.5, 0.0, 0.5});
    const auto uniform = normalize_attributions(std::vector<double>{-1.0, -2.0});
    CHECK(uniform.values == std::vector<double>{0.5, 0.5});
    CHECK_THROWS_AS(normalize_attributions(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(normalize_attributions(std::vector<double>{1.0, NAN}), std::invalid_argument);
    CHECK_THROWS_AS(normalize_attributions(std::vector<double>{INFINITY}), std::invalid_argument);
}

TEST_CASE("corpus accumulated importance skips trigger-free instances") {
    const std::vector<std::pair<Mask, std::vector<double>>> inst = {
        {{0, 1}, {1.0, 3.0}}, {{0, 0}, {1.0, 1.0}}, {{1, 1}, {2.0, 2.0}}};
    const auto r = corpus_accumulated_importance(inst);
    CHECK(r.scored == 2);
    CHECK(r.skipped_no_trigger == 1);
    REQUIRE(r.mean.has_value());
    CHECK(*r.mean == doctest::Approx((0.75 + 1.0) / 2.0));
    CHECK_FALSE(corpus_accumulated_importance(
                    std::vector<std::pair<Mask, std::vector<double>>>{{{0}, {1.0}}})
                    .mean.has_value());
}

TEST_CASE("macro F1 example") {
    // Love: tp 1, fp 0, fn 1 -> 2/3. Joy: tp 1, fp 1, fn 0 -> 2/3. Others absent.
    const std::vector<E> gold = {E::Love, E::Love, E::Joy};
    const std::vector<E> pred = {E::Love, E::Joy, E::Joy};
    CHECK(macro_f1(gold, pred) == doctest::Approx(2.0 / 3.0));
    const std::vector<E> g1 = {E::Fear};
    const std::vector<E> p1 = {E::Anger};
    CHECK(macro_f1(g1, p1) == 0.0);
    CHECK_THROWS_AS(macro_f1(std::vector<E>{}, std::vector<E>{}), std::invalid_argument);
    CHECK_THROWS_AS(macro_f1(gold, p1), std::invalid_argument);
}

TEST_CASE("property: macro and token F1 match brute-force oracles") {
    Rng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        const auto gold = random_labels(rng, n, 1 + rng.below(6));
        const auto pred = random_labels(rng, n, 1 + rng.below(6));
        const double f = macro_f1(gold, pred);
        CHECK(f == doctest::Approx(oracle_macro_f1(gold, pred)).epsilon(1e-12));
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        CHECK(macro_f1(gold, gold) == 1.0);

        const std::size_t l = 1 + rng.below(20);
        const auto g = random_mask(rng, l, 0.3);
        const auto p = random_mask(rng, l, 0.3);
        const double t = instance_token_f1(g, p);
        CHECK(t == doctest::Approx(oracle_token_f1(g, p)).epsilon(1e-12));
        CHECK(t >= 0.0);
        CHECK(t <= 1.0);
        CHECK(instance_token_f1(g, p) == instance_token_f1(p, g));
    }
}

TEST_CASE("property: metrics are invariant under joint permutation") {
    Rng rng(18);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(30);
        auto gold = random_labels(rng, n);
        auto pred = random_labels(rng, n);
        auto g = random_mask(rng, n, 0.4);
        auto p = random_mask(rng, n, 0.4);
        std::vector<double> raw(n);
        for (double& v : raw) v = rng.normal();
        const double f = macro_f1(gold, pred);
        const double t = instance_token_f1(g, p);
        const double ai = accumulated_importance(g, normalize_attributions(raw));

        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(std::span<std::size_t>(perm));
        auto apply = [&](auto v) {
            auto out = v;
            for (std::size_t i = 0; i < n; ++i) out[i] = v[perm[i]];
            return out;
        };
        CHECK(macro_f1(apply(gold), apply(pred)) == doctest::Approx(f).epsilon(1e-12));
        CHECK(instance_token_f1(apply(g), apply(p)) == t);
        CHECK(accumulated_importance(apply(g), normalize_attributions(apply(raw))) ==
              doctest::Approx(ai).epsilon(1e-12));
    }
}

TEST_CASE("property: accumulated importance of uniform attributions is the trigger share") {
    Rng rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(25);
        const auto g = random_mask(rng, n, 0.3);
        const double share = double(std::count(g.begin(), g.end(), 1)) / double(n);
        CHECK(accumulated_importance(g, normalize_attributions(std::vector<double>(n, 0.0))) ==
              doctest::Approx(share));
        std::vector<double> raw(n);
        for (double& v : raw) v = rng.normal();
        const auto a = normalize_attributions(raw);
        double total = 0.0;
        for (double v : a.values) {
            CHECK(v >= 0.0);
            total += v;
        }
        CHECK(total == doctest::Approx(1.0));
        const double ai = accumulated_importance(g, a);
        CHECK(ai >= 0.0);
        CHECK(ai <= 1.0 + 1e-12);
    }
}

TEST_CASE("property: per-class precision equals diagonal over predicted column") {
    Rng rng(20);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(50);
        const auto gold = random_labels(rng, n);
        const auto pred = random_labels(rng, n);
        const auto cm = confusion_matrix(gold, pred);
        const auto scores = per_class_scores(gold, pred);
        CHECK(cm.total() == n);
        for (std::size_t c = 0; c < kNumEmotions; ++c) {
            std::size_t col = 0;
            for (std::size_t g = 0; g < kNumEmotions; ++g) col += cm.counts[g][c];
            CHECK(col == scores[c].predicted);
            CHECK(cm.row_sum(static_cast<E>(c)) == scores[c].support);
            if (col) CHECK(scores[c].precision == doctest::Approx(double(cm.counts[c][c]) / double(col)));
            if (scores[c].support) {
                CHECK(scores[c].recall == doctest::Approx(double(cm.counts[c][c]) / double(scores[c].support)));
            }
        }
        const auto norm = cm.row_normalized();
        for (std::size_t g = 0; g < kNumEmotions; ++g) {
            double s = 0.0;
            for (double v : norm[g]) s += v;
            if (cm.row_sum(static_cast<E>(g))) CHECK(s == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("confusion CSV layout") {
    const std::vector<E> gold = {E::Love, E::Joy};
    const std::vector<E> pred = {E::Joy, E::Joy};
    const auto csv = confusion_matrix(gold, pred).to_csv();
    CHECK(csv.rfind("gold\\pred,Love,Joy,Fear,Anger,Sadness,Neutral\nLove,0,1,0,0,0,0\nJoy,0,1,", 0) == 0);
}
