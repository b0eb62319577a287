// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xlproject/corpus.hpp"
#include "xlproject/translate.hpp"

// Synthetic English corpus where every trigger word carries the sentinel
// "qz" plus a per-emotion letter (e.g. "sunqzj" for Joy). Neutral sentences
// have no triggers. The matching dictionary translates every word into
// es/fr/nl/ru pseudo-words and keeps the sentinel on trigger words, so the
// whole pipeline runs offline.

namespace xlproject::synthetic {

struct FixtureOptions {
    std::size_t sentences = 400;
    std::uint64_t seed = 7;
    std::string id_prefix = "syn";
    std::size_t min_filler = 4;
    std::size_t max_filler = 10;
    double two_span_probability = 0.3;
    double two_word_span_probability = 0.2;
};

const std::vector<std::string>& filler_words();
// Trigger words of one emotion; empty for Neutral.
std::vector<std::string> trigger_words(EmotionLabel label);

Corpus generate_corpus(const FixtureOptions& options);

// Covers every filler and trigger word for es, fr, nl and ru. A few entries
// expand to two words.
translate::DictionaryBackend::Dictionary generate_dictionary();

}  // namespace xlproject::synthetic
