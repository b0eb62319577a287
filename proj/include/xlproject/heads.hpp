// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xlproject/metrics.hpp"

namespace xlproject::model {

struct SubtokenRange {
    std::size_t start = 0;
    std::size_t end = 0;  // exclusive
    bool operator==(const SubtokenRange&) const = default;
};

// word_to_subtokens[i] is the contiguous subtoken range of word i.
struct SubwordAlignment {
    std::vector<SubtokenRange> word_to_subtokens;

    std::size_t words() const { return word_to_subtokens.size(); }

    // Throws std::invalid_argument unless the ranges are non-empty, ordered
    // and cover [0, subtoken_count) without gaps.
    void validate(std::size_t subtoken_count) const;
};

SubwordAlignment identity_alignment(std::size_t words);

// Splits every word into chunks of at most `max_chunk` code points. Stands in
// for a subword tokenizer in tests.
SubwordAlignment chunk_alignment(const std::vector<std::string>& words, std::size_t max_chunk = 3);

using Logits = std::vector<double>;

// Keeps the logits of each word's first subtoken.
std::vector<Logits> first_subtoken_aggregate(const std::vector<Logits>& subtoken_logits,
                                             const SubwordAlignment& align);

// argmax per word; ties go to class 0.
std::vector<std::uint8_t> predict_binary(const std::vector<Logits>& word_logits);

// argmax over classes; ties go to the lower index.
std::size_t argmax(const Logits& logits);

// Softmax across words of each word's class-1 logit.
metrics::Attributions numeric_from_logits(const std::vector<Logits>& word_logits);

}  // namespace xlproject::model
