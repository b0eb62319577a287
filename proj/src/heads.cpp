// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/heads.hpp"

#include <algorithm>
#include <stdexcept>

#include "xlproject/linear.hpp"
#include "xlproject/unicode.hpp"

namespace xlproject::model {

void SubwordAlignment::validate(std::size_t subtoken_count) const {
    std::size_t expected = 0;
    for (std::size_t i = 0; i < word_to_subtokens.size(); ++i) {
        const auto& r = word_to_subtokens[i];
        if (r.start != expected || r.end <= r.start) {
            throw std::invalid_argument("subword alignment is not a partition at word " +
                                        std::to_string(i));
        }
        expected = r.end;
    }
    if (expected != subtoken_count) {
        throw std::invalid_argument("subword alignment covers " + std::to_string(expected) +
                                    " subtokens, expected " + std::to_string(subtoken_count));
    }
}

SubwordAlignment identity_alignment(std::size_t words) {
    SubwordAlignment a;
    for (std::size_t i = 0; i < words; ++i) a.word_to_subtokens.push_back({i, i + 1});
    return a;
}

SubwordAlignment chunk_alignment(const std::vector<std::string>& words, std::size_t max_chunk) {
    if (max_chunk == 0) throw std::invalid_argument("chunk size must be positive");
    SubwordAlignment a;
    std::size_t next = 0;
    for (const auto& w : words) {
        const std::size_t cps = std::max<std::size_t>(1, unicode::code_points(w).size());
        const std::size_t chunks = (cps + max_chunk - 1) / max_chunk;
        a.word_to_subtokens.push_back({next, next + chunks});
        next += chunks;
    }
    return a;
}

std::vector<Logits> first_subtoken_aggregate(const std::vector<Logits>& subtoken_logits,
                                             const SubwordAlignment& align) {
    align.validate(subtoken_logits.size());
    std::vector<Logits> out;
    out.reserve(align.words());
    for (const auto& r : align.word_to_subtokens) out.push_back(subtoken_logits[r.start]);
    return out;
}

std::size_t argmax(const Logits& logits) {
    if (logits.empty()) throw std::invalid_argument("argmax of empty logits");
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i) {
        if (logits[i] > logits[best]) best = i;
    }
    return best;
}

std::vector<std::uint8_t> predict_binary(const std::vector<Logits>& word_logits) {
    std::vector<std::uint8_t> mask;
    mask.reserve(word_logits.size());
    for (const auto& l : word_logits) {
        if (l.size() != 2) throw std::invalid_argument("binary head expects 2 logits per word");
        mask.push_back(l[1] > l[0] ? 1 : 0);
    }
    return mask;
}

metrics::Attributions numeric_from_logits(const std::vector<Logits>& word_logits) {
    if (word_logits.empty()) throw std::invalid_argument("numeric head needs at least one word");
    std::vector<double> class1;
    class1.reserve(word_logits.size());
    for (const auto& l : word_logits) {
        if (l.size() != 2) throw std::invalid_argument("binary head expects 2 logits per word");
        class1.push_back(l[1]);
    }
    return {softmax(class1)};
}

}  // namespace xlproject::model
