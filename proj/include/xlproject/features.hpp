// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xlproject/corpus.hpp"

namespace xlproject::model {

// Sparse vector over a fixed hashed feature space. Indices are strictly
// increasing; colliding features have their values summed.
struct FeatureVector {
    std::size_t dim = 0;
    std::vector<std::uint32_t> indices;
    std::vector<double> values;

    std::size_t nnz() const { return indices.size(); }
    bool operator==(const FeatureVector&) const = default;
};

struct FeatureConfig {
    unsigned bits = 18;              // F = 2^bits
    std::uint64_t salt = 0x786c70726f6a;
    std::size_t window = 2;          // context tokens on each side
    std::size_t min_ngram = 2;
    std::size_t max_ngram = 4;

    std::size_t dim() const { return std::size_t{1} << bits; }
    bool operator==(const FeatureConfig&) const = default;
};

enum class FeatureMode { Sentence, Token };

// Token mode: one vector per token from the lowercased word, its character
// n-grams (with boundary symbols), and the words within +-window positions.
// Sentence mode: one vector pooling word and n-gram features of all tokens
// plus adjacent-word bigrams.
std::vector<FeatureVector> featurize_tokens(const std::vector<std::string>& tokens,
                                            const FeatureConfig& config);
FeatureVector featurize_sentence(const std::vector<std::string>& tokens,
                                 const FeatureConfig& config);

// Builds a FeatureVector from raw (index, value) pairs: sorts and merges
// duplicates.
FeatureVector make_feature_vector(std::size_t dim,
                                  std::vector<std::pair<std::uint32_t, double>> entries);

}  // namespace xlproject::model
