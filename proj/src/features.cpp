// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/features.hpp"

#include <algorithm>
#include <stdexcept>

#include "xlproject/hashing.hpp"
#include "xlproject/unicode.hpp"

namespace xlproject::model {
namespace {

using Entries = std::vector<std::pair<std::uint32_t, double>>;

class Hasher {
  public:
    explicit Hasher(const FeatureConfig& c) : salt_(c.salt), mask_(c.dim() - 1) {
        if (c.bits == 0 || c.bits > 31) throw std::invalid_argument("feature bits must be in [1, 31]");
    }
    std::uint32_t operator()(std::string_view feature) const {
        return static_cast<std::uint32_t>(hash64(feature, salt_) & mask_);
    }

  private:
    std::uint64_t salt_;
    std::uint64_t mask_;
};

void word_features(const std::string& lowered, const FeatureConfig& c, const Hasher& h,
                   Entries& out) {
    out.emplace_back(h("w=" + lowered), 1.0);
    auto cps = unicode::code_points(lowered);
    cps.insert(cps.begin(), "<");
    cps.emplace_back(">");
    for (std::size_t n = c.min_ngram; n <= c.max_ngram; ++n) {
        if (n > cps.size()) break;
        for (std::size_t i = 0; i + n <= cps.size(); ++i) {
            std::string gram = "g" + std::to_string(n) + "=";
            for (std::size_t k = 0; k < n; ++k) gram += cps[i + k];
            out.emplace_back(h(gram), 1.0);
        }
    }
}

}  // namespace

FeatureVector make_feature_vector(std::size_t dim, Entries entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    FeatureVector v;
    v.dim = dim;
    for (const auto& [idx, val] : entries) {
        if (idx >= dim) throw std::out_of_range("feature index out of range");
        if (!v.indices.empty() && v.indices.back() == idx) {
            v.values.back() += val;
        } else {
            v.indices.push_back(idx);
            v.values.push_back(val);
        }
    }
    return v;
}

std::vector<FeatureVector> featurize_tokens(const std::vector<std::string>& tokens,
                                            const FeatureConfig& config) {
    const Hasher h(config);
    std::vector<std::string> lowered;
    lowered.reserve(tokens.size());
    for (const auto& t : tokens) lowered.push_back(unicode::ascii_lower(t));

    const auto n = static_cast<std::ptrdiff_t>(tokens.size());
    const auto w = static_cast<std::ptrdiff_t>(config.window);
    std::vector<FeatureVector> out;
    out.reserve(tokens.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        Entries e;
        word_features(lowered[static_cast<std::size_t>(i)], config, h, e);
        for (std::ptrdiff_t d = -w; d <= w; ++d) {
            if (d == 0) continue;
            const std::ptrdiff_t j = i + d;
            const std::string& ctx = j < 0 ? std::string("<s>")
                                   : j >= n ? std::string("</s>")
                                            : lowered[static_cast<std::size_t>(j)];
            e.emplace_back(h("c" + std::to_string(d) + "=" + ctx), 1.0);
        }
        out.push_back(make_feature_vector(config.dim(), std::move(e)));
    }
    return out;
}

FeatureVector featurize_sentence(const std::vector<std::string>& tokens,
                                 const FeatureConfig& config) {
    const Hasher h(config);
    Entries e;
    std::string prev = "<s>";
    for (const auto& t : tokens) {
        const std::string lowered = unicode::ascii_lower(t);
        word_features(lowered, config, h, e);
        e.emplace_back(h("b=" + prev + "_" + lowered), 1.0);
        prev = lowered;
    }
    return make_feature_vector(config.dim(), std::move(e));
}

}  // namespace xlproject::model
