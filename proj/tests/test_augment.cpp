// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>
#include <tuple>

#include "doctest.h"
#include "xlproject/augment.hpp"
#include "xlproject/errors.hpp"
#include "xlproject/random.hpp"

using namespace xlproject;
using namespace xlproject::augment;

namespace {

AnnotatedSentence sentence(std::string id, std::string lang, std::vector<std::string> tokens,
                           std::vector<std::uint8_t> mask, EmotionLabel e = EmotionLabel::Love) {
    AnnotatedSentence s;
    s.id = std::move(id);
    s.language = std::move(lang);
    s.tokens = std::move(tokens);
    s.trigger_mask = std::move(mask);
    s.emotion = e;
    return s;
}

std::size_t marked(const AnnotatedSentence& s) {
    std::size_t n = 0;
    for (auto m : *s.trigger_mask) n += m;
    return n;
}

}  // namespace

TEST_CASE("switch example") {
    AlignedPair p{sentence("a", "en", {"I", "love", "you"}, {0, 1, 0}),
                  sentence("a/es", "es", {"Te", "quiero", "mucho"}, {0, 1, 0}),
                  {{1, 2, 0}},
                  {{1, 2, 0}}};
    const auto sw = switch_triggers(p);
    CHECK(sw.source_host.tokens == std::vector<std::string>{"I", "quiero", "you"});
    CHECK(*sw.source_host.trigger_mask == std::vector<std::uint8_t>{0, 1, 0});
    CHECK(sw.target_host.tokens == std::vector<std::string>{"Te", "love", "mucho"});
    CHECK(*sw.target_host.trigger_mask == std::vector<std::uint8_t>{0, 1, 0});
    CHECK(sw.source_host.language == "en");
    CHECK(sw.target_host.language == "es");
    CHECK(sw.source_host.origin == DatasetTag::DSt);
    CHECK(sw.target_host.origin == DatasetTag::DTs);
    CHECK(sw.source_host.bilingual);
    CHECK(sw.target_host.bilingual);
    CHECK(sw.source_host.emotion == EmotionLabel::Love);
    CHECK(sw.target_host.emotion == EmotionLabel::Love);
    CHECK(sw.source_host.id != sw.target_host.id);
}

TEST_CASE("switched length follows span lengths") {
    // Source has a two-token span, target a one-token span.
    AlignedPair p{sentence("a", "en", {"w", "x", "y", "z", "v"}, {0, 1, 1, 0, 0}),
                  sentence("a/es", "es", {"p", "q", "r"}, {0, 1, 0}),
                  {{1, 3, 0}},
                  {{1, 2, 0}}};
    const auto sw = switch_triggers(p);
    CHECK(sw.source_host.tokens.size() == 5 - 2 + 1);
    CHECK(sw.target_host.tokens.size() == 3 - 1 + 2);
    CHECK(sw.source_host.tokens == std::vector<std::string>{"w", "q", "z", "v"});
    CHECK(sw.target_host.tokens == std::vector<std::string>{"p", "x", "y", "r"});
    CHECK(sw.source_host_spans == std::vector<TriggerSpan>{{1, 2, 0}});
    CHECK(sw.target_host_spans == std::vector<TriggerSpan>{{1, 3, 0}});
}

TEST_CASE("crossed spans use marker identity, not position") {
    AlignedPair p{sentence("a", "en", {"A", "b", "C"}, {1, 0, 1}),
                  sentence("a/es", "es", {"c", "y", "a"}, {1, 0, 1}),
                  {{0, 1, 0}, {2, 3, 1}},
                  {{0, 1, 1}, {2, 3, 0}}};
    const auto sw = switch_triggers(p);
    CHECK(sw.source_host.tokens == std::vector<std::string>{"a", "b", "c"});
    CHECK(sw.target_host.tokens == std::vector<std::string>{"C", "y", "A"});
}

TEST_CASE("property: switching conserves mask mass and involutes on single-token spans") {
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = 1 + rng.below(3);
        auto build = [&](const std::string& prefix, bool single) {
            std::vector<std::string> tokens;
            std::vector<std::uint8_t> mask;
            std::vector<TriggerSpan> spans;
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t gap = 1 + rng.below(3);
                for (std::size_t g = 0; g < gap; ++g) {
                    tokens.push_back(prefix + "f" + std::to_string(tokens.size()));
                    mask.push_back(0);
                }
                const std::size_t len = single ? 1 : 1 + rng.below(3);
                const std::size_t start = tokens.size();
                for (std::size_t t = 0; t < len; ++t) {
                    tokens.push_back(prefix + "t" + std::to_string(tokens.size()));
                    mask.push_back(1);
                }
                spans.push_back({start, tokens.size(), i});
            }
            return std::tuple{tokens, mask, spans};
        };
        const bool single = trial % 2 == 0;
        auto [st, sm, ss] = build("s", single);
        auto [tt, tm, ts] = build("t", single);
        // Shuffle target marker identities to model reordering.
        std::vector<std::size_t> perm(k);
        for (std::size_t i = 0; i < k; ++i) perm[i] = i;
        rng.shuffle(std::span<std::size_t>(perm));
        for (std::size_t i = 0; i < k; ++i) ts[i].marker_index = perm[i];

        AlignedPair p{sentence("x", "en", st, sm), sentence("x/es", "es", tt, tm), ss, ts};
        const auto sw = switch_triggers(p);
        std::size_t src_span_tokens = 0;
        std::size_t tgt_span_tokens = 0;
        for (const auto& s : ss) src_span_tokens += s.length();
        for (const auto& s : ts) tgt_span_tokens += s.length();
        CHECK(marked(sw.source_host) == tgt_span_tokens);
        CHECK(marked(sw.target_host) == src_span_tokens);
        CHECK(sw.source_host.tokens.size() == st.size() - src_span_tokens + tgt_span_tokens);
        CHECK(sw.target_host.tokens.size() == tt.size() - tgt_span_tokens + src_span_tokens);
        if (single) {
            AlignedPair back{sw.source_host, sw.target_host, sw.source_host_spans, sw.target_host_spans};
            const auto again = switch_triggers(back);
            CHECK(again.source_host.tokens == st);
            CHECK(again.target_host.tokens == tt);
        }
    }
}

TEST_CASE("corrupt pairs are rejected") {
    const auto src = sentence("a", "en", {"I", "love", "you"}, {0, 1, 0});
    const auto tgt = sentence("a/es", "es", {"Te", "quiero"}, {0, 1});
    CHECK_THROWS_AS(switch_triggers({src, tgt, {{1, 2, 0}}, {{1, 2, 1}}}), SwitchError);
    CHECK_THROWS_AS(switch_triggers({src, tgt, {{1, 2, 0}}, {}}), SwitchError);
    CHECK_THROWS_AS(switch_triggers({src, tgt, {{1, 2, 0}}, {{1, 5, 0}}}), SwitchError);
    CHECK_THROWS_AS(switch_triggers({src, tgt, {{1, 2, 0}, {1, 2, 0}}, {{0, 1, 0}, {1, 2, 0}}}),
                    SwitchError);
}

TEST_CASE("build_switched_corpora pairs by alignment record") {
    Corpus en;
    en.sentences.push_back(sentence("a", "en", {"I", "love", "you"}, {0, 1, 0}));
    en.sentences.push_back(sentence("b", "en", {"just", "words"}, {0, 0}, EmotionLabel::Neutral));
    Corpus es;
    es.sentences.push_back(sentence("a/es", "es", {"Te", "quiero", "mucho"}, {0, 1, 0}));
    es.sentences.push_back(sentence("b/es", "es", {"solo", "palabras"}, {0, 0}, EmotionLabel::Neutral));
    std::vector<projection::AlignmentRecord> al = {{"a/es", "a", {{1, 2, 0}}, {{1, 2, 0}}},
                                                   {"b/es", "b", {}, {}}};
    const auto [st, ts] = build_switched_corpora(en, es, al);
    REQUIRE(st.size() == 1);
    REQUIRE(ts.size() == 1);
    CHECK(st.sentences[0].tokens == std::vector<std::string>{"I", "quiero", "you"});
    CHECK(ts.sentences[0].tokens == std::vector<std::string>{"Te", "love", "mucho"});
    al.push_back({"zz/es", "zz", {{0, 1, 0}}, {{0, 1, 0}}});
    CHECK_THROWS_AS(build_switched_corpora(en, es, al), CorpusError);
}

TEST_CASE("combination spec parsing") {
    CHECK(CombinationSpec::parse("D_S").to_string() == "D_S");
    CHECK(CombinationSpec::parse("D_Ts+D_S+D_T").to_string() == "D_S+D_T+D_Ts");
    CHECK(CombinationSpec::parse(" D_S + D_St ").include ==
          std::vector<DatasetTag>{DatasetTag::DS, DatasetTag::DSt});
    CHECK_THROWS_AS(CombinationSpec::parse("D_T"), ConfigError);
    CHECK_THROWS_AS(CombinationSpec::parse("D_S+D_S"), ConfigError);
    CHECK_THROWS_AS(CombinationSpec::parse("D_S+D_X"), ConfigError);
    CHECK_THROWS_AS(CombinationSpec::parse(""), ConfigError);
    CHECK_THROWS_AS(CombinationSpec::parse("D_S+"), ConfigError);
}

TEST_CASE("build_dataset concatenates and tags ids") {
    std::map<DatasetTag, Corpus> parts;
    parts[DatasetTag::DS].sentences.push_back(sentence("a", "en", {"x"}, {0}));
    parts[DatasetTag::DT].sentences.push_back(sentence("a/es", "es", {"y"}, {0}));
    parts[DatasetTag::DT].sentences.push_back(sentence("a/fr", "fr", {"z"}, {0}));
    parts[DatasetTag::DSt].sentences.push_back(sentence("a/es/St", "en", {"y"}, {1}));

    const auto all = build_dataset(CombinationSpec::parse("D_S+D_T+D_St"), parts);
    CHECK(all.size() == 4);
    CHECK(all.sentences[0].id == "a#D_S");
    CHECK(all.sentences[1].id == "a/es#D_T");
    CHECK(all.sentences[3].id == "a/es/St#D_St");
    CHECK(all.provenance.at("combination") == "D_S+D_T+D_St");
    std::set<std::string> ids;
    for (const auto& s : all.sentences) ids.insert(s.id);
    CHECK(ids.size() == all.size());

    CHECK(build_dataset(CombinationSpec::parse("D_S"), parts).size() == 1);
    CHECK_THROWS_AS(build_dataset(CombinationSpec::parse("D_S+D_Ts"), parts), ConfigError);
}
