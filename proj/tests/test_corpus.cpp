// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "xlproject/corpus.hpp"
#include "xlproject/errors.hpp"
#include "xlproject/random.hpp"

using namespace xlproject;
using testutil::TempDir;

namespace {

AnnotatedSentence sentence(std::string id, std::vector<std::string> tokens,
                           std::optional<EmotionLabel> emotion = std::nullopt,
                           std::optional<std::vector<std::uint8_t>> mask = std::nullopt) {
    AnnotatedSentence s;
    s.id = std::move(id);
    s.language = "en";
    s.tokens = std::move(tokens);
    s.emotion = emotion;
    s.trigger_mask = std::move(mask);
    return s;
}

Corpus random_corpus(Rng& rng, std::size_t n) {
    static const std::vector<std::string> words = {"a", "Über", "día", "привет", "x'y", "#", "«q»", "ok."};
    Corpus c;
    for (std::size_t i = 0; i < n; ++i) {
        AnnotatedSentence s;
        s.id = "s" + std::to_string(i);
        const auto tag = kAllDatasetTags[rng.below(4)];
        s.origin = tag;
        s.language = tag == DatasetTag::DS ? "en" : std::string(kLanguages[1 + rng.below(4)]);
        if (tag == DatasetTag::DSt) s.language = "en";
        s.bilingual = tag == DatasetTag::DSt || tag == DatasetTag::DTs;
        const std::size_t len = 1 + rng.below(8);
        for (std::size_t k = 0; k < len; ++k) s.tokens.push_back(words[rng.below(words.size())]);
        if (rng.below(3)) s.emotion = kAllEmotions[rng.below(kNumEmotions)];
        if (rng.below(3)) {
            std::vector<std::uint8_t> m;
            for (std::size_t k = 0; k < len; ++k) m.push_back(static_cast<std::uint8_t>(rng.below(2)));
            s.trigger_mask = m;
        }
        c.sentences.push_back(std::move(s));
    }
    return c;
}

}  // namespace

TEST_CASE("emotion labels serialize as capitalized words") {
    CHECK(kAllEmotions.size() == 6);
    for (auto l : kAllEmotions) CHECK(parse_emotion(to_string(l)) == l);
    CHECK(to_string(EmotionLabel::Sadness) == "Sadness");
    CHECK_FALSE(parse_emotion("joy").has_value());
    CHECK(to_string(DatasetTag::DSt) == "D_St");
    CHECK(parse_dataset_tag("D_Ts") == DatasetTag::DTs);
}

TEST_CASE("load_corpus reads one JSONL record") {
    TempDir dir;
    testutil::write_file(dir / "c.jsonl",
                         R"({"id":"a","lang":"en","tokens":["I","love","you"],"mask":[0,1,0],"origin":"D_S"})"
                         "\n");
    const auto c = load_corpus(dir / "c.jsonl", CorpusFormat::Jsonl);
    REQUIRE(c.size() == 1);
    CHECK(c.sentences[0].tokens == std::vector<std::string>{"I", "love", "you"});
    CHECK(*c.sentences[0].trigger_mask == std::vector<std::uint8_t>{0, 1, 0});
    CHECK_FALSE(c.sentences[0].emotion.has_value());
}

TEST_CASE("empty file gives an empty corpus") {
    TempDir dir;
    testutil::write_file(dir / "e.jsonl", "");
    testutil::write_file(dir / "e.tsv", "");
    CHECK(load_corpus(dir / "e.jsonl", CorpusFormat::Jsonl).empty());
    CHECK(load_corpus(dir / "e.tsv", CorpusFormat::Tsv).empty());
}

TEST_CASE("mask length mismatch names the line") {
    TempDir dir;
    testutil::write_file(dir / "c.jsonl",
                         R"({"id":"a","lang":"en","tokens":["x"],"origin":"D_S"})"
                         "\n"
                         R"({"id":"b","lang":"en","tokens":["a","b","c"],"mask":[0,1],"origin":"D_S"})"
                         "\n");
    CHECK_THROWS_WITH_AS(load_corpus(dir / "c.jsonl", CorpusFormat::Jsonl),
                         doctest::Contains("mask length mismatch at line 2"), CorpusError);
}

TEST_CASE("schema violations are reported with field and line") {
    TempDir dir;
    auto fails = [&](const std::string& line, const std::string& needle) {
        testutil::write_file(dir / "bad.jsonl", line + "\n");
        CHECK_THROWS_WITH_AS(load_corpus(dir / "bad.jsonl", CorpusFormat::Jsonl),
                             doctest::Contains(needle.c_str()), CorpusError);
    };
    fails(R"({"id":"a","lang":"en","tokens":[],"origin":"D_S"})", "tokens");
    fails(R"({"id":"a","lang":"en","tokens":["a b"],"origin":"D_S"})", "whitespace");
    fails(R"({"id":"a","lang":"de","tokens":["a"],"origin":"D_T"})", "lang");
    fails(R"({"id":"a","lang":"es","tokens":["a"],"origin":"D_S"})", "origin");
    fails(R"({"id":"a","lang":"en","tokens":["a"],"origin":"D_T"})", "origin");
    fails(R"({"id":"a","lang":"en","tokens":["a"],"emotion":"Happy","origin":"D_S"})", "emotion");
    fails(R"({"id":"a","lang":"en","tokens":["a"],"mask":[2],"origin":"D_S"})", "mask");
    fails(R"({"id":"a","lang":"en","tokens":["a"]})", "origin");
    fails("not json", "line 1");
    testutil::write_file(dir / "dup.jsonl",
                         R"({"id":"a","lang":"en","tokens":["a"],"origin":"D_S"})"
                         "\n"
                         R"({"id":"a","lang":"en","tokens":["b"],"origin":"D_S"})"
                         "\n");
    CHECK_THROWS_AS(load_corpus(dir / "dup.jsonl", CorpusFormat::Jsonl), CorpusError);
}

TEST_CASE("tokens are NFC-normalized on load") {
    TempDir dir;
    // "e" + combining acute accent
    testutil::write_file(dir / "n.jsonl",
                         "{\"id\":\"a\",\"lang\":\"en\",\"tokens\":[\"cafe\xCC\x81\"],\"origin\":\"D_S\"}\n");
    const auto c = load_corpus(dir / "n.jsonl", CorpusFormat::Jsonl);
    CHECK(c.sentences[0].tokens[0] == "caf\xC3\xA9");
}

TEST_CASE("save/load round-trip in both formats") {
    TempDir dir;
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const auto c = random_corpus(rng, rng.below(30));
        for (auto fmt : {CorpusFormat::Jsonl, CorpusFormat::Tsv}) {
            const auto p = dir / (fmt == CorpusFormat::Jsonl ? "r.jsonl" : "r.tsv");
            save_corpus(c, p, fmt);
            CHECK(load_corpus(p, fmt) == c);
        }
    }
}

TEST_CASE("absent emotion stays absent") {
    TempDir dir;
    Corpus c;
    c.sentences.push_back(sentence("a", {"x", "y"}));
    save_corpus(c, dir / "c.jsonl", CorpusFormat::Jsonl);
    CHECK(testutil::read_file(dir / "c.jsonl").find("emotion") == std::string::npos);
    CHECK_FALSE(load_corpus(dir / "c.jsonl", CorpusFormat::Jsonl).sentences[0].emotion.has_value());
}

TEST_CASE("provenance travels in a sidecar") {
    TempDir dir;
    Corpus c;
    c.sentences.push_back(sentence("a", {"x"}));
    c.provenance["split_seed"] = "42";
    save_corpus(c, dir / "c.jsonl", CorpusFormat::Jsonl);
    CHECK(std::filesystem::exists(provenance_path(dir / "c.jsonl")));
    CHECK(load_corpus(dir / "c.jsonl", CorpusFormat::Jsonl).provenance == c.provenance);
}

TEST_CASE("tab inside a token cannot be written as TSV") {
    TempDir dir;
    Corpus c;
    c.sentences.push_back(sentence("a", {"x\ty"}));
    CHECK_THROWS_WITH_AS(save_corpus(c, dir / "c.tsv", CorpusFormat::Tsv),
                         doctest::Contains("token contains delimiter"), CorpusError);
}

TEST_CASE("unwritable path is an I/O error") {
    Corpus c;
    c.sentences.push_back(sentence("a", {"x"}));
    CHECK_THROWS_AS(save_corpus(c, "/nonexistent-dir/x/c.jsonl", CorpusFormat::Jsonl), IoError);
}

TEST_CASE("TSV layout") {
    TempDir dir;
    Corpus c;
    c.sentences.push_back(sentence("a", {"I", "love", "you"}, EmotionLabel::Love, std::vector<std::uint8_t>{0, 1, 0}));
    save_corpus(c, dir / "c.tsv", CorpusFormat::Tsv);
    CHECK(testutil::read_file(dir / "c.tsv") ==
          "# id=a lang=en emotion=Love origin=D_S\nI\t0\nlove\t1\nyou\t0\n");
}

TEST_CASE("split sizes follow round-half-up") {
    CHECK(validation_size(5000, 0.10) == 500);
    CHECK(validation_size(10, 0.10) == 1);
    CHECK(validation_size(5, 0.10) == 1);  // 0.5 rounds up
    CHECK(validation_size(4, 0.10) == 0);
    CHECK(validation_size(15, 0.10) == 2);  // 1.5 rounds up
}

TEST_CASE("split of 5000 sentences gives 4500 + 500") {
    Corpus c;
    for (int i = 0; i < 5000; ++i) c.sentences.push_back(sentence("s" + std::to_string(i), {"w"}));
    auto [train, val] = split_train_validation(c, 0.10, 42);
    CHECK(train.size() == 4500);
    CHECK(val.size() == 500);
    CHECK(val.provenance.at("split_seed") == "42");
    CHECK(val.provenance.at("split_stratified") == "false");
}

TEST_CASE("split is deterministic and seed-dependent") {
    Corpus c;
    for (int i = 0; i < 10; ++i) c.sentences.push_back(sentence("s" + std::to_string(i), {"w"}));
    CHECK(split_train_validation(c, 0.1, 7) == split_train_validation(c, 0.1, 7));
    // Enumerated for this fixed seed pair: the held-out sentence differs.
    const auto v1 = split_train_validation(c, 0.1, 1).second;
    const auto v2 = split_train_validation(c, 0.1, 2).second;
    REQUIRE(v1.size() == 1);
    REQUIRE(v2.size() == 1);
    CHECK(v1.sentences[0].id != v2.sentences[0].id);
}

TEST_CASE("split rejects fractions outside (0,1)") {
    Corpus c;
    c.sentences.push_back(sentence("a", {"w"}));
    for (double f : {0.0, 1.0, -0.1, 1.5}) CHECK_THROWS_AS(split_train_validation(c, f, 1), ConfigError);
}

TEST_CASE("property: split is a partition of the right size") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(10000);
        const double fraction = 0.01 + 0.98 * rng.uniform();
        Corpus c;
        c.sentences.reserve(n);
        for (std::size_t i = 0; i < n; ++i) c.sentences.push_back(sentence(std::to_string(i), {"w"}));
        const auto [train, val] = split_train_validation(c, fraction, rng.next());
        REQUIRE(val.size() == validation_size(n, fraction));
        REQUIRE(train.size() + val.size() == n);
        std::set<std::string> seen;
        for (const auto& s : train.sentences) seen.insert(s.id);
        for (const auto& s : val.sentences) seen.insert(s.id);
        REQUIRE(seen.size() == n);
        // Both parts keep input order.
        auto ordered = [](const Corpus& part) {
            return std::is_sorted(part.sentences.begin(), part.sentences.end(),
                                  [](const auto& a, const auto& b) { return std::stoul(a.id) < std::stoul(b.id); });
        };
        REQUIRE(ordered(train));
        REQUIRE(ordered(val));
    }
}

TEST_CASE("label distribution") {
    Corpus c;
    CHECK(label_distribution(c) == LabelCounts{});
    c.sentences.push_back(sentence("a", {"w"}, EmotionLabel::Joy));
    c.sentences.push_back(sentence("b", {"w"}, EmotionLabel::Joy));
    c.sentences.push_back(sentence("c", {"w"}, EmotionLabel::Fear));
    const auto d = label_distribution(c);
    CHECK(d[static_cast<std::size_t>(EmotionLabel::Joy)] == 2);
    CHECK(d[static_cast<std::size_t>(EmotionLabel::Fear)] == 1);
    c.sentences.push_back(sentence("missing-1", {"w"}));
    CHECK_THROWS_WITH_AS(label_distribution(c), doctest::Contains("missing-1"), CorpusError);
}

TEST_CASE("property: label counts sum to the labeled sentences") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Corpus c;
        const std::size_t n = rng.below(200);
        for (std::size_t i = 0; i < n; ++i) {
            c.sentences.push_back(sentence(std::to_string(i), {"w"}, kAllEmotions[rng.below(6)]));
        }
        const auto d = label_distribution(c);
        std::size_t sum = 0;
        for (auto v : d) sum += v;
        CHECK(sum == n);
    }
}
