// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"
#include "xlproject/llm_response.hpp"
#include "xlproject/metrics.hpp"
#include "xlproject/pipeline.hpp"
#include "xlproject/synthetic.hpp"

using namespace xlproject;
using testutil::TempDir;
using json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result xl(std::vector<std::string> args) {
    args.insert(args.begin(), "xlproject");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t line_count(const std::filesystem::path& p) {
    const auto text = testutil::read_file(p);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

AnnotatedSentence labeled(std::string id, std::vector<std::string> tokens, EmotionLabel e,
                          std::vector<std::uint8_t> mask) {
    AnnotatedSentence s;
    s.id = std::move(id);
    s.language = "en";
    s.tokens = std::move(tokens);
    s.emotion = e;
    s.trigger_mask = std::move(mask);
    return s;
}

}  // namespace

TEST_CASE("LLM response parsing") {
    using cli::parse_llm_response;
    CHECK(parse_llm_response("Label: Joy") == EmotionLabel::Joy);
    CHECK(parse_llm_response("label:  'sadness'.") == EmotionLabel::Sadness);
    CHECK(parse_llm_response("Sure! LABEL: \"Anger\"") == EmotionLabel::Anger);
    CHECK(parse_llm_response("Label: neutral\nLabel: Joy") == EmotionLabel::Neutral);
    CHECK_THROWS_AS(parse_llm_response("I think it is happy"), cli::LlmParseError);
    CHECK_THROWS_AS(parse_llm_response("Label: happy"), cli::LlmParseError);
    CHECK_THROWS_AS(parse_llm_response("Label: Joyful"), cli::LlmParseError);
    CHECK_THROWS_AS(parse_llm_response(""), cli::LlmParseError);
    try {
        parse_llm_response("Label: happy");
    } catch (const cli::LlmParseError& e) {
        CHECK(e.text() == "Label: happy");
    }
}

TEST_CASE("help and usage errors") {
    const auto help = xl({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("Exit codes") != std::string::npos);
    CHECK(help.out.find("XLPROJECT_MT_API_KEY") != std::string::npos);
    CHECK(xl({}).code == cli::kExitConfig);
    CHECK(xl({"frobnicate"}).code == cli::kExitConfig);
}

TEST_CASE("split 5000 sentences") {
    TempDir dir;
    synthetic::FixtureOptions o;
    o.sentences = 5000;
    save_corpus(synthetic::generate_corpus(o), dir / "en.jsonl", CorpusFormat::Jsonl);
    const auto r = xl({"split", "--input", (dir / "en.jsonl").string(), "--output",
                        (dir / "out").string(), "--fraction", "0.10", "--seed", "42"});
    REQUIRE(r.code == 0);
    CHECK(line_count(dir / "out/train.jsonl") == 4500);
    CHECK(line_count(dir / "out/validation.jsonl") == 500);
    const auto prov = load_corpus(dir / "out/train.jsonl", CorpusFormat::Jsonl).provenance;
    CHECK(prov.at("command") == "split");
    CHECK(prov.at("seed") == "42");
    CHECK(prov.at("config_sha256").size() == 64);
    CHECK(prov.at("input_sha256.input").size() == 64);
}

TEST_CASE("config file values sit between flags and defaults") {
    TempDir dir;
    synthetic::FixtureOptions o;
    o.sentences = 100;
    save_corpus(synthetic::generate_corpus(o), dir / "en.jsonl", CorpusFormat::Jsonl);
    testutil::write_file(dir / "cfg.json", R"({"fraction": 0.5, "seed": 3})");
    const std::string in = (dir / "en.jsonl").string();
    REQUIRE(xl({"split", "--input", in, "--output", (dir / "a").string(), "--config",
                 (dir / "cfg.json").string()})
                .code == 0);
    CHECK(line_count(dir / "a/validation.jsonl") == 50);
    CHECK(load_corpus(dir / "a/train.jsonl", CorpusFormat::Jsonl).provenance.at("seed") == "3");
    REQUIRE(xl({"split", "--input", in, "--output", (dir / "b").string(), "--config",
                 (dir / "cfg.json").string(), "--fraction", "0.2"})
                .code == 0);
    CHECK(line_count(dir / "b/validation.jsonl") == 20);
    REQUIRE(xl({"split", "--input", in, "--output", (dir / "c").string()}).code == 0);
    CHECK(line_count(dir / "c/validation.jsonl") == 10);

    testutil::write_file(dir / "bad.json", R"({"fraction": "lots"})");
    CHECK(xl({"split", "--input", in, "--output", (dir / "d").string(), "--config",
               (dir / "bad.json").string()})
              .code == cli::kExitConfig);
}

TEST_CASE("identity projection keeps every mask") {
    TempDir dir;
    synthetic::FixtureOptions o;
    o.sentences = 50;
    const auto src = synthetic::generate_corpus(o);
    save_corpus(src, dir / "en.jsonl", CorpusFormat::Jsonl);
    const auto r = xl({"project", "--input", (dir / "en.jsonl").string(), "--output",
                        (dir / "es.jsonl").string(), "--backend", "identity", "--tgt", "es", "--cache",
                        (dir / "cache").string()});
    REQUIRE(r.code == 0);
    const auto tgt = load_corpus(dir / "es.jsonl", CorpusFormat::Jsonl);
    REQUIRE(tgt.size() == src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
        CHECK(tgt.sentences[i].tokens == src.sentences[i].tokens);
        CHECK(tgt.sentences[i].trigger_mask == src.sentences[i].trigger_mask);
        CHECK(tgt.sentences[i].language == "es");
    }
    CHECK(line_count(dir / "es.jsonl.discards.jsonl") == 0);
}

TEST_CASE("evaluate report matches oracle values") {
    TempDir dir;
    Corpus gold;
    gold.sentences.push_back(labeled("a", {"I", "love", "you"}, EmotionLabel::Love, {0, 1, 0}));
    gold.sentences.push_back(labeled("b", {"so", "sad", "now", "ok"}, EmotionLabel::Sadness, {0, 1, 1, 0}));
    gold.sentences.push_back(labeled("c", {"just", "words"}, EmotionLabel::Neutral, {0, 0}));
    Corpus pred = gold;
    pred.sentences[1].emotion = EmotionLabel::Love;
    pred.sentences[1].trigger_mask = {0, 1, 0, 1};
    save_corpus(gold, dir / "gold.jsonl", CorpusFormat::Jsonl);
    save_corpus(pred, dir / "pred.jsonl", CorpusFormat::Jsonl);
    testutil::write_file(dir / "num.jsonl",
                         "{\"id\":\"a\",\"numeric\":[0.2,0.6,0.2]}\n"
                         "{\"id\":\"b\",\"numeric\":[0.1,0.4,0.3,0.2]}\n"
                         "{\"id\":\"c\",\"numeric\":[0.5,0.5]}\n");

    const auto r = xl({"evaluate", "--gold", (dir / "gold.jsonl").string(), "--input",
                        (dir / "pred.jsonl").string(), "--attributions", (dir / "num.jsonl").string(),
                        "--output", (dir / "report.json").string(), "--confusion-csv",
                        (dir / "cm.csv").string()});
    REQUIRE(r.code == 0);
    const auto report = json::parse(testutil::read_file(dir / "report.json"));

    // Oracles: Love P=1/2 R=1 F=2/3; Sadness F=0; Neutral F=1.
    CHECK(report["macro_f1"].get<double>() == doctest::Approx((2.0 / 3.0 + 0.0 + 1.0) / 3.0));
    // Instance token F1: 1, 2*1/(2+1+1)=0.5, 1.
    CHECK(report["token_f1"].get<double>() == doctest::Approx((1.0 + 0.5 + 1.0) / 3.0));
    // Accumulated importance over instances with triggers: 0.6 and 0.7.
    CHECK(report["accumulated_importance"].get<double>() == doctest::Approx(0.65));
    CHECK(report["skipped_no_trigger"] == 1);
    CHECK(report["provenance"]["command"] == "evaluate");
    CHECK(testutil::read_file(dir / "cm.csv").find("Sadness,1,0,0,0,0,0") != std::string::npos);

    // Labels-only evaluation scores emotion and leaves the token metrics empty.
    testutil::write_file(dir / "labels.tsv", "a\tLove\nb\tSadness\nc\tJoy\n");
    const auto r2 = xl({"evaluate", "--gold", (dir / "gold.jsonl").string(), "--labels",
                         (dir / "labels.tsv").string(), "--output", (dir / "r2.json").string()});
    REQUIRE(r2.code == 0);
    const auto rep2 = json::parse(testutil::read_file(dir / "r2.json"));
    CHECK(rep2["macro_f1"].get<double>() == doctest::Approx((1.0 + 1.0 + 0.0 + 0.0) / 4.0));
    CHECK(rep2["token_f1"].is_null());
}

TEST_CASE("exit codes by error category") {
    TempDir dir;
    synthetic::FixtureOptions o;
    o.sentences = 20;
    save_corpus(synthetic::generate_corpus(o), dir / "en.jsonl", CorpusFormat::Jsonl);
    const std::string in = (dir / "en.jsonl").string();

    CHECK(xl({"train", "--input", in, "--output", (dir / "m.bin").string(), "--task", "emotion",
               "--lr", "0.1"})
              .code == cli::kExitConfig);
    CHECK(xl({"split", "--input", (dir / "missing.jsonl").string(), "--output", (dir / "x").string()})
              .code == cli::kExitData);
    testutil::write_file(dir / "broken.jsonl", "{not json\n");
    CHECK(xl({"split", "--input", (dir / "broken.jsonl").string(), "--output", (dir / "x").string()})
              .code == cli::kExitData);
    const auto remote = xl({"project", "--input", in, "--output", (dir / "es.jsonl").string(),
                             "--backend", "remote", "--endpoint", "http://127.0.0.1:1/translate",
                             "--tgt", "es", "--cache", (dir / "cache").string()});
    CHECK(remote.code == cli::kExitBackend);
    CHECK(remote.err.find("backend error") != std::string::npos);
}

TEST_CASE("train, predict and evaluate through the CLI") {
    TempDir dir;
    synthetic::FixtureOptions o;
    o.sentences = 120;
    save_corpus(synthetic::generate_corpus(o), dir / "en.jsonl", CorpusFormat::Jsonl);
    const std::string in = (dir / "en.jsonl").string();
    const auto t = xl({"train", "--input", in, "--validation", in, "--output", (dir / "m.bin").string(),
                        "--task", "trigger", "--epochs", "2", "--feature-bits", "12"});
    REQUIRE(t.code == 0);
    CHECK(t.out.find("epoch 1 loss") != std::string::npos);
    CHECK(t.out.find("best epoch") != std::string::npos);
    REQUIRE(xl({"predict", "--model", (dir / "m.bin").string(), "--input", in, "--output",
                 (dir / "p.jsonl").string()})
                .code == 0);
    CHECK(line_count(dir / "p.jsonl.numeric.jsonl") == 120);
    const auto e = xl({"evaluate", "--gold", in, "--input", (dir / "p.jsonl").string(),
                        "--attributions", (dir / "p.jsonl.numeric.jsonl").string()});
    REQUIRE(e.code == 0);
    const auto report = json::parse(e.out);
    CHECK(report["token_f1"].get<double>() > 0.9);
    CHECK(report["accumulated_importance"].get<double>() > 0.0);
}

TEST_CASE("parse-llm writes labels and an error sidecar") {
    TempDir dir;
    testutil::write_file(dir / "resp.tsv", "a\tLabel: Joy\nb\tno idea\nc\tlabel: 'fear'\n");
    const std::string out = (dir / "labels.tsv").string();
    REQUIRE(xl({"parse-llm", "--input", (dir / "resp.tsv").string(), "--output", out}).code == 0);
    CHECK(testutil::read_file(out) == "a\tJoy\nc\tFear\n");
    const auto errors = testutil::read_file(out + ".errors.tsv");
    CHECK(errors.rfind("b\t", 0) == 0);
    REQUIRE(xl({"parse-llm", "--input", (dir / "resp.tsv").string(), "--output", out,
                 "--fallback-neutral"})
                .code == 0);
    CHECK(testutil::read_file(out) == "a\tJoy\nb\tNeutral\nc\tFear\n");
}
