// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

// Writes the bundled synthetic corpora and the mock-translation dictionary.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "xlproject/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app("Generate the synthetic fixture", "make_fixture");
    std::string dir = "data";
    std::size_t train = 1200;
    std::size_t test = 300;
    std::uint64_t seed = 7;
    app.add_option("--output", dir, "Output directory");
    app.add_option("--train", train, "Training sentences");
    app.add_option("--test", test, "Held-out sentences");
    app.add_option("--seed", seed, "Generator seed");
    CLI11_PARSE(app, argc, argv);

    namespace fs = std::filesystem;
    using namespace xlproject;
    try {
        fs::create_directories(dir);
        synthetic::FixtureOptions o;
        o.sentences = train;
        o.seed = seed;
        o.id_prefix = "train";
        save_corpus(synthetic::generate_corpus(o), fs::path(dir) / "synthetic_en_train.jsonl",
                    CorpusFormat::Jsonl);
        o.sentences = test;
        o.seed = seed + 1;
        o.id_prefix = "test";
        save_corpus(synthetic::generate_corpus(o), fs::path(dir) / "synthetic_en_test.jsonl",
                    CorpusFormat::Jsonl);
        std::ofstream dict(fs::path(dir) / "dictionary.json");
        dict << nlohmann::json(synthetic::generate_dictionary()).dump(2) << "\n";
        if (!dict) throw std::runtime_error("cannot write dictionary");
    } catch (const std::exception& e) {
        std::cerr << "make_fixture: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
