// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/synthetic.hpp"

#include <algorithm>
#include <set>

#include "xlproject/hashing.hpp"
#include "xlproject/random.hpp"

namespace xlproject::synthetic {
namespace {

const std::vector<std::string> kStems = {"sun", "rain", "star", "moon", "wind", "fire", "song", "rose"};

char sentinel_letter(EmotionLabel label) {
    switch (label) {
        case EmotionLabel::Love: return 'l';
        case EmotionLabel::Joy: return 'j';
        case EmotionLabel::Fear: return 'f';
        case EmotionLabel::Anger: return 'a';
        case EmotionLabel::Sadness: return 's';
        case EmotionLabel::Neutral: break;
    }
    return '\0';
}

// Latin pseudo-word for `word` in `lang`, stable across runs.
std::string pseudo_word(const std::string& word, const std::string& lang) {
    static const char* kSyllables[] = {"ka", "lo", "mi", "ne", "ru", "ta", "vi", "do",
                                       "pe", "sa", "bu", "ge", "ho", "ji", "fu", "we"};
    std::uint64_t h = hash64(lang + ":" + word, 0x5eed);
    const std::size_t n = 2 + (h & 1);
    h >>= 1;
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        out += kSyllables[h & 15];
        h >>= 4;
    }
    return out;
}

std::string to_cyrillic(const std::string& latin) {
    std::string out;
    for (char c : latin) {
        switch (c) {
            case 'a': out += "а"; break;
            case 'b': out += "б"; break;
            case 'd': out += "д"; break;
            case 'e': out += "е"; break;
            case 'f': out += "ф"; break;
            case 'g': out += "г"; break;
            case 'h': out += "х"; break;
            case 'i': out += "и"; break;
            case 'j': out += "й"; break;
            case 'k': out += "к"; break;
            case 'l': out += "л"; break;
            case 'm': out += "м"; break;
            case 'n': out += "н"; break;
            case 'o': out += "о"; break;
            case 'p': out += "п"; break;
            case 'r': out += "р"; break;
            case 's': out += "с"; break;
            case 't': out += "т"; break;
            case 'u': out += "у"; break;
            case 'v': out += "в"; break;
            case 'w': out += "ш"; break;
            default: out += c;
        }
    }
    return out;
}

std::string translate_word(const std::string& word, const std::string& lang) {
    std::string base = word;
    std::string sentinel;
    if (const auto at = word.find("qz"); at != std::string::npos) {
        base = word.substr(0, at);
        sentinel = word.substr(at);
    }
    std::string out = pseudo_word(base, lang);
    if (lang == "ru") out = to_cyrillic(out);
    return out + sentinel;
}

}  // namespace

const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {
        "the",   "a",     "we",    "they",  "saw",   "walked", "near",  "over",  "house",
        "river", "road",  "table", "city",  "today", "then",   "with",  "and",   "old",
        "green", "small", "after", "that",  "train", "paper",  "was",   "is",    "her",
        "his",   "our",   "one",   "bird",  "door",  "window", "quiet", "long",  "before",
    };
    return words;
}

std::vector<std::string> trigger_words(EmotionLabel label) {
    const char letter = sentinel_letter(label);
    if (letter == '\0') return {};
    std::vector<std::string> out;
    for (const auto& stem : kStems) out.push_back(stem + "qz" + letter);
    return out;
}

Corpus generate_corpus(const FixtureOptions& o) {
    Rng rng(o.seed);
    const auto& filler = filler_words();
    Corpus corpus;
    for (std::size_t n = 0; n < o.sentences; ++n) {
        const auto label = kAllEmotions[rng.below(kNumEmotions)];
        const std::size_t length = o.min_filler + rng.below(o.max_filler - o.min_filler + 1);
        std::vector<std::string> words;
        for (std::size_t i = 0; i < length; ++i) words.push_back(filler[rng.below(filler.size())]);

        // Spans go into distinct gaps between filler words, so no two spans
        // are adjacent.
        std::set<std::size_t> gaps;
        const auto triggers = trigger_words(label);
        if (!triggers.empty()) {
            const std::size_t spans = rng.uniform() < o.two_span_probability ? 2 : 1;
            while (gaps.size() < spans) gaps.insert(rng.below(length + 1));
        }
        AnnotatedSentence s;
        s.id = o.id_prefix + "-" + std::to_string(n);
        s.language = "en";
        s.emotion = label;
        s.origin = DatasetTag::DS;
        std::vector<std::uint8_t> mask;
        for (std::size_t i = 0; i <= length; ++i) {
            if (gaps.contains(i)) {
                const std::size_t span_len = rng.uniform() < o.two_word_span_probability ? 2 : 1;
                for (std::size_t k = 0; k < span_len; ++k) {
                    s.tokens.push_back(triggers[rng.below(triggers.size())]);
                    mask.push_back(1);
                }
            }
            if (i < length) {
                s.tokens.push_back(words[i]);
                mask.push_back(0);
            }
        }
        s.trigger_mask = std::move(mask);
        corpus.sentences.push_back(std::move(s));
    }
    corpus.provenance["generator"] = "synthetic";
    corpus.provenance["generator_seed"] = std::to_string(o.seed);
    return corpus;
}

translate::DictionaryBackend::Dictionary generate_dictionary() {
    std::vector<std::string> vocab = filler_words();
    for (auto label : kAllEmotions) {
        for (auto& w : trigger_words(label)) vocab.push_back(w);
    }
    // Words that translate into two target words.
    static const std::set<std::string> kExpand = {"today", "window", "sunqzj", "rainqzs", "fireqza"};

    translate::DictionaryBackend::Dictionary dict;
    for (const std::string lang : {"es", "fr", "nl", "ru"}) {
        auto& table = dict[lang];
        for (const auto& w : vocab) {
            std::string t = translate_word(w, lang);
            if (kExpand.contains(w)) {
                std::string prefix = pseudo_word("pre-" + w, lang);
                if (lang == "ru") prefix = to_cyrillic(prefix);
                t = prefix + " " + t;
            }
            table[w] = t;
        }
    }
    return dict;
}

}  // namespace xlproject::synthetic
