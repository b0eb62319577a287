// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xlproject {

enum class EmotionLabel : std::uint8_t { Love, Joy, Fear, Anger, Sadness, Neutral };

inline constexpr std::size_t kNumEmotions = 6;
inline constexpr std::array<EmotionLabel, kNumEmotions> kAllEmotions = {
    EmotionLabel::Love,  EmotionLabel::Joy,     EmotionLabel::Fear,
    EmotionLabel::Anger, EmotionLabel::Sadness, EmotionLabel::Neutral,
};

std::string_view to_string(EmotionLabel label);
std::optional<EmotionLabel> parse_emotion(std::string_view text);

// Where a sentence came from: the original English set, its machine
// translation, or one of the two trigger-switched bilingual sets.
enum class DatasetTag : std::uint8_t { DS, DT, DSt, DTs };

inline constexpr std::array<DatasetTag, 4> kAllDatasetTags = {
    DatasetTag::DS, DatasetTag::DT, DatasetTag::DSt, DatasetTag::DTs};

std::string_view to_string(DatasetTag tag);
std::optional<DatasetTag> parse_dataset_tag(std::string_view text);

// The five task languages.
inline constexpr std::array<std::string_view, 5> kLanguages = {"en", "nl", "ru", "es", "fr"};
bool is_supported_language(std::string_view code);

struct AnnotatedSentence {
    std::string id;
    std::string language;
    std::vector<std::string> tokens;
    std::optional<EmotionLabel> emotion;
    std::optional<std::vector<std::uint8_t>> trigger_mask;
    DatasetTag origin = DatasetTag::DS;
    // Set on trigger-switched rows, whose content mixes two languages while
    // `language` keeps the host sentence's code.
    bool bilingual = false;

    bool operator==(const AnnotatedSentence&) const = default;
};

struct Corpus {
    std::vector<AnnotatedSentence> sentences;
    std::map<std::string, std::string> provenance;

    std::size_t size() const { return sentences.size(); }
    bool empty() const { return sentences.empty(); }
    bool operator==(const Corpus&) const = default;
};

enum class CorpusFormat { Jsonl, Tsv };

std::optional<CorpusFormat> parse_corpus_format(std::string_view text);

// Schema violations and malformed input. The message names the line where
// the problem was found, when there is one.
class CorpusError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Checks the sentence invariants (non-empty whitespace-free tokens, mask
// length, language code, origin/language consistency). Throws CorpusError.
void validate_sentence(const AnnotatedSentence& s);

// Also checks id uniqueness.
void validate_corpus(const Corpus& corpus);

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format);

// Sidecar holding Corpus::provenance, written next to the corpus file.
std::filesystem::path provenance_path(const std::filesystem::path& corpus_path);

// Seeded shuffle, then the first round_half_up(fraction * N) sentences of the
// permutation form the validation set. Both halves keep the input order.
std::pair<Corpus, Corpus> split_train_validation(const Corpus& corpus, double fraction,
                                                 std::uint64_t seed);

std::size_t validation_size(std::size_t n, double fraction);

using LabelCounts = std::array<std::size_t, kNumEmotions>;

// Indexed by EmotionLabel. Throws CorpusError listing ids without a label.
LabelCounts label_distribution(const Corpus& corpus);

}  // namespace xlproject
