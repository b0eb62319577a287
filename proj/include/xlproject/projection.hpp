// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "xlproject/corpus.hpp"
#include "xlproject/translate.hpp"

// Alignment-free label projection. Trigger spans are wrapped in distinct
// symbol pairs, the marked text goes through machine translation, and the
// spans are read back from wherever the symbols ended up. Sentences whose
// symbols do not survive translation intact are discarded.

namespace xlproject::projection {

struct MarkerPair {
    std::string open;
    std::string close;
    bool operator==(const MarkerPair&) const = default;
};

class MarkerScheme {
  public:
    // Throws ConfigError unless all symbols are distinct, non-empty, free of
    // whitespace, and none is a substring of another.
    explicit MarkerScheme(std::vector<MarkerPair> pairs);

    // [] {} <> () «» ⟦⟧ ⟨⟩ ⌈⌉
    static MarkerScheme default_scheme();

    // Space-separated pairs, each pair written as its two symbols
    // concatenated when both are single code points ("[] {} «»"), or as
    // "open|close" otherwise.
    static MarkerScheme parse(std::string_view text);
    std::string to_string() const;

    const std::vector<MarkerPair>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    const MarkerPair& operator[](std::size_t i) const { return pairs_[i]; }

    std::vector<std::string> symbols() const;

  private:
    std::vector<MarkerPair> pairs_;
};

// Token range [start, end) marked with scheme pair `marker_index`.
struct TriggerSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t marker_index = 0;

    std::size_t length() const { return end - start; }
    bool operator==(const TriggerSpan&) const = default;
};

struct MarkedSentence {
    std::string text;
    std::vector<TriggerSpan> spans;
    std::string source_id;
};

enum class DiscardReason : std::uint8_t {
    MissingMarker,
    UnbalancedMarker,
    ReorderedMarker,
    TooManySpans,
    EmptySpan,
};

std::string_view to_string(DiscardReason reason);
std::optional<DiscardReason> parse_discard_reason(std::string_view text);

struct Discarded {
    DiscardReason reason;
    bool operator==(const Discarded&) const = default;
};

struct ExtractedSpan {
    std::size_t marker_index = 0;
    std::string text;
    bool operator==(const ExtractedSpan&) const = default;
};

struct Extraction {
    std::string clean_text;
    // In text order.
    std::vector<ExtractedSpan> extracted;
    // Whitespace tokens of clean_text and the token range each extracted span
    // occupies (same order as `extracted`). Marker symbols act as token
    // boundaries, so span tokens never merge with their neighbours.
    std::vector<std::string> tokens;
    std::vector<TriggerSpan> token_spans;
};

struct Projected {
    AnnotatedSentence sentence;
    std::vector<TriggerSpan> source_spans;
    std::vector<TriggerSpan> target_spans;
};

using ProjectionOutcome = std::variant<Projected, Discarded>;

// Maximal runs of 1s, marker indices 0, 1, 2, ... left to right.
std::vector<TriggerSpan> spans_from_mask(std::span<const std::uint8_t> mask);

// Inserts the open symbol before and the close symbol after each span, as
// standalone space-separated tokens. Pairs with a symbol that already occurs
// in the sentence are skipped, so a span may get a later pair than its
// ordinal. Discarded(TooManySpans) when the scheme runs out of pairs.
std::variant<MarkedSentence, Discarded> mark_sentence(const AnnotatedSentence& sentence,
                                                      const MarkerScheme& scheme);

// Finds each expected pair exactly once, open before close, with pairs
// neither nested nor interleaved and non-empty contents.
std::variant<Extraction, Discarded> extract_markers(std::string_view translated_text,
                                                    std::span<const std::size_t> expected,
                                                    const MarkerScheme& scheme);

// Re-marks `source` with `scheme` to learn which pairs to expect, then reads
// the spans out of `translated_text`. The projected sentence keeps the
// source's emotion and id root; origin becomes D_T.
ProjectionOutcome project_labels(const AnnotatedSentence& source,
                                 std::string_view translated_text, const MarkerScheme& scheme,
                                 const std::string& target_lang);

// Id given to the translation of `source_id` into `lang`.
std::string projected_id(std::string_view source_id, std::string_view lang);

// -- corpus-level projection ----------------------------------------------

struct DiscardRecord {
    std::string id;
    DiscardReason reason;
    std::string translated_text;
    bool operator==(const DiscardRecord&) const = default;
};

// Span correspondence between a D_S sentence and its projected D_T sentence;
// the input for trigger switching.
struct AlignmentRecord {
    std::string id;         // D_T sentence id
    std::string source_id;  // D_S sentence id
    std::vector<TriggerSpan> source_spans;
    std::vector<TriggerSpan> target_spans;
    bool operator==(const AlignmentRecord&) const = default;
};

struct ProjectionRun {
    Corpus target;
    std::vector<DiscardRecord> discards;
    std::vector<AlignmentRecord> alignments;
};

struct ProjectionOptions {
    std::string source_lang = "en";
    std::vector<std::string> target_langs;
    translate::BatchOptions batch;
};

// Translates every sentence into every target language. Sentences with a
// trigger mask go through marking and extraction; sentences without one are
// translated as plain text and keep their emotion label.
ProjectionRun project_corpus(const Corpus& source, const MarkerScheme& scheme,
                             translate::TranslationBackend& backend,
                             translate::TranslationCache& cache,
                             const ProjectionOptions& options);

void save_discards(const std::vector<DiscardRecord>& records, const std::filesystem::path& path);
std::vector<DiscardRecord> load_discards(const std::filesystem::path& path);

void save_alignments(const std::vector<AlignmentRecord>& records,
                     const std::filesystem::path& path);
std::vector<AlignmentRecord> load_alignments(const std::filesystem::path& path);

}  // namespace xlproject::projection
