// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "xlproject/corpus.hpp"
#include "xlproject/projection.hpp"

namespace xlproject::augment {

using projection::TriggerSpan;

// An English sentence, its projected translation, and the spans on each side
// that carry the same marker.
struct AlignedPair {
    AnnotatedSentence source;
    AnnotatedSentence target;
    std::vector<TriggerSpan> source_spans;
    std::vector<TriggerSpan> target_spans;
};

struct SwitchedPair {
    AnnotatedSentence source_host;  // x_St: source with target-language triggers
    AnnotatedSentence target_host;  // x_Ts: translation with source-language triggers
    std::vector<TriggerSpan> source_host_spans;
    std::vector<TriggerSpan> target_host_spans;
};

class SwitchError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Replaces every span in each sentence with the tokens of the span carrying
// the same marker in the other sentence. Throws SwitchError when the two
// span lists do not carry the same marker set or a span is out of range.
SwitchedPair switch_triggers(const AlignedPair& pair);

// Builds D_St and D_Ts from D_S, D_T, and the alignment sidecar produced by
// projection. Discarded sentences have no alignment record and contribute
// nothing.
std::pair<Corpus, Corpus> build_switched_corpora(
    const Corpus& source, const Corpus& target,
    const std::vector<projection::AlignmentRecord>& alignments);

struct CombinationSpec {
    std::vector<DatasetTag> include;  // canonical order, always starts with D_S

    // "D_S+D_T+D_St+D_Ts"; throws ConfigError on unknown/duplicate tags or
    // when D_S is missing.
    static CombinationSpec parse(std::string_view text);
    std::string to_string() const;
    bool contains(DatasetTag tag) const;
};

// Concatenates the included corpora in D_S, D_T, D_St, D_Ts order and
// suffixes every id with "#<tag>".
Corpus build_dataset(const CombinationSpec& spec, const std::map<DatasetTag, Corpus>& corpora);

}  // namespace xlproject::augment
