// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/augment.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "xlproject/errors.hpp"
#include "xlproject/unicode.hpp"

namespace xlproject::augment {
namespace {

struct HostResult {
    std::vector<std::string> tokens;
    std::vector<std::uint8_t> mask;
    std::vector<TriggerSpan> spans;
};

void check_spans(const std::vector<TriggerSpan>& spans, std::size_t length, const char* side) {
    std::size_t prev_end = 0;
    for (const auto& s : spans) {
        if (s.start >= s.end || s.end > length || s.start < prev_end) {
            throw SwitchError(std::string("corrupt pair: bad ") + side + " span");
        }
        prev_end = s.end;
    }
}

// Copies `host`, substituting each host span by the guest span with the same
// marker. The substituted tokens are the only ones marked.
HostResult substitute(const std::vector<std::string>& host, std::vector<TriggerSpan> host_spans,
                      const std::vector<std::string>& guest,
                      const std::vector<TriggerSpan>& guest_spans) {
    std::sort(host_spans.begin(), host_spans.end(),
              [](const TriggerSpan& a, const TriggerSpan& b) { return a.start < b.start; });
    std::unordered_map<std::size_t, const TriggerSpan*> by_marker;
    for (const auto& g : guest_spans) by_marker[g.marker_index] = &g;

    HostResult out;
    std::size_t cursor = 0;
    for (const auto& hs : host_spans) {
        for (; cursor < hs.start; ++cursor) {
            out.tokens.push_back(host[cursor]);
            out.mask.push_back(0);
        }
        const TriggerSpan& gs = *by_marker.at(hs.marker_index);
        const std::size_t start = out.tokens.size();
        for (std::size_t k = gs.start; k < gs.end; ++k) {
            out.tokens.push_back(guest[k]);
            out.mask.push_back(1);
        }
        out.spans.push_back({start, out.tokens.size(), hs.marker_index});
        cursor = hs.end;
    }
    for (; cursor < host.size(); ++cursor) {
        out.tokens.push_back(host[cursor]);
        out.mask.push_back(0);
    }
    return out;
}

}  // namespace

SwitchedPair switch_triggers(const AlignedPair& pair) {
    if (pair.source_spans.size() != pair.target_spans.size()) {
        throw SwitchError("corrupt pair '" + pair.target.id + "': span counts differ");
    }
    std::set<std::size_t> src_markers;
    std::set<std::size_t> tgt_markers;
    for (const auto& s : pair.source_spans) src_markers.insert(s.marker_index);
    for (const auto& s : pair.target_spans) tgt_markers.insert(s.marker_index);
    if (src_markers != tgt_markers || src_markers.size() != pair.source_spans.size()) {
        throw SwitchError("corrupt pair '" + pair.target.id + "': marker indices do not match");
    }
    auto sorted = [](std::vector<TriggerSpan> v) {
        std::sort(v.begin(), v.end(),
                  [](const TriggerSpan& a, const TriggerSpan& b) { return a.start < b.start; });
        return v;
    };
    check_spans(sorted(pair.source_spans), pair.source.tokens.size(), "source");
    check_spans(sorted(pair.target_spans), pair.target.tokens.size(), "target");

    auto st = substitute(pair.source.tokens, pair.source_spans, pair.target.tokens, pair.target_spans);
    auto ts = substitute(pair.target.tokens, pair.target_spans, pair.source.tokens, pair.source_spans);

    SwitchedPair out;
    out.source_host.id = pair.target.id + "/St";
    out.source_host.language = pair.source.language;
    out.source_host.tokens = std::move(st.tokens);
    out.source_host.trigger_mask = std::move(st.mask);
    out.source_host.emotion = pair.source.emotion;
    out.source_host.origin = DatasetTag::DSt;
    out.source_host.bilingual = true;
    out.source_host_spans = std::move(st.spans);

    out.target_host.id = pair.target.id + "/Ts";
    out.target_host.language = pair.target.language;
    out.target_host.tokens = std::move(ts.tokens);
    out.target_host.trigger_mask = std::move(ts.mask);
    out.target_host.emotion = pair.source.emotion;
    out.target_host.origin = DatasetTag::DTs;
    out.target_host.bilingual = true;
    out.target_host_spans = std::move(ts.spans);
    return out;
}

std::pair<Corpus, Corpus> build_switched_corpora(
    const Corpus& source, const Corpus& target,
    const std::vector<projection::AlignmentRecord>& alignments) {
    std::unordered_map<std::string_view, const AnnotatedSentence*> src_by_id;
    std::unordered_map<std::string_view, const AnnotatedSentence*> tgt_by_id;
    for (const auto& s : source.sentences) src_by_id[s.id] = &s;
    for (const auto& s : target.sentences) tgt_by_id[s.id] = &s;

    Corpus st;
    Corpus ts;
    st.provenance = target.provenance;
    ts.provenance = target.provenance;
    for (const auto& rec : alignments) {
        auto src = src_by_id.find(rec.source_id);
        auto tgt = tgt_by_id.find(rec.id);
        if (src == src_by_id.end() || tgt == tgt_by_id.end()) {
            throw CorpusError("alignment record '" + rec.id + "' refers to a missing sentence");
        }
        // Sentences without triggers switch to themselves; skip them.
        if (rec.source_spans.empty()) continue;
        auto sw = switch_triggers({*src->second, *tgt->second, rec.source_spans, rec.target_spans});
        st.sentences.push_back(std::move(sw.source_host));
        ts.sentences.push_back(std::move(sw.target_host));
    }
    return {std::move(st), std::move(ts)};
}

CombinationSpec CombinationSpec::parse(std::string_view text) {
    std::set<DatasetTag> seen;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('+', start);
        if (end == std::string_view::npos) end = text.size();
        const auto piece = unicode::trim(text.substr(start, end - start));
        auto tag = parse_dataset_tag(piece);
        if (!tag) throw ConfigError("unknown dataset tag '" + std::string(piece) + "' in --combine");
        if (!seen.insert(*tag).second) {
            throw ConfigError("dataset tag '" + std::string(piece) + "' listed twice");
        }
        start = end + 1;
    }
    if (!seen.contains(DatasetTag::DS)) throw ConfigError("every combination must include D_S");
    CombinationSpec spec;
    for (auto tag : kAllDatasetTags) {
        if (seen.contains(tag)) spec.include.push_back(tag);
    }
    return spec;
}

std::string CombinationSpec::to_string() const {
    std::string out;
    for (auto tag : include) {
        if (!out.empty()) out += '+';
        out += xlproject::to_string(tag);
    }
    return out;
}

bool CombinationSpec::contains(DatasetTag tag) const {
    return std::find(include.begin(), include.end(), tag) != include.end();
}

Corpus build_dataset(const CombinationSpec& spec, const std::map<DatasetTag, Corpus>& corpora) {
    Corpus out;
    out.provenance["combination"] = spec.to_string();
    for (auto tag : kAllDatasetTags) {
        if (!spec.contains(tag)) continue;
        auto it = corpora.find(tag);
        if (it == corpora.end()) {
            throw ConfigError("combination needs " + std::string(xlproject::to_string(tag)) +
                              " but it was not supplied");
        }
        for (const auto& s : it->second.sentences) {
            AnnotatedSentence copy = s;
            copy.id += "#";
            copy.id += xlproject::to_string(tag);
            out.sentences.push_back(std::move(copy));
        }
    }
    return out;
}

}  // namespace xlproject::augment
