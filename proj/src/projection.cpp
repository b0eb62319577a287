// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/projection.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "xlproject/errors.hpp"
#include "xlproject/unicode.hpp"

namespace xlproject::projection {

using json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 5> kReasonNames = {
    "missing_marker", "unbalanced_marker", "reordered_marker", "too_many_spans", "empty_span"};

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

std::vector<std::size_t> find_all(std::string_view text, std::string_view needle) {
    std::vector<std::size_t> hits;
    for (auto pos = text.find(needle); pos != std::string_view::npos;
         pos = text.find(needle, pos + needle.size())) {
        hits.push_back(pos);
    }
    return hits;
}

bool sentence_contains(const AnnotatedSentence& s, std::string_view symbol) {
    return std::any_of(s.tokens.begin(), s.tokens.end(),
                       [&](const std::string& t) { return t.find(symbol) != std::string::npos; });
}

}  // namespace

// -- MarkerScheme -----------------------------------------------------------

MarkerScheme::MarkerScheme(std::vector<MarkerPair> pairs) : pairs_(std::move(pairs)) {
    if (pairs_.empty()) throw ConfigError("marker scheme needs at least one pair");
    const auto syms = symbols();
    for (std::size_t i = 0; i < syms.size(); ++i) {
        if (syms[i].empty()) throw ConfigError("marker symbols must be non-empty");
        if (unicode::contains_space(syms[i])) {
            throw ConfigError("marker symbol '" + syms[i] + "' contains whitespace");
        }
        for (std::size_t j = 0; j < syms.size(); ++j) {
            if (i == j) continue;
            if (syms[i] == syms[j]) throw ConfigError("marker symbol '" + syms[i] + "' used twice");
            if (syms[j].find(syms[i]) != std::string::npos) {
                throw ConfigError("marker symbol '" + syms[i] + "' is a substring of '" + syms[j] + "'");
            }
        }
    }
}

MarkerScheme MarkerScheme::default_scheme() {
    return MarkerScheme({{"[", "]"},
                         {"{", "}"},
                         {"<", ">"},
                         {"(", ")"},
                         {"«", "»"},
                         {"⟦", "⟧"},
                         {"⟨", "⟩"},
                         {"⌈", "⌉"}});
}

MarkerScheme MarkerScheme::parse(std::string_view text) {
    std::vector<MarkerPair> pairs;
    for (const auto& item : unicode::split_whitespace(text)) {
        if (const auto bar = item.find('|'); bar != std::string::npos) {
            pairs.push_back({item.substr(0, bar), item.substr(bar + 1)});
            continue;
        }
        const auto cps = unicode::code_points(item);
        if (cps.size() != 2) {
            throw ConfigError("marker pair '" + item + "' must be two symbols or 'open|close'");
        }
        pairs.push_back({cps[0], cps[1]});
    }
    return MarkerScheme(std::move(pairs));
}

std::string MarkerScheme::to_string() const {
    std::string out;
    for (const auto& p : pairs_) {
        if (!out.empty()) out += ' ';
        const bool compact =
            unicode::code_points(p.open).size() == 1 && unicode::code_points(p.close).size() == 1;
        out += compact ? p.open + p.close : p.open + "|" + p.close;
    }
    return out;
}

std::vector<std::string> MarkerScheme::symbols() const {
    std::vector<std::string> out;
    for (const auto& p : pairs_) {
        out.push_back(p.open);
        out.push_back(p.close);
    }
    return out;
}

// -- reasons ----------------------------------------------------------------

std::string_view to_string(DiscardReason reason) {
    return kReasonNames[static_cast<std::size_t>(reason)];
}

std::optional<DiscardReason> parse_discard_reason(std::string_view text) {
    for (std::size_t i = 0; i < kReasonNames.size(); ++i) {
        if (kReasonNames[i] == text) return static_cast<DiscardReason>(i);
    }
    return std::nullopt;
}

// -- marking / extraction ---------------------------------------------------

std::vector<TriggerSpan> spans_from_mask(std::span<const std::uint8_t> mask) {
    std::vector<TriggerSpan> spans;
    std::size_t i = 0;
    while (i < mask.size()) {
        if (!mask[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < mask.size() && mask[j]) ++j;
        spans.push_back({i, j, spans.size()});
        i = j;
    }
    return spans;
}

std::variant<MarkedSentence, Discarded> mark_sentence(const AnnotatedSentence& sentence,
                                                      const MarkerScheme& scheme) {
    if (!sentence.trigger_mask) {
        throw std::invalid_argument("mark_sentence: sentence '" + sentence.id + "' has no trigger mask");
    }
    auto spans = spans_from_mask(*sentence.trigger_mask);

    std::vector<std::size_t> usable;
    for (std::size_t p = 0; p < scheme.size() && usable.size() < spans.size(); ++p) {
        if (!sentence_contains(sentence, scheme[p].open) &&
            !sentence_contains(sentence, scheme[p].close)) {
            usable.push_back(p);
        }
    }
    if (usable.size() < spans.size()) return Discarded{DiscardReason::TooManySpans};

    for (std::size_t k = 0; k < spans.size(); ++k) spans[k].marker_index = usable[k];

    std::vector<std::string> parts;
    parts.reserve(sentence.tokens.size() + 2 * spans.size());
    std::size_t next_span = 0;
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
        if (next_span < spans.size() && spans[next_span].start == i) {
            parts.push_back(scheme[spans[next_span].marker_index].open);
        }
        parts.push_back(sentence.tokens[i]);
        if (next_span < spans.size() && spans[next_span].end == i + 1) {
            parts.push_back(scheme[spans[next_span].marker_index].close);
            ++next_span;
        }
    }
    return MarkedSentence{join(parts), std::move(spans), sentence.id};
}

std::variant<Extraction, Discarded> extract_markers(std::string_view text,
                                                    std::span<const std::size_t> expected,
                                                    const MarkerScheme& scheme) {
    if (expected.empty()) throw std::invalid_argument("extract_markers: nothing expected");

    struct Located {
        std::size_t marker;
        std::size_t open_pos;
        std::size_t close_pos;
    };
    std::vector<Located> found;
    std::vector<std::vector<std::size_t>> opens;
    std::vector<std::vector<std::size_t>> closes;
    for (auto k : expected) {
        if (k >= scheme.size()) throw std::out_of_range("extract_markers: marker index out of range");
        opens.push_back(find_all(text, scheme[k].open));
        closes.push_back(find_all(text, scheme[k].close));
    }
    for (std::size_t e = 0; e < expected.size(); ++e) {
        if (opens[e].empty() || closes[e].empty()) return Discarded{DiscardReason::MissingMarker};
    }
    for (std::size_t e = 0; e < expected.size(); ++e) {
        if (opens[e].size() > 1 || closes[e].size() > 1 || closes[e][0] < opens[e][0]) {
            return Discarded{DiscardReason::UnbalancedMarker};
        }
        found.push_back({expected[e], opens[e][0], closes[e][0]});
    }
    std::sort(found.begin(), found.end(),
              [](const Located& a, const Located& b) { return a.open_pos < b.open_pos; });
    for (std::size_t i = 1; i < found.size(); ++i) {
        if (found[i].open_pos < found[i - 1].close_pos) {
            return Discarded{DiscardReason::ReorderedMarker};
        }
    }

    Extraction out;
    std::size_t cursor = 0;
    auto add_tokens = [&](std::string_view segment) {
        for (auto& t : unicode::split_whitespace(segment)) out.tokens.push_back(std::move(t));
    };
    for (const auto& loc : found) {
        const auto& pair = scheme[loc.marker];
        add_tokens(text.substr(cursor, loc.open_pos - cursor));
        const std::size_t inner_begin = loc.open_pos + pair.open.size();
        const std::string_view inner = text.substr(inner_begin, loc.close_pos - inner_begin);
        const auto inner_tokens = unicode::split_whitespace(inner);
        if (inner_tokens.empty()) return Discarded{DiscardReason::EmptySpan};
        const std::size_t start = out.tokens.size();
        add_tokens(inner);
        out.token_spans.push_back({start, out.tokens.size(), loc.marker});
        out.extracted.push_back({loc.marker, join(inner_tokens)});
        cursor = loc.close_pos + pair.close.size();
    }
    add_tokens(text.substr(cursor));
    out.clean_text = join(out.tokens);
    return out;
}

std::string projected_id(std::string_view source_id, std::string_view lang) {
    return std::string(source_id) + "/" + std::string(lang);
}

ProjectionOutcome project_labels(const AnnotatedSentence& source,
                                 std::string_view translated_text, const MarkerScheme& scheme,
                                 const std::string& target_lang) {
    auto marked = mark_sentence(source, scheme);
    if (auto* d = std::get_if<Discarded>(&marked)) return *d;
    const auto& ms = std::get<MarkedSentence>(marked);

    const std::string normalized = unicode::nfc(translated_text);

    Projected result;
    result.source_spans = ms.spans;
    result.sentence.id = projected_id(source.id, target_lang);
    result.sentence.language = target_lang;
    result.sentence.emotion = source.emotion;
    result.sentence.origin = DatasetTag::DT;

    if (ms.spans.empty()) {
        // Nothing to project; the translation is taken as is.
        result.sentence.tokens = unicode::split_whitespace(normalized);
        if (result.sentence.tokens.empty()) return Discarded{DiscardReason::MissingMarker};
        result.sentence.trigger_mask = std::vector<std::uint8_t>(result.sentence.tokens.size(), 0);
        return result;
    }

    std::vector<std::size_t> expected;
    for (const auto& sp : ms.spans) expected.push_back(sp.marker_index);
    auto extracted = extract_markers(normalized, expected, scheme);
    if (auto* d = std::get_if<Discarded>(&extracted)) return *d;
    auto& ex = std::get<Extraction>(extracted);

    std::vector<std::uint8_t> mask(ex.tokens.size(), 0);
    for (const auto& sp : ex.token_spans) {
        std::fill(mask.begin() + static_cast<std::ptrdiff_t>(sp.start),
                  mask.begin() + static_cast<std::ptrdiff_t>(sp.end), std::uint8_t{1});
    }
    result.sentence.tokens = std::move(ex.tokens);
    result.sentence.trigger_mask = std::move(mask);
    result.target_spans = std::move(ex.token_spans);
    return result;
}

// -- corpus level -----------------------------------------------------------

ProjectionRun project_corpus(const Corpus& source, const MarkerScheme& scheme,
                             translate::TranslationBackend& backend,
                             translate::TranslationCache& cache,
                             const ProjectionOptions& options) {
    if (options.target_langs.empty()) throw ConfigError("no target languages given");
    for (const auto& lang : options.target_langs) {
        if (!is_supported_language(lang)) throw ConfigError("unsupported target language '" + lang + "'");
        if (lang == options.source_lang) throw ConfigError("target language equals source language");
    }

    ProjectionRun run;
    run.target.provenance = source.provenance;
    run.target.provenance["projection_scheme"] = scheme.to_string();

    // Marking does not depend on the target language.
    std::vector<std::optional<std::variant<MarkedSentence, Discarded>>> marks(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        if (source.sentences[i].trigger_mask) marks[i] = mark_sentence(source.sentences[i], scheme);
    }

    for (const auto& lang : options.target_langs) {
        std::vector<std::string> texts;
        std::vector<std::size_t> owner;
        for (std::size_t i = 0; i < source.size(); ++i) {
            const auto& s = source.sentences[i];
            if (!marks[i]) {
                texts.push_back(join(s.tokens));
            } else if (const auto* ms = std::get_if<MarkedSentence>(&*marks[i])) {
                texts.push_back(ms->text);
            } else {
                run.discards.push_back({projected_id(s.id, lang), DiscardReason::TooManySpans, ""});
                continue;
            }
            owner.push_back(i);
        }
        if (texts.empty()) continue;

        const auto translated =
            translate::translate_batch(texts, options.source_lang, lang, backend, cache, options.batch);

        for (std::size_t k = 0; k < owner.size(); ++k) {
            const auto& s = source.sentences[owner[k]];
            if (!s.trigger_mask) {
                AnnotatedSentence t;
                t.id = projected_id(s.id, lang);
                t.language = lang;
                t.tokens = unicode::split_whitespace(unicode::nfc(translated[k]));
                t.emotion = s.emotion;
                t.origin = DatasetTag::DT;
                if (t.tokens.empty()) throw BackendError("empty translation for '" + s.id + "'");
                run.target.sentences.push_back(std::move(t));
                continue;
            }
            auto outcome = project_labels(s, translated[k], scheme, lang);
            if (auto* d = std::get_if<Discarded>(&outcome)) {
                run.discards.push_back({projected_id(s.id, lang), d->reason, translated[k]});
                continue;
            }
            auto& p = std::get<Projected>(outcome);
            run.alignments.push_back(
                {p.sentence.id, s.id, std::move(p.source_spans), std::move(p.target_spans)});
            run.target.sentences.push_back(std::move(p.sentence));
        }
    }
    return run;
}

// -- sidecar files ------------------------------------------------------------

namespace {

json spans_to_json(const std::vector<TriggerSpan>& spans) {
    json arr = json::array();
    for (const auto& s : spans) arr.push_back({s.start, s.end, s.marker_index});
    return arr;
}

std::vector<TriggerSpan> spans_from_json(const json& arr) {
    std::vector<TriggerSpan> spans;
    for (const auto& item : arr) {
        spans.push_back({item.at(0).get<std::size_t>(), item.at(1).get<std::size_t>(),
                         item.at(2).get<std::size_t>()});
    }
    return spans;
}

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (unicode::trim(line).empty()) continue;
        try {
            fn(json::parse(line));
        } catch (const json::exception& e) {
            throw CorpusError(path.string() + ": malformed record at line " + std::to_string(lineno) +
                              ": " + e.what());
        }
    }
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& r : rows) out << r.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

}  // namespace

void save_discards(const std::vector<DiscardRecord>& records, const std::filesystem::path& path) {
    std::vector<json> rows;
    for (const auto& r : records) {
        rows.push_back({{"id", r.id},
                        {"reason", std::string(to_string(r.reason))},
                        {"translated_text", r.translated_text}});
    }
    write_lines(path, rows);
}

std::vector<DiscardRecord> load_discards(const std::filesystem::path& path) {
    std::vector<DiscardRecord> out;
    for_each_json_line(path, [&](const json& j) {
        const auto reason = parse_discard_reason(j.at("reason").get<std::string>());
        if (!reason) throw CorpusError("unknown discard reason in " + path.string());
        out.push_back({j.at("id").get<std::string>(), *reason,
                       j.at("translated_text").get<std::string>()});
    });
    return out;
}

void save_alignments(const std::vector<AlignmentRecord>& records,
                     const std::filesystem::path& path) {
    std::vector<json> rows;
    for (const auto& r : records) {
        rows.push_back({{"id", r.id},
                        {"source_id", r.source_id},
                        {"source_spans", spans_to_json(r.source_spans)},
                        {"target_spans", spans_to_json(r.target_spans)}});
    }
    write_lines(path, rows);
}

std::vector<AlignmentRecord> load_alignments(const std::filesystem::path& path) {
    std::vector<AlignmentRecord> out;
    for_each_json_line(path, [&](const json& j) {
        out.push_back({j.at("id").get<std::string>(), j.at("source_id").get<std::string>(),
                       spans_from_json(j.at("source_spans")), spans_from_json(j.at("target_spans"))});
    });
    return out;
}

}  // namespace xlproject::projection
