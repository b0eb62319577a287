// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "xlproject/errors.hpp"
#include "xlproject/random.hpp"
#include "xlproject/unicode.hpp"

namespace xlproject {

using json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, kNumEmotions> kEmotionNames = {
    "Love", "Joy", "Fear", "Anger", "Sadness", "Neutral"};
constexpr std::array<std::string_view, 4> kTagNames = {"D_S", "D_T", "D_St", "D_Ts"};

std::string at_line(std::size_t line) { return " at line " + std::to_string(line); }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = end + 1;
    }
    return lines;
}

void check_sentence(const AnnotatedSentence& s, const std::string& where) {
    if (s.id.empty()) throw CorpusError("id: empty" + where);
    if (!is_supported_language(s.language)) {
        throw CorpusError("lang: unsupported code '" + s.language + "'" + where);
    }
    if (s.tokens.empty()) throw CorpusError("tokens: empty token list" + where);
    for (const auto& tok : s.tokens) {
        if (tok.empty()) throw CorpusError("tokens: empty token" + where);
        if (unicode::contains_space(tok)) {
            throw CorpusError("tokens: token contains whitespace" + where);
        }
    }
    if (s.trigger_mask) {
        if (s.trigger_mask->size() != s.tokens.size()) {
            throw CorpusError("mask length mismatch" + where);
        }
        for (auto m : *s.trigger_mask) {
            if (m > 1) throw CorpusError("mask: values must be 0 or 1" + where);
        }
    }
    if (s.origin == DatasetTag::DS && s.language != "en") {
        throw CorpusError("origin: D_S sentence must be English" + where);
    }
    if (s.origin == DatasetTag::DT && s.language == "en") {
        throw CorpusError("origin: D_T sentence must not be English" + where);
    }
}

AnnotatedSentence parse_json_record(const std::string& line, std::size_t lineno) {
    const std::string where = at_line(lineno);
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw CorpusError(std::string("malformed JSON") + where + ": " + e.what());
    }
    if (!obj.is_object()) throw CorpusError("record is not an object" + where);

    auto require_string = [&](const char* key) -> std::string {
        auto it = obj.find(key);
        if (it == obj.end()) throw CorpusError(std::string(key) + ": missing" + where);
        if (!it->is_string()) throw CorpusError(std::string(key) + ": expected string" + where);
        return it->get<std::string>();
    };

    AnnotatedSentence s;
    s.id = require_string("id");
    s.language = require_string("lang");

    auto tok = obj.find("tokens");
    if (tok == obj.end()) throw CorpusError("tokens: missing" + where);
    if (!tok->is_array()) throw CorpusError("tokens: expected array" + where);
    for (const auto& t : *tok) {
        if (!t.is_string()) throw CorpusError("tokens: expected strings" + where);
        s.tokens.push_back(unicode::nfc(t.get<std::string>()));
    }

    if (auto it = obj.find("emotion"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw CorpusError("emotion: expected string" + where);
        auto label = parse_emotion(it->get<std::string>());
        if (!label) throw CorpusError("emotion: unknown label '" + it->get<std::string>() + "'" + where);
        s.emotion = *label;
    }

    if (auto it = obj.find("mask"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) throw CorpusError("mask: expected array" + where);
        std::vector<std::uint8_t> mask;
        for (const auto& m : *it) {
            if (!m.is_number_integer() || (m.get<int>() != 0 && m.get<int>() != 1)) {
                throw CorpusError("mask: values must be 0 or 1" + where);
            }
            mask.push_back(static_cast<std::uint8_t>(m.get<int>()));
        }
        s.trigger_mask = std::move(mask);
    }

    const std::string origin = require_string("origin");
    auto tag = parse_dataset_tag(origin);
    if (!tag) throw CorpusError("origin: unknown tag '" + origin + "'" + where);
    s.origin = *tag;

    if (auto it = obj.find("bilingual"); it != obj.end()) {
        if (!it->is_boolean()) throw CorpusError("bilingual: expected boolean" + where);
        s.bilingual = it->get<bool>();
    }

    check_sentence(s, where);
    return s;
}

Corpus load_jsonl(const std::string& text) {
    Corpus corpus;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (unicode::trim(lines[i]).empty()) continue;
        corpus.sentences.push_back(parse_json_record(lines[i], i + 1));
    }
    return corpus;
}

std::string to_jsonl(const Corpus& corpus) {
    std::string out;
    for (const auto& s : corpus.sentences) {
        json obj;
        obj["id"] = s.id;
        obj["lang"] = s.language;
        obj["tokens"] = s.tokens;
        if (s.emotion) obj["emotion"] = std::string(to_string(*s.emotion));
        if (s.trigger_mask) {
            json mask = json::array();
            for (auto m : *s.trigger_mask) mask.push_back(static_cast<int>(m));
            obj["mask"] = std::move(mask);
        }
        obj["origin"] = std::string(to_string(s.origin));
        if (s.bilingual) obj["bilingual"] = true;
        out += obj.dump(-1, ' ', false, json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

// TSV: "# id=<id> lang=<lang> emotion=<label?> origin=<tag>" header, then
// one "token<TAB>mask" row per token ("token" alone when the sentence has
// no mask), blank line between sentences.
AnnotatedSentence parse_tsv_block(const std::vector<std::string>& lines, std::size_t begin,
                                  std::size_t end) {
    const std::size_t header_line = begin + 1;
    const std::string where = at_line(header_line);
    const std::string& header = lines[begin];
    if (header.rfind("# ", 0) != 0) throw CorpusError("expected '# id=...' header" + where);

    std::map<std::string, std::string> fields;
    std::istringstream hs(header.substr(2));
    std::string kv;
    while (hs >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CorpusError("header: malformed field '" + kv + "'" + where);
        fields[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    auto field = [&](const char* key) -> std::string {
        auto it = fields.find(key);
        if (it == fields.end()) throw CorpusError(std::string(key) + ": missing" + where);
        return it->second;
    };

    AnnotatedSentence s;
    s.id = field("id");
    s.language = field("lang");
    if (auto it = fields.find("emotion"); it != fields.end() && !it->second.empty()) {
        auto label = parse_emotion(it->second);
        if (!label) throw CorpusError("emotion: unknown label '" + it->second + "'" + where);
        s.emotion = *label;
    }
    const std::string origin = field("origin");
    auto tag = parse_dataset_tag(origin);
    if (!tag) throw CorpusError("origin: unknown tag '" + origin + "'" + where);
    s.origin = *tag;
    if (auto it = fields.find("bilingual"); it != fields.end()) s.bilingual = it->second == "1";

    std::optional<bool> has_mask;
    std::vector<std::uint8_t> mask;
    for (std::size_t i = begin + 1; i < end; ++i) {
        const std::string row_where = at_line(i + 1);
        const std::string& row = lines[i];
        const auto tab = row.find('\t');
        const bool row_has_mask = tab != std::string::npos;
        if (has_mask && *has_mask != row_has_mask) {
            throw CorpusError("mask length mismatch" + row_where);
        }
        has_mask = row_has_mask;
        s.tokens.push_back(unicode::nfc(row.substr(0, tab)));
        if (row_has_mask) {
            const std::string value = row.substr(tab + 1);
            if (value != "0" && value != "1") throw CorpusError("mask: values must be 0 or 1" + row_where);
            mask.push_back(value == "1" ? 1 : 0);
        }
    }
    if (has_mask.value_or(false)) s.trigger_mask = std::move(mask);
    check_sentence(s, where);
    return s;
}

Corpus load_tsv(const std::string& text) {
    Corpus corpus;
    const auto lines = split_lines(text);
    std::size_t i = 0;
    while (i < lines.size()) {
        if (lines[i].empty()) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < lines.size() && !lines[j].empty()) ++j;
        corpus.sentences.push_back(parse_tsv_block(lines, i, j));
        i = j;
    }
    return corpus;
}

std::string to_tsv(const Corpus& corpus) {
    std::string out;
    bool first = true;
    for (const auto& s : corpus.sentences) {
        if (unicode::contains_space(s.id)) throw CorpusError("id contains delimiter: " + s.id);
        if (!first) out += '\n';
        first = false;
        out += "# id=" + s.id + " lang=" + s.language + " emotion=";
        if (s.emotion) out += to_string(*s.emotion);
        out += " origin=";
        out += to_string(s.origin);
        if (s.bilingual) out += " bilingual=1";
        out += '\n';
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            out += s.tokens[i];
            if (s.trigger_mask) {
                out += '\t';
                out += (*s.trigger_mask)[i] ? '1' : '0';
            }
            out += '\n';
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << data;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string_view to_string(EmotionLabel label) {
    return kEmotionNames[static_cast<std::size_t>(label)];
}

std::optional<EmotionLabel> parse_emotion(std::string_view text) {
    for (std::size_t i = 0; i < kEmotionNames.size(); ++i) {
        if (kEmotionNames[i] == text) return static_cast<EmotionLabel>(i);
    }
    return std::nullopt;
}

std::string_view to_string(DatasetTag tag) { return kTagNames[static_cast<std::size_t>(tag)]; }

std::optional<DatasetTag> parse_dataset_tag(std::string_view text) {
    for (std::size_t i = 0; i < kTagNames.size(); ++i) {
        if (kTagNames[i] == text) return static_cast<DatasetTag>(i);
    }
    return std::nullopt;
}

bool is_supported_language(std::string_view code) {
    return std::find(kLanguages.begin(), kLanguages.end(), code) != kLanguages.end();
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view text) {
    if (text == "jsonl") return CorpusFormat::Jsonl;
    if (text == "tsv") return CorpusFormat::Tsv;
    return std::nullopt;
}

void validate_sentence(const AnnotatedSentence& s) { check_sentence(s, " in sentence '" + s.id + "'"); }

void validate_corpus(const Corpus& corpus) {
    std::set<std::string_view> ids;
    for (const auto& s : corpus.sentences) {
        validate_sentence(s);
        if (!ids.insert(s.id).second) throw CorpusError("duplicate id '" + s.id + "'");
    }
}

std::filesystem::path provenance_path(const std::filesystem::path& corpus_path) {
    auto p = corpus_path;
    p += ".meta.json";
    return p;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    const std::string text = read_file(path);
    Corpus corpus = format == CorpusFormat::Jsonl ? load_jsonl(text) : load_tsv(text);

    std::set<std::string_view> ids;
    for (const auto& s : corpus.sentences) {
        if (!ids.insert(s.id).second) throw CorpusError("duplicate id '" + s.id + "'");
    }

    const auto meta = provenance_path(path);
    if (std::filesystem::exists(meta)) {
        try {
            const auto obj = json::parse(read_file(meta));
            for (const auto& [k, v] : obj.items()) {
                corpus.provenance[k] = v.is_string() ? v.get<std::string>() : v.dump();
            }
        } catch (const json::exception& e) {
            throw CorpusError("malformed provenance sidecar " + meta.string() + ": " + e.what());
        }
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
    if (format == CorpusFormat::Tsv) {
        for (const auto& s : corpus.sentences) {
            for (const auto& tok : s.tokens) {
                if (tok.find('\t') != std::string::npos || tok.find('\n') != std::string::npos) {
                    throw CorpusError("token contains delimiter in sentence '" + s.id + "'");
                }
            }
        }
    }
    validate_corpus(corpus);
    write_file(path, format == CorpusFormat::Jsonl ? to_jsonl(corpus) : to_tsv(corpus));

    const auto meta = provenance_path(path);
    if (!corpus.provenance.empty()) {
        json obj = json::object();
        for (const auto& [k, v] : corpus.provenance) obj[k] = v;
        write_file(meta, obj.dump(2) + "\n");
    } else if (std::filesystem::exists(meta)) {
        std::filesystem::remove(meta);
    }
}

std::size_t validation_size(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

std::pair<Corpus, Corpus> split_train_validation(const Corpus& corpus, double fraction,
                                                 std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ConfigError("split fraction must lie in (0, 1), got " + std::to_string(fraction));
    }
    if (corpus.empty()) throw ConfigError("cannot split an empty corpus");

    const std::size_t n = corpus.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));

    std::vector<bool> in_validation(n, false);
    const std::size_t k = validation_size(n, fraction);
    for (std::size_t i = 0; i < k; ++i) in_validation[order[i]] = true;

    Corpus train;
    Corpus validation;
    for (std::size_t i = 0; i < n; ++i) {
        (in_validation[i] ? validation : train).sentences.push_back(corpus.sentences[i]);
    }
    for (Corpus* part : {&train, &validation}) {
        part->provenance = corpus.provenance;
        part->provenance["split_seed"] = std::to_string(seed);
        part->provenance["split_fraction"] = std::to_string(fraction);
        part->provenance["split_stratified"] = "false";
    }
    train.provenance["split_part"] = "train";
    validation.provenance["split_part"] = "validation";
    return {std::move(train), std::move(validation)};
}

LabelCounts label_distribution(const Corpus& corpus) {
    LabelCounts counts{};
    std::vector<std::string> missing;
    for (const auto& s : corpus.sentences) {
        if (!s.emotion) {
            missing.push_back(s.id);
            continue;
        }
        ++counts[static_cast<std::size_t>(*s.emotion)];
    }
    if (!missing.empty()) {
        std::string msg = "sentences without emotion label:";
        for (const auto& id : missing) msg += " " + id;
        throw CorpusError(msg);
    }
    return counts;
}

}  // namespace xlproject
