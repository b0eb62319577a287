// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/llm_response.hpp"

#include "xlproject/unicode.hpp"

namespace xlproject::cli {
namespace {

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

}  // namespace

EmotionLabel parse_llm_response(std::string_view text) {
    const std::string lowered = unicode::ascii_lower(text);
    const auto at = lowered.find("label:");
    if (at == std::string::npos) throw LlmParseError("no 'Label:' in response", std::string(text));

    std::size_t i = at + 6;
    // Skip anything that is not a letter: spaces, quotes, '<', '*', etc.
    // Non-ASCII bytes stop the scan so that a non-Latin word is reported.
    while (i < lowered.size() && !is_ascii_alpha(lowered[i]) &&
           static_cast<unsigned char>(lowered[i]) < 0x80) {
        ++i;
    }
    std::size_t j = i;
    while (j < lowered.size() && is_ascii_alpha(lowered[j])) ++j;
    const std::string word = lowered.substr(i, j - i);
    for (auto label : kAllEmotions) {
        if (unicode::ascii_lower(to_string(label)) == word) return label;
    }
    if (word.empty()) throw LlmParseError("no label word after 'Label:'", std::string(text));
    throw LlmParseError("'" + std::string(text.substr(i, j - i)) + "' is not an emotion label",
                        std::string(text));
}

}  // namespace xlproject::cli
