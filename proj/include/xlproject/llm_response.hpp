// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "xlproject/corpus.hpp"

namespace xlproject::cli {

class LlmParseError : public std::runtime_error {
  public:
    LlmParseError(const std::string& message, std::string text)
        : std::runtime_error(message), text_(std::move(text)) {}
    const std::string& text() const { return text_; }

  private:
    std::string text_;
};

// Finds the first "Label:" (any case) and reads the emotion word after it.
// Quotes, angle brackets, whitespace and punctuation around the word are
// skipped. Throws LlmParseError when there is no "Label:" or the word is not
// one of the six emotions.
EmotionLabel parse_llm_response(std::string_view text);

}  // namespace xlproject::cli
