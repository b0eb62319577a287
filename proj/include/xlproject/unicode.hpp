// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace xlproject::unicode {

// NFC-normalizes UTF-8 text. Invalid sequences are replaced by U+FFFD.
std::string nfc(std::string_view utf8);

// True for ASCII whitespace and the Unicode space separators that machine
// translation output commonly contains (NBSP, narrow NBSP, ideographic space).
bool is_space(char32_t cp);

bool contains_space(std::string_view utf8);

// Splits on is_space runs; no empty pieces.
std::vector<std::string> split_whitespace(std::string_view utf8);

// Removes leading and trailing is_space code points.
std::string_view trim(std::string_view utf8);

// Decodes to code points, one std::string per code point (the UTF-8 bytes).
std::vector<std::string> code_points(std::string_view utf8);

// Lowercases ASCII letters only.
std::string ascii_lower(std::string_view text);

}  // namespace xlproject::unicode
