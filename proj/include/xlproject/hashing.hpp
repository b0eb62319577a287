// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace xlproject {

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

// 64-bit FNV-1a followed by a splitmix64 finalizer.
std::uint64_t hash64(std::string_view data, std::uint64_t seed = 0);

}  // namespace xlproject
