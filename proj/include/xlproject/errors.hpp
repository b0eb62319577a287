// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

namespace xlproject {

// Invalid configuration or arguments (CLI exit code 2).
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Unreadable/unwritable files (CLI exit code 3, alongside CorpusError).
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Translation backend failures after retries (CLI exit code 4).
class BackendError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace xlproject
