// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "xlproject/trainer.hpp"

namespace xlproject::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout is described in docs/checkpoint-format.md. Save then load is
// lossless for every field of TrainedModel.
void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path);

// Throws IoError when the file cannot be read, CorpusError when it is
// truncated or malformed.
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace xlproject::model
