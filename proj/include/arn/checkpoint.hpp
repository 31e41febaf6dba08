// arn/checkpoint.hpp

// Copyright 2026  ARN contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Checkpoint file layout:
//
//   ARN-CHECKPOINT
//   format_version=1
//   [config]            key=value per ArnConfig field
//   [train]             epoch, best_validation_score, adam_step_count (optional)
//   [tensors]           name <TAB> d0,d1,... <TAB> byte offset <TAB> value count
//   [end]
//   <payload: little-endian float32 values, offsets relative to here>

#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "arn/model.hpp"
#include "arn/optim.hpp"

namespace arn {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  int format_version = kCheckpointFormatVersion;
  ArnConfig config;
  ModelParams<float> params;
  std::optional<AdamState<float>> adam;
  double best_validation_score = -std::numeric_limits<double>::infinity();
  std::size_t epoch = 0;
};

/// Refreshes the evaluation v-gates of `c.params`, then writes to a
/// temporary file in the same directory and renames it over `path`.
void save_checkpoint(Checkpoint& c, const std::filesystem::path& path);

/// Throws CorruptHeaderError, ShapeMismatchError or TruncatedPayloadError;
/// CompatibilityError on an unknown format version.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// ArnConfig as `key=value` lines, and back. Unknown keys are an error.
std::map<std::string, std::string> config_fields(const ArnConfig& cfg);
void apply_config_field(ArnConfig& cfg, const std::string& key, const std::string& value);

/// Throws CompatibilityError naming the first architecture field that differs.
void check_compatible(const ArnConfig& expected, const ArnConfig& actual);

}  // namespace arn
