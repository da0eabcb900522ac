// Copyright 2026, The radcorr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "radcorr/diff/params.hpp"

namespace radcorr::diff {

inline constexpr int kCheckpointFormatVersion = 1;

/// On-disk layout:
///
///   radcorr-checkpoint
///   format_version = 1
///   <key> = <value>          (free-form config block, one entry per line)
///   arrays = <count>
///   end_header
///   <binary payload>
///
/// The payload holds, per array: u32 name length, name bytes, u64 rows,
/// u64 cols, rows*cols float64 in row-major order. All integers and floats
/// are little-endian.
struct Checkpoint {
  int format_version = kCheckpointFormatVersion;
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::pair<std::string, Matrix>> arrays;

  /// Header value for `key`, or Error(kFormat) if absent.
  const std::string& header_value(const std::string& key) const;
};

Checkpoint make_checkpoint(
    const ParamStore& store,
    std::vector<std::pair<std::string, std::string>> header = {});

void write_checkpoint(const std::filesystem::path& path,
                      const Checkpoint& checkpoint);

/// Throws Error(kNotFound), Error(kFormat), or Error(kVersionMismatch) when
/// the file's format_version differs from `expected_version`.
Checkpoint read_checkpoint(const std::filesystem::path& path,
                           int expected_version = kCheckpointFormatVersion);

/// Copies arrays into same-named parameters. Every parameter in the store
/// must be present with the same shape (Error(kShapeMismatch) otherwise).
void load_parameters(ParamStore& store, const Checkpoint& checkpoint);

}  // namespace radcorr::diff
