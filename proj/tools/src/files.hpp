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
#include <vector>

#include "radcorr/matcher.hpp"

namespace radcorr::cli {

/// Scores of one pair's real block, with the raw point indices of each row
/// and column.
struct AffinityDump {
  std::string id;
  ScoreSpace score_space = ScoreSpace::kLogit;
  ScoreBlock block;
};

void write_affinity(const AffinityDump& dump, const std::filesystem::path& path);
AffinityDump read_affinity(const std::filesystem::path& path, int expected_version);

/// Per-pair inference seconds, "pair_id,seconds" rows.
struct TimingRow {
  std::string id;
  double seconds = 0.0;
};

void write_timing(const std::vector<TimingRow>& rows, const std::filesystem::path& path);
std::vector<TimingRow> read_timing(const std::filesystem::path& path,
                                   int expected_version);

/// "seq:12" -> "seq_12", usable as a file name.
std::string file_stem(const std::string& pair_id);

}  // namespace radcorr::cli
