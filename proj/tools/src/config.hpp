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

#include "radcorr/kvconfig.hpp"
#include "radcorr/model.hpp"
#include "radcorr/synth.hpp"
#include "radcorr/trainer.hpp"

namespace radcorr::cli {

/// Settings of `radcorr gen`.
struct GenConfig {
  SynthConfig synth;
  int sequences = 1;
  int scans = 51;  // per sequence; a sequence of S scans yields S-1 pairs
  std::string name_prefix = "seq";
  double gate = 0.5;
};

/// Settings of `radcorr train` beyond TrainConfig.
struct TrainSettings {
  TrainConfig train;
  /// Precision target for the acceptance threshold stored with the model;
  /// negative disables calibration.
  double calibrate_precision = 0.9;
  ScoreSpace score_space = ScoreSpace::kRowSoftmax;
};

/// Each loader rejects unknown keys and, when the file has a format_version
/// entry, a version other than `expected_version` (Error(kVersionMismatch)).
GenConfig load_gen_config(const std::filesystem::path& path, int expected_version);
ModelConfig load_model_config(const std::filesystem::path& path, int expected_version);
TrainSettings load_train_settings(const std::filesystem::path& path,
                                  int expected_version);

ScoreSpace parse_score_space(const std::string& text);
std::string score_space_name(ScoreSpace space);

}  // namespace radcorr::cli
