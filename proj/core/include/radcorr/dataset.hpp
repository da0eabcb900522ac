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

#include "radcorr/dataio.hpp"
#include "radcorr/labelgen.hpp"
#include "radcorr/synth.hpp"
#include "radcorr/trainer.hpp"

namespace radcorr {

/// One consecutive scan pair with raw (unfiltered) clouds.
struct PairRecord {
  std::string id;
  double prev_timestamp = 0.0;
  double curr_timestamp = 0.0;
  PointCloud prev;
  PointCloud curr;
  PoseSE3 relative;
  /// Reference correspondences in raw indices.
  std::vector<std::pair<int, int>> truth;
  bool has_truth = false;
};

struct Dataset {
  Manifest manifest;
  std::vector<PairRecord> pairs;
};

/// Pairs of one sequence, ids "<name>:<k>".
std::vector<PairRecord> sequence_pairs(const std::string& name,
                                       const std::vector<ScanRecord>& records);

std::vector<PairRecord> synthetic_pairs(const std::string& name,
                                        const SynthSequence& sequence);

/// Reads manifest.txt and every listed <name>.seq (plus <name>.truth when
/// present) from dir.
Dataset load_dataset(const std::filesystem::path& dir,
                     int expected_version = kFormatVersion);

/// Labels computed on the FOV-filtered clouds, reported for the raw previous
/// cloud (out-of-FOV rows get 0) with raw current-cloud indices.
LabelSet label_pair(const PairRecord& pair, double gate, const FovSpec& fov);

/// FOV-filters and pads both clouds to n_max and remaps raw labels and truth
/// to the filtered indices. Throws Error(kCapacity) if a cloud exceeds n_max.
TrainExample make_example(const PairRecord& pair, const LabelSet& raw_labels,
                          const FovSpec& fov, int n_max);

}  // namespace radcorr
