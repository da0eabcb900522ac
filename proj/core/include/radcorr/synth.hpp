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

#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "radcorr/dataio.hpp"
#include "radcorr/geometry.hpp"

namespace radcorr {

/// Simulated SoC-radar scans of a persistent landmark field.
struct SynthConfig {
  /// Landmark density is chosen so that a scan averages the midpoint of this
  /// range; scans above max_points are randomly thinned, scans below
  /// min_points are redrawn a few times.
  int min_points = 20;
  int max_points = 40;
  double translation_step = 0.25;  // mean forward motion per scan, m
  double rotation_step = 2.0 * std::numbers::pi / 180.0;  // yaw std per scan, rad
  /// RMS 3-D position error of a detection (per axis sigma / sqrt(3)), m.
  double noise_sigma = 0.05;
  double dropout = 0.2;     // probability a visible landmark is not detected
  double ghost_rate = 0.2;  // expected ghosts per visible landmark
  double scan_period = 0.1;  // s
  double cell_size = 4.0;    // landmark tiling, m
  std::uint64_t seed = 1;
  FovSpec fov;

  /// Throws Error(kInvalidArgument).
  void validate() const;
};

struct SynthSequence {
  std::vector<ScanRecord> records;
  /// truth[k]: (index in scan k, index in scan k+1) of every landmark
  /// detected in both scans.
  std::vector<std::vector<std::pair<int, int>>> truth;
  /// Per scan, the landmark id of every point; -1 for ghosts.
  std::vector<std::vector<long long>> point_ids;
};

/// Deterministic for a fixed config (seed included).
SynthSequence generate_synthetic(const SynthConfig& conf, int n_scans);

}  // namespace radcorr
