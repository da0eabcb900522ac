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

#include <limits>
#include <utility>
#include <vector>

#include "radcorr/geometry.hpp"
#include "radcorr/model.hpp"

namespace radcorr {

/// Where the acceptance threshold lives: raw dot-product logits of G, or the
/// per-row softmax over all N+1 columns.
enum class ScoreSpace { kLogit, kRowSoftmax };

struct InferenceConfig {
  double accept_threshold = -std::numeric_limits<double>::infinity();
  ScoreSpace score_space = ScoreSpace::kLogit;
  FovSpec fov;
  bool prefilter_fov = true;   // drop out-of-FOV points before the network
  bool postfilter_fov = true;  // drop matches with an out-of-FOV endpoint
};

struct Match {
  int prev_index = 0;
  int curr_index = 0;
  double score = 0.0;

  bool operator==(const Match&) const = default;
};

/// Accepted one-to-one correspondences, indices into the original clouds.
struct MatchSet {
  std::vector<Match> matches;
  double threshold_used = -std::numeric_limits<double>::infinity();
  FovSpec fov_used;

  std::vector<std::pair<int, int>> index_pairs() const;
};

/// Score block of real points after optional FOV pre-filtering, with the
/// original index of every row/column.
struct ScoreBlock {
  Eigen::MatrixXd scores;  // rows: kept prev points, cols: kept curr points
  std::vector<int> prev_index;
  std::vector<int> curr_index;
};

/// Throws Error(kCapacity) if a cloud still exceeds the model's N.
ScoreBlock score_block(const PointCloud& prev, const PointCloud& curr,
                       const CorrespondenceNet& net,
                       const InferenceConfig& conf);

/// Maximum-score assignment on the block, FOV post-filter applied, no
/// threshold. Sorted by prev index.
std::vector<Match> candidate_matches(const PointCloud& prev,
                                     const PointCloud& curr,
                                     const CorrespondenceNet& net,
                                     const InferenceConfig& conf);

/// Full inference: pad, affinity, LSA maximization, threshold, FOV pruning.
/// Empty clouds give an empty MatchSet.
MatchSet match_pair(const PointCloud& prev, const PointCloud& curr,
                    const CorrespondenceNet& net, const InferenceConfig& conf);

/// Keeps the candidates with score >= threshold.
MatchSet apply_threshold(const std::vector<Match>& candidates, double threshold,
                         const FovSpec& fov);

/// Non-learning reference: each previous point takes its nearest current
/// point in raw sensor coordinates, kept if within `max_distance` and, when
/// `mutual` is set, only if the previous point is also the current point's
/// nearest neighbor.
std::vector<std::pair<int, int>> match_nearest_neighbor(
    const PointCloud& prev, const PointCloud& curr, double max_distance,
    bool mutual = true);

struct LabeledPair {
  PointCloud prev;
  PointCloud curr;
  std::vector<std::pair<int, int>> truth;  // (prev index, curr index)
};

struct SweepRow {
  double threshold = 0.0;
  int predicted = 0;
  int correct = 0;
  double precision = 1.0;
  double recall = 0.0;
};

struct Calibration {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool attained = false;
  std::vector<SweepRow> table;  // ascending threshold
};

/// Precision/recall of thresholded candidates at every observed score.
/// `candidates[p]` are the unthresholded matches of pair p.
std::vector<SweepRow> threshold_sweep(
    const std::vector<std::vector<Match>>& candidates,
    const std::vector<std::vector<std::pair<int, int>>>& truth);

/// Smallest threshold whose precision reaches `target_precision`. If no
/// threshold does, returns the (smallest) maximum-precision threshold with
/// attained = false and logs a warning.
Calibration calibrate_threshold(const std::vector<LabeledPair>& pairs,
                                const CorrespondenceNet& net,
                                double target_precision,
                                const InferenceConfig& conf);
Calibration calibrate_from_sweep(std::vector<SweepRow> table,
                                 double target_precision);

}  // namespace radcorr
