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
#include <vector>

#include "radcorr/assignment.hpp"
#include "radcorr/geometry.hpp"

namespace radcorr {

/// Per-point class labels for the previous cloud. labels[i] = j + 1 means
/// previous point i matches current point j; 0 means no match.
struct LabelSet {
  std::vector<int> labels;
  double gate = std::numeric_limits<double>::infinity();

  std::size_t size() const { return labels.size(); }
  int matched_count() const;
};

/// Distance matrix with rows = current points, cols = previous points:
/// entry (i, j) = || curr_i - (R * prev_j + t) ||, where `pose` maps
/// previous-frame coordinates into the current frame.
///
/// Throws Error(kNoLabels) if either cloud is empty.
CostMatrix build_cost_matrix(const PointCloud& prev, const PointCloud& curr,
                             const PoseSE3& pose);

/// Minimum-distance one-to-one matching, gated: pairs farther apart than
/// `gate` meters become non-matches. Pass +inf for an ungated labeling.
LabelSet generate_labels(const PointCloud& prev, const PointCloud& curr,
                         const PoseSE3& pose, double gate);

/// Throws Error(kInvalidArgument) if labels are out of [0, curr_size] or a
/// current index is claimed twice.
void validate_labels(const LabelSet& labels, std::size_t curr_size);

}  // namespace radcorr
