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
#include "radcorr/labelgen.hpp"

#include <sstream>

#include "radcorr/error.hpp"

namespace radcorr {

int LabelSet::matched_count() const {
  int n = 0;
  for (int l : labels) n += (l > 0);
  return n;
}

CostMatrix build_cost_matrix(const PointCloud& prev, const PointCloud& curr,
                             const PoseSE3& pose) {
  if (prev.empty() || curr.empty()) {
    throw Error(ErrorKind::kNoLabels,
                "build_cost_matrix: empty cloud, no labels derivable");
  }
  const PointCloud moved = transform_points(prev, pose);
  for (std::size_t i = 0; i < curr.size(); ++i) {
    if (!all_finite(curr.points[i])) {
      throw Error(ErrorKind::kNonFinite,
                  "build_cost_matrix: current cloud has a non-finite point");
    }
  }
  CostMatrix costs(curr.size(), prev.size());
  for (std::size_t i = 0; i < curr.size(); ++i) {
    for (std::size_t j = 0; j < prev.size(); ++j) {
      costs(i, j) = (curr.points[i] - moved.points[j]).norm();
    }
  }
  return costs;
}

LabelSet generate_labels(const PointCloud& prev, const PointCloud& curr,
                         const PoseSE3& pose, double gate) {
  if (!(gate > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "generate_labels: gate must be positive");
  }
  LabelSet out;
  out.gate = gate;
  out.labels.assign(prev.size(), 0);
  if (prev.empty() || curr.empty()) return out;

  const CostMatrix costs = build_cost_matrix(prev, curr, pose);
  const Assignment assignment = solve_min(costs);
  for (const auto& [curr_idx, prev_idx] : assignment.pairs) {
    if (costs(curr_idx, prev_idx) <= gate) {
      out.labels[prev_idx] = curr_idx + 1;
    }
  }
  return out;
}

void validate_labels(const LabelSet& labels, std::size_t curr_size) {
  std::vector<char> seen(curr_size + 1, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int l = labels.labels[i];
    if (l < 0 || static_cast<std::size_t>(l) > curr_size) {
      std::ostringstream msg;
      msg << "label " << l << " at row " << i << " outside [0, " << curr_size
          << "]";
      throw Error(ErrorKind::kInvalidArgument, msg.str());
    }
    if (l > 0) {
      if (seen[l]) {
        std::ostringstream msg;
        msg << "label " << l << " claimed twice";
        throw Error(ErrorKind::kInvalidArgument, msg.str());
      }
      seen[l] = 1;
    }
  }
}

}  // namespace radcorr
