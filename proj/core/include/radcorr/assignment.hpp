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

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace radcorr {

/// L x K score matrix. Distances in meters when labeling, raw affinities
/// when matching.
using CostMatrix = Eigen::MatrixXd;

struct Assignment {
  /// (row, col) pairs sorted by row; min(L, K) of them.
  std::vector<std::pair<int, int>> pairs;
  /// Sum of the selected entries of the input matrix.
  double objective = 0.0;
};

/// Exact rectangular linear sum assignment (Hungarian method with row/column
/// potentials, O(min(L,K)^2 * max(L,K))). Every row or every column, whichever
/// is fewer, is assigned exactly once. Deterministic for identical input.
///
/// Throws Error(kInvalidArgument) on an empty matrix and Error(kNonFinite) on
/// any non-finite entry.
Assignment solve_min(const CostMatrix& costs);

/// Maximizing variant, solve_min on the negated matrix.
Assignment solve_max(const CostMatrix& scores);

}  // namespace radcorr
