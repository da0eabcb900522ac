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
#include "radcorr/assignment.hpp"

#include <algorithm>
#include <limits>

#include "radcorr/error.hpp"

namespace radcorr {

namespace {

void check_input(const CostMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "assignment: cost matrix must be at least 1x1");
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::kNonFinite,
                "assignment: cost matrix has non-finite entries");
  }
}

// Shortest augmenting path Hungarian for rows <= cols. Returns, for every
// row, the column it is assigned to.
std::vector<int> hungarian_rows(const CostMatrix& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // 1-based: index 0 is the virtual source row/column.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> owner(m + 1, 0), way(m + 1, 0);
  std::vector<double> minv(m + 1);
  std::vector<char> used(m + 1);

  for (int i = 1; i <= n; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = owner[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const int j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> col_of_row(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (owner[j] != 0) col_of_row[owner[j] - 1] = j - 1;
  }
  return col_of_row;
}

}  // namespace

Assignment solve_min(const CostMatrix& costs) {
  check_input(costs);
  Assignment result;
  if (costs.rows() <= costs.cols()) {
    const std::vector<int> col_of_row = hungarian_rows(costs);
    for (int r = 0; r < static_cast<int>(col_of_row.size()); ++r) {
      result.pairs.emplace_back(r, col_of_row[r]);
    }
  } else {
    const CostMatrix transposed = costs.transpose();
    const std::vector<int> row_of_col = hungarian_rows(transposed);
    for (int c = 0; c < static_cast<int>(row_of_col.size()); ++c) {
      result.pairs.emplace_back(row_of_col[c], c);
    }
    std::sort(result.pairs.begin(), result.pairs.end());
  }
  for (const auto& [r, c] : result.pairs) result.objective += costs(r, c);
  return result;
}

Assignment solve_max(const CostMatrix& scores) {
  check_input(scores);
  Assignment result = solve_min(-scores);
  result.objective = 0.0;
  for (const auto& [r, c] : result.pairs) result.objective += scores(r, c);
  return result;
}

}  // namespace radcorr
