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
#include "radcorr/matcher.hpp"

namespace radcorr {

struct PairMetrics {
  std::string id;
  int predicted = 0;
  int truth = 0;
  int correct = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  /// Nothing predicted; precision is reported as 1.0.
  bool no_predictions = false;
  /// Empty reference; recall is reported as 1.0.
  bool no_truth = false;
};

PairMetrics evaluate_pair(const std::string& id,
                          const std::vector<std::pair<int, int>>& predicted,
                          const std::vector<std::pair<int, int>>& truth);

struct EvalReport {
  std::vector<PairMetrics> pairs;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  /// Pooled over all pairs.
  double micro_precision = 1.0;
  double micro_recall = 1.0;
  std::vector<SweepRow> sweep;
  int timed_pairs = 0;
  double runtime_mean = 0.0;  // seconds per pair
  double runtime_std = 0.0;
};

/// Aggregates are recomputed from `pairs`; `sweep` and runtime stats are
/// left for the caller to fill.
EvalReport summarize(std::vector<PairMetrics> pairs);

void set_runtime(EvalReport& report, const std::vector<double>& seconds);

/// Comma-separated report: a "# section" line precedes each of the per-pair
/// table, the aggregate row, the threshold sweep, and the runtime row.
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report_csv(const std::filesystem::path& path,
                           int expected_version = kFormatVersion);

}  // namespace radcorr
