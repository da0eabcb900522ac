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
#include "radcorr/matcher.hpp"

#include <algorithm>
#include <set>

#include <spdlog/spdlog.h>

#include "radcorr/assignment.hpp"
#include "radcorr/diff/ops.hpp"
#include "radcorr/error.hpp"

namespace radcorr {

namespace {

PointCloud select(const PointCloud& cloud, const std::vector<int>& idx) {
  PointCloud out;
  out.timestamp = cloud.timestamp;
  out.frame_id = cloud.frame_id;
  out.points.reserve(idx.size());
  for (int i : idx) out.points.push_back(cloud.points[i]);
  return out;
}

std::vector<int> all_indices(const PointCloud& cloud) {
  std::vector<int> idx(cloud.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return idx;
}

}  // namespace

std::vector<std::pair<int, int>> MatchSet::index_pairs() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(matches.size());
  for (const Match& m : matches) out.emplace_back(m.prev_index, m.curr_index);
  return out;
}

ScoreBlock score_block(const PointCloud& prev, const PointCloud& curr,
                       const CorrespondenceNet& net,
                       const InferenceConfig& conf) {
  ScoreBlock block;
  block.prev_index = conf.prefilter_fov ? fov_indices(prev, conf.fov) : all_indices(prev);
  block.curr_index = conf.prefilter_fov ? fov_indices(curr, conf.fov) : all_indices(curr);
  if (block.prev_index.empty() || block.curr_index.empty()) {
    block.scores.resize(static_cast<Eigen::Index>(block.prev_index.size()),
                        static_cast<Eigen::Index>(block.curr_index.size()));
    return block;
  }
  const int n_max = net.config().n_max;
  const PaddedCloud a = pad_cloud(select(prev, block.prev_index), n_max);
  const PaddedCloud b = pad_cloud(select(curr, block.curr_index), n_max);

  diff::NoGradGuard no_grad;
  const AffinityMatrix g = net.affinity(a, b);
  if (conf.score_space == ScoreSpace::kRowSoftmax) {
    const diff::Tensor probs = diff::softmax_rows(g.g);
    block.scores = probs.value().block(1, 1, g.valid_rows, g.valid_cols);
  } else {
    block.scores = g.real_block();
  }
  return block;
}

std::vector<Match> candidate_matches(const PointCloud& prev,
                                     const PointCloud& curr,
                                     const CorrespondenceNet& net,
                                     const InferenceConfig& conf) {
  const ScoreBlock block = score_block(prev, curr, net, conf);
  std::vector<Match> out;
  if (block.scores.size() == 0) return out;
  const Assignment assignment = solve_max(block.scores);
  for (const auto& [r, c] : assignment.pairs) {
    const int pi = block.prev_index[r];
    const int ci = block.curr_index[c];
    if (conf.postfilter_fov &&
        (!conf.fov.contains(prev.points[pi]) || !conf.fov.contains(curr.points[ci]))) {
      continue;
    }
    out.push_back({pi, ci, block.scores(r, c)});
  }
  std::sort(out.begin(), out.end(), [](const Match& x, const Match& y) {
    return x.prev_index < y.prev_index;
  });
  return out;
}

MatchSet apply_threshold(const std::vector<Match>& candidates, double threshold,
                         const FovSpec& fov) {
  MatchSet set;
  set.threshold_used = threshold;
  set.fov_used = fov;
  for (const Match& m : candidates) {
    if (m.score >= threshold) set.matches.push_back(m);
  }
  return set;
}

MatchSet match_pair(const PointCloud& prev, const PointCloud& curr,
                    const CorrespondenceNet& net, const InferenceConfig& conf) {
  return apply_threshold(candidate_matches(prev, curr, net, conf),
                         conf.accept_threshold, conf.fov);
}

std::vector<std::pair<int, int>> match_nearest_neighbor(
    const PointCloud& prev, const PointCloud& curr, double max_distance,
    bool mutual) {
  std::vector<std::pair<int, int>> out;
  if (prev.empty() || curr.empty()) return out;
  auto nearest = [](const Point3& p, const PointCloud& cloud) {
    int best = 0;
    double best_d = (cloud.points[0] - p).squaredNorm();
    for (std::size_t j = 1; j < cloud.size(); ++j) {
      const double d = (cloud.points[j] - p).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    return std::pair{best, best_d};
  };
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const auto [j, d2] = nearest(prev.points[i], curr);
    if (d2 > max_distance * max_distance) continue;
    if (mutual && nearest(curr.points[j], prev).first != static_cast<int>(i)) continue;
    out.emplace_back(static_cast<int>(i), j);
  }
  return out;
}

std::vector<SweepRow> threshold_sweep(
    const std::vector<std::vector<Match>>& candidates,
    const std::vector<std::vector<std::pair<int, int>>>& truth) {
  if (candidates.size() != truth.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "threshold_sweep: candidates and truth differ in pair count");
  }
  struct Scored {
    double score;
    bool correct;
  };
  std::vector<Scored> all;
  long total_truth = 0;
  for (std::size_t p = 0; p < candidates.size(); ++p) {
    const std::set<std::pair<int, int>> t(truth[p].begin(), truth[p].end());
    total_truth += static_cast<long>(t.size());
    for (const Match& m : candidates[p]) {
      all.push_back({m.score, t.count({m.prev_index, m.curr_index}) != 0});
    }
  }
  std::sort(all.begin(), all.end(),
            [](const Scored& a, const Scored& b) { return a.score > b.score; });

  std::vector<SweepRow> table;
  int predicted = 0;
  int correct = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    ++predicted;
    correct += all[i].correct;
    // Emit one row per distinct score, after all ties are counted.
    if (i + 1 < all.size() && all[i + 1].score == all[i].score) continue;
    SweepRow row;
    row.threshold = all[i].score;
    row.predicted = predicted;
    row.correct = correct;
    row.precision = static_cast<double>(correct) / predicted;
    row.recall = total_truth > 0 ? static_cast<double>(correct) / total_truth : 1.0;
    table.push_back(row);
  }
  std::reverse(table.begin(), table.end());
  return table;
}

Calibration calibrate_from_sweep(std::vector<SweepRow> table,
                                 double target_precision) {
  Calibration cal;
  cal.table = std::move(table);
  if (cal.table.empty()) {
    spdlog::warn("calibrate_threshold: no candidate matches to calibrate on");
    cal.threshold = std::numeric_limits<double>::infinity();
    cal.precision = 1.0;
    return cal;
  }
  for (const SweepRow& row : cal.table) {
    if (row.precision >= target_precision) {
      cal.threshold = row.threshold;
      cal.precision = row.precision;
      cal.recall = row.recall;
      cal.attained = true;
      return cal;
    }
  }
  const SweepRow* best = &cal.table.front();
  for (const SweepRow& row : cal.table) {
    if (row.precision > best->precision) best = &row;
  }
  spdlog::warn("calibrate_threshold: target precision {} unattainable, best {} at {}",
               target_precision, best->precision, best->threshold);
  cal.threshold = best->threshold;
  cal.precision = best->precision;
  cal.recall = best->recall;
  return cal;
}

Calibration calibrate_threshold(const std::vector<LabeledPair>& pairs,
                                const CorrespondenceNet& net,
                                double target_precision,
                                const InferenceConfig& conf) {
  std::vector<std::vector<Match>> candidates;
  std::vector<std::vector<std::pair<int, int>>> truth;
  for (const LabeledPair& p : pairs) {
    candidates.push_back(candidate_matches(p.prev, p.curr, net, conf));
    truth.push_back(p.truth);
  }
  return calibrate_from_sweep(threshold_sweep(candidates, truth), target_precision);
}

}  // namespace radcorr
