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
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "radcorr/diff/params.hpp"
#include "radcorr/geometry.hpp"
#include "radcorr/labelgen.hpp"
#include "radcorr/matcher.hpp"
#include "radcorr/model.hpp"

namespace radcorr {

/// Which rows of G the loss supervises.
enum class Supervision {
  kAllRows,      // every real row, "0"-labeled non-matches included
  kMatchedRows,  // only rows with a nonzero label
};

struct TrainConfig {
  int batch_size = 8;
  int epochs = 100;
  diff::AdamConfig adam;
  std::uint64_t seed = 0;
  int checkpoint_every = 0;  // epochs; 0 disables periodic checkpoints
  Supervision supervision = Supervision::kAllRows;
  double val_fraction = 0.2;
  bool shuffle = true;
  /// Acceptance threshold used for the per-epoch validation metrics.
  double val_threshold = -std::numeric_limits<double>::infinity();
  ScoreSpace val_score_space = ScoreSpace::kLogit;

  /// Throws Error(kInvalidArgument).
  void validate() const;
};

struct TrainExample {
  std::string id;
  PaddedCloud prev;
  PaddedCloud curr;
  LabelSet labels;
  /// Reference correspondences for validation metrics, (prev, curr) index
  /// pairs. Without truth the nonzero labels are used instead.
  std::vector<std::pair<int, int>> truth;
  bool has_truth = false;

  std::vector<std::pair<int, int>> reference_pairs() const;
};

/// Mean over supervised rows i of -log softmax(G.row(i))[label_i]; the
/// softmax spans all N+1 columns. Padded rows are never supervised. An
/// example without supervised rows contributes a constant zero and a
/// warning.
diff::Tensor row_cross_entropy(const AffinityMatrix& g, const LabelSet& labels,
                               Supervision mode = Supervision::kAllRows);

struct EpochMetrics {
  int epoch = 0;
  double mean_loss = 0.0;
  double val_precision = 0.0;
  double val_recall = 0.0;
  double wall_seconds = 0.0;
};

/// "epoch,mean_loss,val_precision,val_recall,wall_seconds"
std::string metrics_csv_header();
std::string metrics_csv_line(const EpochMetrics& m);

struct TrainOutputs {
  /// When set: metrics.csv, model.ckpt and periodic checkpoints go here.
  std::filesystem::path out_dir;
  std::function<void(const EpochMetrics&)> on_epoch;
  /// Extra checkpoint header entries (e.g. the dataset manifest's N).
  std::vector<std::pair<std::string, std::string>> checkpoint_header;
};

struct TrainResult {
  CorrespondenceNet model;
  std::vector<EpochMetrics> history;
  double initial_loss = 0.0;  // mean training loss before the first step
};

/// Seeded shuffle of 0..n-1, split into (train, validation) with
/// round(n * val_fraction) validation items (at least one train item).
std::pair<std::vector<int>, std::vector<int>> split_indices(
    std::size_t n, double val_fraction, std::uint64_t seed);

/// Mean row_cross_entropy of the model over `examples`, no gradients.
double mean_loss(const CorrespondenceNet& net,
                 const std::vector<TrainExample>& examples, Supervision mode);

/// Precision/recall of the padded examples' thresholded LSA matches against
/// their reference pairs (micro-averaged).
std::pair<double, double> evaluate_examples(
    const CorrespondenceNet& net, const std::vector<TrainExample>& examples,
    double threshold, ScoreSpace space);

/// Mini-batch Adam on the batch-mean of per-example losses. A non-finite loss
/// restores the last epoch's parameters, writes them as the checkpoint (when
/// an output dir is set), and throws Error(kDiverged).
TrainResult train(const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& val_set, ModelConfig mconf,
                  const TrainConfig& tconf, const TrainOutputs& outputs = {});

}  // namespace radcorr
