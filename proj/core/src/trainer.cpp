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
#include "radcorr/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include <spdlog/spdlog.h>

#include "radcorr/assignment.hpp"
#include "radcorr/diff/checkpoint.hpp"
#include "radcorr/diff/ops.hpp"
#include "radcorr/error.hpp"
#include "radcorr/kvconfig.hpp"

namespace radcorr {

using diff::Tensor;

void TrainConfig::validate() const {
  if (batch_size < 1) {
    throw Error(ErrorKind::kInvalidArgument, "TrainConfig: batch_size must be >= 1");
  }
  if (epochs < 0) {
    throw Error(ErrorKind::kInvalidArgument, "TrainConfig: epochs must be >= 0");
  }
  if (!(adam.learning_rate > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "TrainConfig: learning_rate must be > 0");
  }
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "TrainConfig: val_fraction must be in [0, 1)");
  }
  if (checkpoint_every < 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "TrainConfig: checkpoint_every must be >= 0");
  }
}

std::vector<std::pair<int, int>> TrainExample::reference_pairs() const {
  if (has_truth) return truth;
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels.labels[i] > 0) {
      out.emplace_back(static_cast<int>(i), labels.labels[i] - 1);
    }
  }
  return out;
}

Tensor row_cross_entropy(const AffinityMatrix& g, const LabelSet& labels,
                         Supervision mode) {
  if (static_cast<int>(labels.size()) != g.valid_rows) {
    throw Error(ErrorKind::kShapeMismatch,
                "row_cross_entropy: " + std::to_string(labels.size()) +
                    " labels for " + std::to_string(g.valid_rows) + " real rows");
  }
  std::vector<std::pair<int, int>> targets;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels.labels[i];
    if (label < 0 || label > g.valid_cols) {
      throw Error(ErrorKind::kInvalidArgument,
                  "row_cross_entropy: label " + std::to_string(label) +
                      " outside [0, " + std::to_string(g.valid_cols) + "]");
    }
    if (mode == Supervision::kMatchedRows && label == 0) continue;
    targets.emplace_back(static_cast<int>(i) + 1, label);
  }
  if (targets.empty()) {
    spdlog::warn("row_cross_entropy: example has no supervised rows, loss 0");
    return Tensor::constant(diff::Matrix::Zero(1, 1));
  }
  const Tensor log_probs = diff::log_softmax_rows(g.g);
  return diff::scale(diff::sum(diff::pick(log_probs, targets)),
                     -1.0 / static_cast<double>(targets.size()));
}

std::string metrics_csv_header() {
  return "epoch,mean_loss,val_precision,val_recall,wall_seconds";
}

std::string metrics_csv_line(const EpochMetrics& m) {
  std::ostringstream line;
  line << m.epoch << ',' << format_double(m.mean_loss) << ','
       << format_double(m.val_precision) << ',' << format_double(m.val_recall)
       << ',' << format_double(m.wall_seconds);
  return line.str();
}

std::pair<std::vector<int>, std::vector<int>> split_indices(
    std::size_t n, double val_fraction, std::uint64_t seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t n_val = static_cast<std::size_t>(std::llround(val_fraction * n));
  if (n > 0 && n_val >= n) n_val = n - 1;
  std::vector<int> val(order.begin(), order.begin() + n_val);
  std::vector<int> tr(order.begin() + n_val, order.end());
  std::sort(val.begin(), val.end());
  std::sort(tr.begin(), tr.end());
  return {tr, val};
}

double mean_loss(const CorrespondenceNet& net,
                 const std::vector<TrainExample>& examples, Supervision mode) {
  if (examples.empty()) return 0.0;
  diff::NoGradGuard no_grad;
  double total = 0.0;
  for (const TrainExample& ex : examples) {
    total += row_cross_entropy(net.affinity(ex.prev, ex.curr), ex.labels, mode).item();
  }
  return total / static_cast<double>(examples.size());
}

std::pair<double, double> evaluate_examples(
    const CorrespondenceNet& net, const std::vector<TrainExample>& examples,
    double threshold, ScoreSpace space) {
  diff::NoGradGuard no_grad;
  long predicted = 0;
  long correct = 0;
  long reference = 0;
  for (const TrainExample& ex : examples) {
    const auto ref = ex.reference_pairs();
    reference += static_cast<long>(ref.size());
    if (ex.prev.valid_count == 0 || ex.curr.valid_count == 0) continue;
    const AffinityMatrix g = net.affinity(ex.prev, ex.curr);
    Eigen::MatrixXd block;
    if (space == ScoreSpace::kRowSoftmax) {
      block = diff::softmax_rows(g.g).value().block(1, 1, g.valid_rows, g.valid_cols);
    } else {
      block = g.real_block();
    }
    const std::set<std::pair<int, int>> truth(ref.begin(), ref.end());
    for (const auto& [r, c] : solve_max(block).pairs) {
      if (block(r, c) < threshold) continue;
      ++predicted;
      correct += truth.count({r, c});
    }
  }
  const double precision =
      predicted > 0 ? static_cast<double>(correct) / predicted : 1.0;
  const double recall =
      reference > 0 ? static_cast<double>(correct) / reference : 1.0;
  return {precision, recall};
}

namespace {

void check_examples(const std::vector<TrainExample>& set, int n_max) {
  for (const TrainExample& ex : set) {
    if (ex.prev.n_max() != n_max || ex.curr.n_max() != n_max) {
      throw Error(ErrorKind::kShapeMismatch,
                  "train: example '" + ex.id + "' padded to a different N");
    }
    if (static_cast<int>(ex.labels.size()) != ex.prev.valid_count) {
      throw Error(ErrorKind::kInvalidArgument,
                  "train: example '" + ex.id + "' label count != cloud length");
    }
    validate_labels(ex.labels, static_cast<std::size_t>(ex.curr.valid_count));
  }
}

std::vector<diff::Matrix> snapshot(const diff::ParamStore& store) {
  std::vector<diff::Matrix> out;
  for (const std::string& name : store.names()) out.push_back(store.get(name).value());
  return out;
}

void restore(diff::ParamStore& store, const std::vector<diff::Matrix>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    store.get(store.names()[i]).mutable_value() = values[i];
  }
}

}  // namespace

TrainResult train(const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& val_set, ModelConfig mconf,
                  const TrainConfig& tconf, const TrainOutputs& outputs) {
  tconf.validate();
  if (train_set.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "train: empty training set");
  }
  mconf.n_max = train_set.front().prev.n_max();
  check_examples(train_set, mconf.n_max);
  check_examples(val_set, mconf.n_max);

  TrainResult result{CorrespondenceNet(mconf, tconf.seed), {}, 0.0};
  CorrespondenceNet& net = result.model;
  diff::Adam adam(tconf.adam);
  std::mt19937_64 shuffle_rng(tconf.seed ^ 0x9e3779b97f4a7c15ULL);

  auto header = outputs.checkpoint_header;
  header.emplace_back("train.seed", std::to_string(tconf.seed));
  const bool write_files = !outputs.out_dir.empty();
  std::ofstream metrics_log;
  if (write_files) {
    std::filesystem::create_directories(outputs.out_dir);
    metrics_log.open(outputs.out_dir / "metrics.csv", std::ios::trunc);
    if (!metrics_log) {
      throw Error(ErrorKind::kNotFound, "train: cannot write metrics.csv in '" +
                                            outputs.out_dir.string() + "'");
    }
    metrics_log << metrics_csv_header() << '\n';
  }

  result.initial_loss = mean_loss(net, train_set, tconf.supervision);
  std::vector<diff::Matrix> last_good = snapshot(net.params());
  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  const auto t0 = std::chrono::steady_clock::now();

  for (int epoch = 1; epoch <= tconf.epochs; ++epoch) {
    if (tconf.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(tconf.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(tconf.batch_size));
      // Shuffling picks the batch members; summing them in index order keeps a
      // full-batch run bit-identical regardless of the shuffle.
      std::vector<int> batch(order.begin() + start, order.begin() + stop);
      std::sort(batch.begin(), batch.end());
      const double inv_b = 1.0 / static_cast<double>(batch.size());
      net.params().zero_grad();
      double batch_loss = 0.0;
      for (int idx : batch) {
        const TrainExample& ex = train_set[idx];
        const Tensor loss = row_cross_entropy(net.affinity(ex.prev, ex.curr),
                                              ex.labels, tconf.supervision);
        batch_loss += loss.item();
        diff::backward(diff::scale(loss, inv_b));
      }
      if (!std::isfinite(batch_loss)) {
        restore(net.params(), last_good);
        if (write_files) save_model(net, outputs.out_dir / "model.ckpt", header);
        throw Error(ErrorKind::kDiverged,
                    "train: non-finite loss in epoch " + std::to_string(epoch) +
                        "; parameters rolled back to epoch " +
                        std::to_string(epoch - 1));
      }
      epoch_loss += batch_loss;
      adam.step(net.params());
    }
    last_good = snapshot(net.params());

    EpochMetrics m;
    m.epoch = epoch;
    m.mean_loss = epoch_loss / static_cast<double>(train_set.size());
    std::tie(m.val_precision, m.val_recall) = evaluate_examples(
        net, val_set, tconf.val_threshold, tconf.val_score_space);
    m.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    result.history.push_back(m);
    if (write_files) {
      metrics_log << metrics_csv_line(m) << '\n' << std::flush;
      if (tconf.checkpoint_every > 0 && epoch % tconf.checkpoint_every == 0) {
        char name[64];
        std::snprintf(name, sizeof(name), "checkpoint_epoch_%04d.ckpt", epoch);
        save_model(net, outputs.out_dir / name, header);
      }
    }
    if (outputs.on_epoch) outputs.on_epoch(m);
  }
  if (write_files) save_model(net, outputs.out_dir / "model.ckpt", header);
  return result;
}

}  // namespace radcorr
