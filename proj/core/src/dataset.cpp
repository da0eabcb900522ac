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
#include "radcorr/dataset.hpp"

#include "radcorr/error.hpp"

namespace radcorr {

namespace {

// raw index -> filtered index, -1 when dropped.
std::vector<int> inverse_map(const std::vector<int>& kept, std::size_t raw_size) {
  std::vector<int> inv(raw_size, -1);
  for (std::size_t i = 0; i < kept.size(); ++i) inv[kept[i]] = static_cast<int>(i);
  return inv;
}

PointCloud select(const PointCloud& cloud, const std::vector<int>& idx) {
  PointCloud out;
  out.timestamp = cloud.timestamp;
  out.frame_id = cloud.frame_id;
  for (int i : idx) out.points.push_back(cloud.points[i]);
  return out;
}

}  // namespace

std::vector<PairRecord> sequence_pairs(const std::string& name,
                                       const std::vector<ScanRecord>& records) {
  const std::vector<ScanPair> raw = make_pairs(records);
  std::vector<PairRecord> out;
  out.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    PairRecord p;
    p.id = pair_id(name, k);
    p.prev_timestamp = records[k].timestamp;
    p.curr_timestamp = records[k + 1].timestamp;
    p.prev = raw[k].prev;
    p.curr = raw[k].curr;
    p.relative = raw[k].relative;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PairRecord> synthetic_pairs(const std::string& name,
                                        const SynthSequence& sequence) {
  std::vector<PairRecord> out = sequence_pairs(name, sequence.records);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].truth = sequence.truth[k];
    out[k].has_truth = true;
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& dir, int expected_version) {
  Dataset ds;
  ds.manifest = read_manifest(dir / "manifest.txt", expected_version);
  for (const SequenceEntry& entry : ds.manifest.sequences) {
    const auto records = read_sequence(dir / (entry.name + ".seq"), expected_version);
    std::vector<PairRecord> pairs = sequence_pairs(entry.name, records);
    const auto truth_path = dir / (entry.name + ".truth");
    if (std::filesystem::exists(truth_path)) {
      const std::vector<PairTruth> truth = read_truth(truth_path, expected_version);
      for (const PairTruth& t : truth) {
        bool found = false;
        for (PairRecord& p : pairs) {
          if (p.id == t.id) {
            p.truth = t.pairs;
            p.has_truth = true;
            found = true;
            break;
          }
        }
        if (!found) {
          throw Error(ErrorKind::kFormat, truth_path.string() + ": unknown pair id '" +
                                              t.id + "'");
        }
      }
    }
    for (PairRecord& p : pairs) ds.pairs.push_back(std::move(p));
  }
  return ds;
}

LabelSet label_pair(const PairRecord& pair, double gate, const FovSpec& fov) {
  const std::vector<int> prev_kept = fov_indices(pair.prev, fov);
  const std::vector<int> curr_kept = fov_indices(pair.curr, fov);
  const LabelSet filtered = generate_labels(select(pair.prev, prev_kept),
                                            select(pair.curr, curr_kept),
                                            pair.relative, gate);
  LabelSet raw;
  raw.gate = gate;
  raw.labels.assign(pair.prev.size(), 0);
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    const int l = filtered.labels[i];
    if (l > 0) raw.labels[prev_kept[i]] = curr_kept[l - 1] + 1;
  }
  return raw;
}

TrainExample make_example(const PairRecord& pair, const LabelSet& raw_labels,
                          const FovSpec& fov, int n_max) {
  if (raw_labels.size() != pair.prev.size()) {
    throw Error(ErrorKind::kShapeMismatch,
                "make_example: '" + pair.id + "' has " +
                    std::to_string(raw_labels.size()) + " labels for " +
                    std::to_string(pair.prev.size()) + " points");
  }
  const std::vector<int> prev_kept = fov_indices(pair.prev, fov);
  const std::vector<int> curr_kept = fov_indices(pair.curr, fov);
  const std::vector<int> curr_inv = inverse_map(curr_kept, pair.curr.size());
  const std::vector<int> prev_inv = inverse_map(prev_kept, pair.prev.size());

  TrainExample ex;
  ex.id = pair.id;
  ex.prev = pad_cloud(select(pair.prev, prev_kept), n_max);
  ex.curr = pad_cloud(select(pair.curr, curr_kept), n_max);
  ex.labels.gate = raw_labels.gate;
  for (int raw : prev_kept) {
    const int l = raw_labels.labels[raw];
    if (l < 0 || static_cast<std::size_t>(l) > pair.curr.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "make_example: '" + pair.id + "' label out of range");
    }
    ex.labels.labels.push_back(l > 0 && curr_inv[l - 1] >= 0 ? curr_inv[l - 1] + 1 : 0);
  }
  ex.has_truth = pair.has_truth;
  for (const auto& [p, c] : pair.truth) {
    if (p < 0 || c < 0 || static_cast<std::size_t>(p) >= pair.prev.size() ||
        static_cast<std::size_t>(c) >= pair.curr.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "make_example: '" + pair.id + "' truth index out of range");
    }
    if (prev_inv[p] >= 0 && curr_inv[c] >= 0) ex.truth.emplace_back(prev_inv[p], curr_inv[c]);
  }
  return ex;
}

}  // namespace radcorr
