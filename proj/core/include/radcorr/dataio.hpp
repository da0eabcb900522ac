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

#include <Eigen/Geometry>

#include "radcorr/geometry.hpp"
#include "radcorr/labelgen.hpp"
#include "radcorr/matcher.hpp"

namespace radcorr {

inline constexpr int kFormatVersion = 1;

/// One radar scan with the sensor's ground-truth pose in a world frame
/// (sensor -> world). The orientation is kept as the stored quaternion so
/// files round-trip bit-exactly.
struct ScanRecord {
  double timestamp = 0.0;
  std::vector<Point3> points;
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();  // (w,x,y,z)
  Eigen::Vector3d position = Eigen::Vector3d::Zero();

  PoseSE3 pose() const { return PoseSE3::from_quaternion(orientation, position); }
  PointCloud cloud() const;
};

/// Sequence file, one scan per line:
///
///   radcorr-sequence
///   format_version 1
///   # scan timestamp qw qx qy qz tx ty tz count x1 y1 z1 ... (meters)
///   scan 0.1 1 0 0 0 0 0 0 2 1.5 0.2 0.1 3.0 -1.0 0.4
///
/// Doubles are written in shortest round-trip form. Reading validates every
/// record: finite values, no point at the exact origin, unit quaternion
/// within 1e-6 (renormalized when off by more than 1e-12), strictly
/// increasing timestamps. Errors carry the file name and line number.
void write_sequence(const std::vector<ScanRecord>& records,
                    const std::filesystem::path& path);
std::vector<ScanRecord> read_sequence(const std::filesystem::path& path,
                                      int expected_version = kFormatVersion);

struct ScanPair {
  PointCloud prev;
  PointCloud curr;
  /// Maps previous-frame coordinates into the current frame:
  /// inverse(T_curr) * T_prev.
  PoseSE3 relative;
};

std::vector<ScanPair> make_pairs(const std::vector<ScanRecord>& records);

struct SequenceEntry {
  std::string name;  // files are <name>.seq, <name>.truth, <name>.labels
  int records = 0;
};

/// Dataset description, key = value text.
struct Manifest {
  int format_version = kFormatVersion;
  int n_max = 0;
  FovSpec fov;
  double gate = 0.5;
  std::vector<SequenceEntry> sequences;
};

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path,
                       int expected_version = kFormatVersion);

/// Longest FOV-filtered cloud over all records.
int compute_n_max(const std::vector<std::vector<ScanRecord>>& sequences,
                  const FovSpec& fov);

/// "<sequence>:<index of the previous scan>"
std::string pair_id(const std::string& sequence, std::size_t prev_index);

struct PairLabels {
  std::string id;
  double prev_timestamp = 0.0;
  double curr_timestamp = 0.0;
  LabelSet labels;
};

/// radcorr-labels / format_version / "pair id t_prev t_curr gate L l_1..l_L"
void write_labels(const std::vector<PairLabels>& labels,
                  const std::filesystem::path& path);
std::vector<PairLabels> read_labels(const std::filesystem::path& path,
                                    int expected_version = kFormatVersion);

struct PairMatches {
  std::string id;
  double prev_timestamp = 0.0;
  double curr_timestamp = 0.0;
  std::vector<Match> matches;
};

/// radcorr-matches / format_version / "pair id t_prev t_curr count
/// (i j score)*count"
void write_matches(const std::vector<PairMatches>& matches,
                   const std::filesystem::path& path);
std::vector<PairMatches> read_matches(const std::filesystem::path& path,
                                      int expected_version = kFormatVersion);

struct PairTruth {
  std::string id;
  std::vector<std::pair<int, int>> pairs;  // (prev index, curr index)
};

/// radcorr-truth / format_version / "pair id count (i j)*count"
void write_truth(const std::vector<PairTruth>& truth,
                 const std::filesystem::path& path);
std::vector<PairTruth> read_truth(const std::filesystem::path& path,
                                  int expected_version = kFormatVersion);

}  // namespace radcorr
