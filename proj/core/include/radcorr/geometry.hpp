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

#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace radcorr {

/// A point in the radar sensor frame, meters.
using Point3 = Eigen::Vector3d;

/// Variable-length scan. Index within `points` is the point's identity.
struct PointCloud {
  std::vector<Point3> points;
  double timestamp = 0.0;
  std::string frame_id;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Rigid transform x -> rotation * x + translation.
struct PoseSE3 {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static PoseSE3 identity() { return {}; }
  static PoseSE3 from_quaternion(const Eigen::Quaterniond& q,
                                 const Eigen::Vector3d& t);

  Point3 apply(const Point3& p) const { return rotation * p + translation; }
  PoseSE3 inverse() const;
  /// (*this) after `rhs`: x -> this(rhs(x)).
  PoseSE3 operator*(const PoseSE3& rhs) const;

  /// Orthonormality and det = +1 within `tol`.
  bool is_valid(double tol = 1e-9) const;
};

/// Sensor field of view as closed spherical-coordinate intervals.
struct FovSpec {
  double azimuth_min = -60.0 * std::numbers::pi / 180.0;
  double azimuth_max = 60.0 * std::numbers::pi / 180.0;
  double elevation_min = -15.0 * std::numbers::pi / 180.0;
  double elevation_max = 15.0 * std::numbers::pi / 180.0;
  double range_min = 0.2;
  double range_max = 12.0;

  /// Throws Error(kInvalidArgument) unless min < max for every pair and
  /// range_min >= 0.
  void validate() const;
  bool contains(const Point3& p) const;
};

using PaddedMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// (n_max + 1) x 3 network input. Row 0 is the zero "no match" slot, rows
/// 1..valid_count hold the cloud, the rest is zero padding.
struct PaddedCloud {
  PaddedMatrix matrix;
  int valid_count = 0;

  int n_max() const { return static_cast<int>(matrix.rows()) - 1; }
};

PointCloud transform_points(const PointCloud& cloud, const PoseSE3& pose);

PointCloud fov_filter(const PointCloud& cloud, const FovSpec& fov);

/// Indices of the points of `cloud` that lie inside `fov`, ascending.
std::vector<int> fov_indices(const PointCloud& cloud, const FovSpec& fov);

/// Throws Error(kCapacity) if the cloud is longer than n_max; the dataset-wide
/// N then has to be recomputed.
PaddedCloud pad_cloud(const PointCloud& cloud, int n_max);

/// Inverse of pad_cloud for the point payload (timestamp/frame are not kept).
PointCloud unpad_cloud(const PaddedCloud& padded);

bool all_finite(const Point3& p);

}  // namespace radcorr
