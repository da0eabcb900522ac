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
#include "radcorr/geometry.hpp"

#include <cmath>
#include <sstream>

#include "radcorr/error.hpp"

namespace radcorr {

PoseSE3 PoseSE3::from_quaternion(const Eigen::Quaterniond& q,
                                 const Eigen::Vector3d& t) {
  PoseSE3 pose;
  pose.rotation = q.normalized().toRotationMatrix();
  pose.translation = t;
  return pose;
}

PoseSE3 PoseSE3::inverse() const {
  PoseSE3 inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

PoseSE3 PoseSE3::operator*(const PoseSE3& rhs) const {
  PoseSE3 out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

bool PoseSE3::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) {
    return false;
  }
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

void FovSpec::validate() const {
  if (!(azimuth_min < azimuth_max) || !(elevation_min < elevation_max) ||
      !(range_min < range_max) || !(range_min >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "FovSpec: every min must be below its max and range_min >= 0");
  }
}

bool FovSpec::contains(const Point3& p) const {
  const double planar = std::hypot(p.x(), p.y());
  const double azimuth = std::atan2(p.y(), p.x());
  const double elevation = std::atan2(p.z(), planar);
  const double range = p.norm();
  return azimuth >= azimuth_min && azimuth <= azimuth_max &&
         elevation >= elevation_min && elevation <= elevation_max &&
         range >= range_min && range <= range_max;
}

bool all_finite(const Point3& p) { return p.allFinite(); }

PointCloud transform_points(const PointCloud& cloud, const PoseSE3& pose) {
  if (!pose.is_valid()) {
    throw Error(ErrorKind::kInvalidArgument,
                "transform_points: pose rotation is not a proper rotation");
  }
  PointCloud out;
  out.timestamp = cloud.timestamp;
  out.frame_id = cloud.frame_id;
  out.points.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (!all_finite(p)) {
      std::ostringstream msg;
      msg << "transform_points: point " << i << " is not finite ("
          << p.transpose() << ")";
      throw Error(ErrorKind::kNonFinite, msg.str());
    }
    out.points.push_back(pose.apply(p));
  }
  return out;
}

std::vector<int> fov_indices(const PointCloud& cloud, const FovSpec& fov) {
  std::vector<int> kept;
  kept.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (fov.contains(cloud.points[i])) kept.push_back(static_cast<int>(i));
  }
  return kept;
}

PointCloud fov_filter(const PointCloud& cloud, const FovSpec& fov) {
  PointCloud out;
  out.timestamp = cloud.timestamp;
  out.frame_id = cloud.frame_id;
  for (int i : fov_indices(cloud, fov)) out.points.push_back(cloud.points[i]);
  return out;
}

PaddedCloud pad_cloud(const PointCloud& cloud, int n_max) {
  if (n_max < 0) {
    throw Error(ErrorKind::kInvalidArgument, "pad_cloud: n_max must be >= 0");
  }
  if (cloud.size() > static_cast<std::size_t>(n_max)) {
    std::ostringstream msg;
    msg << "pad_cloud: cloud has " << cloud.size()
        << " points but N = " << n_max
        << "; recompute the dataset-wide maximum";
    throw Error(ErrorKind::kCapacity, msg.str());
  }
  PaddedCloud padded;
  padded.matrix = PaddedMatrix::Zero(n_max + 1, 3);
  padded.valid_count = static_cast<int>(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    padded.matrix.row(static_cast<Eigen::Index>(i) + 1) =
        cloud.points[i].transpose();
  }
  return padded;
}

PointCloud unpad_cloud(const PaddedCloud& padded) {
  PointCloud out;
  out.points.reserve(padded.valid_count);
  for (int i = 1; i <= padded.valid_count; ++i) {
    out.points.emplace_back(padded.matrix.row(i).transpose());
  }
  return out;
}

}  // namespace radcorr
