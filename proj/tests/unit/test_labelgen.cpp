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
#include <cmath>
#include <algorithm>
#include <limits>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "radcorr/error.hpp"
#include "radcorr/labelgen.hpp"

namespace radcorr {
namespace {

PointCloud random_cloud(std::mt19937_64& rng, int n, double scale = 5.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  PointCloud c;
  for (int i = 0; i < n; ++i) c.points.emplace_back(u(rng), u(rng), u(rng));
  return c;
}

PoseSE3 random_pose(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return PoseSE3::from_quaternion(q.normalized(), {n(rng), n(rng), n(rng)});
}

TEST(BuildCostMatrix, IdenticalCloudsHaveZeroDiagonal) {
  std::mt19937_64 rng(21);
  const PointCloud c = random_cloud(rng, 6);
  const CostMatrix m = build_cost_matrix(c, c, PoseSE3::identity());
  ASSERT_EQ(m.rows(), 6);
  ASSERT_EQ(m.cols(), 6);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(m(i, i), 0.0);
}

TEST(BuildCostMatrix, TranslatedSinglePoint) {
  PointCloud prev, curr;
  prev.points.emplace_back(2.0, 1.0, 0.5);
  curr.points.emplace_back(3.0, 1.0, 0.5);
  PoseSE3 pose;
  pose.translation = Eigen::Vector3d(1.0, 0.0, 0.0);
  const CostMatrix m = build_cost_matrix(prev, curr, pose);
  ASSERT_EQ(m.rows(), 1);
  ASSERT_EQ(m.cols(), 1);
  EXPECT_EQ(m(0, 0), 0.0);
}

TEST(BuildCostMatrix, MatchesScalarComputation) {
  std::mt19937_64 rng(22);
  const PointCloud prev = random_cloud(rng, 8);
  const PointCloud curr = random_cloud(rng, 5);
  const Eigen::Quaterniond q = Eigen::Quaterniond(0.3, -0.4, 0.8, 0.2).normalized();
  const Eigen::Vector3d t(0.5, -1.5, 2.0);
  const CostMatrix m = build_cost_matrix(prev, curr, PoseSE3::from_quaternion(q, t));
  ASSERT_EQ(m.rows(), 5);
  ASSERT_EQ(m.cols(), 8);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 8; ++j) {
      const Eigen::Vector3d moved =
          testing::quaternion_rotate(q.w(), q.x(), q.y(), q.z(), prev.points[j]) + t;
      const double dx = curr.points[i].x() - moved.x();
      const double dy = curr.points[i].y() - moved.y();
      const double dz = curr.points[i].z() - moved.z();
      EXPECT_NEAR(m(i, j), std::sqrt(dx * dx + dy * dy + dz * dz), 1e-12);
    }
  }
}

TEST(BuildCostMatrix, EmptyCloudSignalsNoLabels) {
  std::mt19937_64 rng(23);
  try {
    build_cost_matrix(PointCloud{}, random_cloud(rng, 3), PoseSE3::identity());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNoLabels);
  }
}

TEST(GenerateLabels, SelfMatching) {
  std::mt19937_64 rng(24);
  const PointCloud c = random_cloud(rng, 5);
  const LabelSet l = generate_labels(c, c, PoseSE3::identity(), 0.5);
  EXPECT_EQ(l.labels, (std::vector<int>{1, 2, 3, 4, 5}));
  EXPECT_EQ(l.gate, 0.5);
}

TEST(GenerateLabels, NoOverlapGivesAllZero) {
  std::mt19937_64 rng(25);
  const PointCloud prev = random_cloud(rng, 4, 1.0);
  PointCloud curr = random_cloud(rng, 4, 1.0);
  for (Point3& p : curr.points) p.x() += 100.0;
  const LabelSet l = generate_labels(prev, curr, PoseSE3::identity(), 0.5);
  EXPECT_EQ(l.labels, (std::vector<int>(4, 0)));
}

TEST(GenerateLabels, EmptyCloudGivesAllZero) {
  std::mt19937_64 rng(26);
  const PointCloud prev = random_cloud(rng, 3);
  const LabelSet l = generate_labels(prev, PointCloud{}, PoseSE3::identity(), 0.5);
  EXPECT_EQ(l.labels, (std::vector<int>(3, 0)));
  EXPECT_TRUE(generate_labels(PointCloud{}, prev, PoseSE3::identity(), 0.5).labels.empty());
}

TEST(GenerateLabels, RejectsNonPositiveGate) {
  std::mt19937_64 rng(27);
  const PointCloud c = random_cloud(rng, 3);
  EXPECT_THROW(generate_labels(c, c, PoseSE3::identity(), 0.0), Error);
  EXPECT_THROW(generate_labels(c, c, PoseSE3::identity(), -1.0), Error);
}

TEST(GenerateLabels, GhostsAndDropoutRecoverKnownTable) {
  // Hand-built scene: 6 previous points, one dropped, two ghosts appended, then
  // the current cloud order is scrambled with a known permutation.
  std::mt19937_64 rng(28);
  PointCloud prev;
  for (int i = 0; i < 6; ++i) prev.points.emplace_back(2.0 * i, 1.5 * (i % 2), 0.3 * i);
  const PoseSE3 pose = random_pose(rng);
  const PointCloud moved = transform_points(prev, pose);

  const std::vector<int> kept = {0, 1, 2, 4, 5};  // point 3 dropped
  const std::vector<int> slot = {3, 0, 6, 1, 5};  // destination index in curr
  PointCloud curr;
  curr.points.resize(7);
  for (std::size_t k = 0; k < kept.size(); ++k) curr.points[slot[k]] = moved.points[kept[k]];
  curr.points[2] = moved.points[3] + Eigen::Vector3d(40.0, 0.0, 0.0);
  curr.points[4] = Eigen::Vector3d(-50.0, -50.0, -50.0);

  std::vector<int> expected(6, 0);
  for (std::size_t k = 0; k < kept.size(); ++k) expected[kept[k]] = slot[k] + 1;

  const LabelSet l = generate_labels(prev, curr, pose, 0.3);
  EXPECT_EQ(l.labels, expected);
}

TEST(GenerateLabels, PropertiesOnRandomScenes) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> size(1, 12);
  std::normal_distribution<double> jitter(0.0, 0.2);
  for (int trial = 0; trial < 200; ++trial) {
    const PointCloud prev = random_cloud(rng, size(rng));
    const PoseSE3 pose = random_pose(rng);
    PointCloud curr = transform_points(prev, pose);
    for (Point3& p : curr.points) p += Eigen::Vector3d(jitter(rng), jitter(rng), jitter(rng));
    const PointCloud extra = random_cloud(rng, size(rng) / 2);
    curr.points.insert(curr.points.end(), extra.points.begin(), extra.points.end());
    std::shuffle(curr.points.begin(), curr.points.end(), rng);

    const double gate = 0.4;
    const LabelSet l = generate_labels(prev, curr, pose, gate);
    ASSERT_EQ(l.size(), prev.size());
    EXPECT_NO_THROW(validate_labels(l, curr.size()));

    const PointCloud moved = transform_points(prev, pose);
    std::set<int> used;
    for (std::size_t i = 0; i < l.size(); ++i) {
      const int lab = l.labels[i];
      if (lab == 0) continue;
      EXPECT_LE((curr.points[lab - 1] - moved.points[i]).norm(), gate);
      EXPECT_TRUE(used.insert(lab).second);
    }
  }
}

TEST(GenerateLabels, InvariantToCommonRigidMotion) {
  std::mt19937_64 rng(30);
  std::normal_distribution<double> jitter(0.0, 0.1);
  for (int trial = 0; trial < 50; ++trial) {
    const PointCloud prev = random_cloud(rng, 8);
    const PoseSE3 pose = random_pose(rng);
    PointCloud curr = transform_points(prev, pose);
    for (Point3& p : curr.points) p += Eigen::Vector3d(jitter(rng), jitter(rng), jitter(rng));
    const LabelSet base = generate_labels(prev, curr, pose, 0.25);

    // Move both clouds by their own rigid motions and fold them into the pose.
    const PoseSE3 a = random_pose(rng);
    const PoseSE3 b = random_pose(rng);
    const PointCloud prev2 = transform_points(prev, a);
    const PointCloud curr2 = transform_points(curr, b);
    const PoseSE3 pose2 = b * pose * a.inverse();
    EXPECT_EQ(generate_labels(prev2, curr2, pose2, 0.25).labels, base.labels);
  }
}

TEST(GenerateLabels, InfiniteGateAssignsEveryRow) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const PointCloud prev = random_cloud(rng, 5);
    const PointCloud curr = random_cloud(rng, 8);
    const LabelSet l = generate_labels(prev, curr, random_pose(rng),
                                       std::numeric_limits<double>::infinity());
    EXPECT_EQ(l.matched_count(), 5);
  }
}

TEST(ValidateLabels, RejectsOutOfRangeAndDuplicates) {
  EXPECT_NO_THROW(validate_labels(LabelSet{{0, 2, 1, 0}}, 2));
  EXPECT_THROW(validate_labels(LabelSet{{0, 3}}, 2), Error);
  EXPECT_THROW(validate_labels(LabelSet{{-1}}, 2), Error);
  EXPECT_THROW(validate_labels(LabelSet{{1, 1}}, 2), Error);
}

}  // namespace
}  // namespace radcorr
