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
#include "radcorr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <spdlog/spdlog.h>

#include "radcorr/error.hpp"

namespace radcorr {

namespace {

constexpr int kRedrawAttempts = 10;

struct Landmark {
  long long id;
  Eigen::Vector3d position;
};

double fov_volume(const FovSpec& f) {
  return (std::pow(f.range_max, 3) - std::pow(f.range_min, 3)) / 3.0 *
         (f.azimuth_max - f.azimuth_min) *
         (std::sin(f.elevation_max) - std::sin(f.elevation_min));
}

// Half-height of the landmark slab: the vertical extent of the FOV at
// maximum range.
double slab_half_height(const FovSpec& f) {
  return f.range_max *
         std::max(std::abs(std::sin(f.elevation_max)), std::abs(std::sin(f.elevation_min)));
}

class LandmarkField {
 public:
  LandmarkField(const SynthConfig& conf)
      : seed_(conf.seed), cell_(conf.cell_size), half_h_(slab_half_height(conf.fov)) {
    const double mean_points = 0.5 * (conf.min_points + conf.max_points);
    // Detections per visible landmark: kept ones plus ghosts.
    const double yield = std::max(1e-6, (1.0 - conf.dropout) + conf.ghost_rate);
    const double density = mean_points / yield / fov_volume(conf.fov);
    per_cell_ = density * cell_ * cell_ * 2.0 * half_h_;
  }

  const std::vector<Landmark>& cell(long long cx, long long cy) {
    const auto key = std::pair{cx, cy};
    auto it = cells_.find(key);
    if (it != cells_.end()) return it->second;
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(cx), static_cast<std::uint32_t>(cy), 0x5eedu};
    std::mt19937_64 rng(seq);
    std::poisson_distribution<int> count(per_cell_);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Landmark> lms;
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
      Landmark lm;
      lm.id = ((cx & 0xFFFFF) << 40) | ((cy & 0xFFFFF) << 16) | k;
      lm.position = {(static_cast<double>(cx) + u(rng)) * cell_,
                     (static_cast<double>(cy) + u(rng)) * cell_,
                     (2.0 * u(rng) - 1.0) * half_h_};
      lms.push_back(lm);
    }
    return cells_.emplace(key, std::move(lms)).first->second;
  }

  std::vector<Landmark> near(const Eigen::Vector3d& center, double radius) {
    std::vector<Landmark> out;
    const long long x0 = static_cast<long long>(std::floor((center.x() - radius) / cell_));
    const long long x1 = static_cast<long long>(std::floor((center.x() + radius) / cell_));
    const long long y0 = static_cast<long long>(std::floor((center.y() - radius) / cell_));
    const long long y1 = static_cast<long long>(std::floor((center.y() + radius) / cell_));
    for (long long cx = x0; cx <= x1; ++cx) {
      for (long long cy = y0; cy <= y1; ++cy) {
        for (const Landmark& lm : cell(cx, cy)) out.push_back(lm);
      }
    }
    return out;
  }

 private:
  std::uint64_t seed_;
  double cell_;
  double half_h_;
  double per_cell_ = 0.0;
  std::map<std::pair<long long, long long>, std::vector<Landmark>> cells_;
};

Point3 sample_in_fov(const FovSpec& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double az = f.azimuth_min + u(rng) * (f.azimuth_max - f.azimuth_min);
  const double s0 = std::sin(f.elevation_min);
  const double s1 = std::sin(f.elevation_max);
  const double el = std::asin(s0 + u(rng) * (s1 - s0));
  const double r0 = std::pow(f.range_min, 3);
  const double r1 = std::pow(f.range_max, 3);
  const double r = std::cbrt(r0 + u(rng) * (r1 - r0));
  return {r * std::cos(el) * std::cos(az), r * std::cos(el) * std::sin(az),
          r * std::sin(el)};
}

struct Detection {
  Point3 point;
  long long id;
};

std::vector<Detection> observe(const std::vector<Landmark>& landmarks,
                               const PoseSE3& world_from_sensor,
                               const SynthConfig& conf, std::mt19937_64& rng) {
  const PoseSE3 sensor_from_world = world_from_sensor.inverse();
  // normal_distribution needs a positive stddev.
  std::normal_distribution<double> noise(
      0.0, std::max(conf.noise_sigma, 1e-300) / std::sqrt(3.0));
  std::bernoulli_distribution drop(conf.dropout);
  std::vector<Detection> out;
  int visible = 0;
  for (const Landmark& lm : landmarks) {
    const Point3 p = sensor_from_world.apply(lm.position);
    if (!conf.fov.contains(p)) continue;
    ++visible;
    Point3 measured = p;
    if (conf.noise_sigma > 0.0) measured += Point3(noise(rng), noise(rng), noise(rng));
    const bool dropped = drop(rng);
    if (dropped || !conf.fov.contains(measured)) continue;
    out.push_back({measured, lm.id});
  }
  std::poisson_distribution<int> ghosts(conf.ghost_rate * visible);
  const int n_ghosts = conf.ghost_rate > 0.0 && visible > 0 ? ghosts(rng) : 0;
  for (int g = 0; g < n_ghosts; ++g) out.push_back({sample_in_fov(conf.fov, rng), -1});

  // Real detections stay in landmark-id order with ghosts after them, so a
  // static noiseless sensor reproduces identical scans.
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    if ((a.id < 0) != (b.id < 0)) return b.id < 0;
    return a.id >= 0 && a.id < b.id;
  });
  if (static_cast<int>(out.size()) > conf.max_points) {
    std::vector<std::size_t> keep(out.size());
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
    std::shuffle(keep.begin(), keep.end(), rng);
    keep.resize(static_cast<std::size_t>(conf.max_points));
    std::sort(keep.begin(), keep.end());
    std::vector<Detection> thinned;
    for (std::size_t i : keep) thinned.push_back(out[i]);
    out = std::move(thinned);
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  fov.validate();
  if (min_points < 0 || max_points < 1 || min_points > max_points) {
    throw Error(ErrorKind::kInvalidArgument,
                "SynthConfig: need 0 <= min_points <= max_points, max_points >= 1");
  }
  if (!(dropout >= 0.0 && dropout <= 1.0) || !(ghost_rate >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "SynthConfig: dropout must be in [0,1] and ghost_rate >= 0");
  }
  if (!(noise_sigma >= 0.0) || !(translation_step >= 0.0) ||
      !(rotation_step >= 0.0) || !(scan_period > 0.0) || !(cell_size > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "SynthConfig: sigma and step sizes must be >= 0, scan_period "
                "and cell_size > 0");
  }
  if (fov.range_min <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument,
                "SynthConfig: fov.range_min must be > 0 so no detection sits at "
                "the origin");
  }
}

SynthSequence generate_synthetic(const SynthConfig& conf, int n_scans) {
  conf.validate();
  if (n_scans < 0) throw Error(ErrorKind::kInvalidArgument, "n_scans must be >= 0");
  std::mt19937_64 rng(conf.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  LandmarkField field(conf);

  SynthSequence seq;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0, pitch = 0.0, roll = 0.0;
  int redraw_failures = 0;

  for (int k = 0; k < n_scans; ++k) {
    if (k > 0) {
      yaw += conf.rotation_step * unit(rng);
      // Small AR(1) attitude wobble and vertical drift pulled back to z = 0.
      pitch = 0.8 * pitch + 0.25 * conf.rotation_step * unit(rng);
      roll = 0.8 * roll + 0.25 * conf.rotation_step * unit(rng);
      const double speed =
          std::max(0.0, conf.translation_step * (1.0 + 0.2 * unit(rng)));
      position += speed * Eigen::Vector3d(std::cos(yaw), std::sin(yaw), 0.0);
      position.z() += -0.2 * position.z() + 0.1 * conf.translation_step * unit(rng);
    }
    const Eigen::Quaterniond q =
        (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
         Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
         Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
            .normalized();

    ScanRecord rec;
    rec.timestamp = conf.scan_period * (k + 1);
    rec.orientation = q;
    rec.position = position;
    const auto landmarks = field.near(position, conf.fov.range_max);

    std::vector<Detection> det;
    for (int attempt = 0; attempt < kRedrawAttempts; ++attempt) {
      det = observe(landmarks, rec.pose(), conf, rng);
      if (static_cast<int>(det.size()) >= std::max(1, conf.min_points)) break;
    }
    if (static_cast<int>(det.size()) < std::max(1, conf.min_points)) ++redraw_failures;

    std::vector<long long> ids;
    for (const Detection& d : det) {
      rec.points.push_back(d.point);
      ids.push_back(d.id);
    }
    seq.records.push_back(std::move(rec));
    seq.point_ids.push_back(std::move(ids));
  }
  if (redraw_failures > 0) {
    spdlog::warn("generate_synthetic: {} of {} scans stayed below {} points "
                 "after {} redraws",
                 redraw_failures, n_scans, conf.min_points, kRedrawAttempts);
  }

  for (std::size_t k = 0; k + 1 < seq.point_ids.size(); ++k) {
    std::map<long long, int> in_next;
    for (std::size_t j = 0; j < seq.point_ids[k + 1].size(); ++j) {
      if (seq.point_ids[k + 1][j] >= 0) in_next[seq.point_ids[k + 1][j]] = static_cast<int>(j);
    }
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < seq.point_ids[k].size(); ++i) {
      auto it = in_next.find(seq.point_ids[k][i]);
      if (seq.point_ids[k][i] >= 0 && it != in_next.end()) {
        pairs.emplace_back(static_cast<int>(i), it->second);
      }
    }
    seq.truth.push_back(std::move(pairs));
  }
  return seq;
}

}  // namespace radcorr
