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
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "radcorr/diff/tensor.hpp"

namespace radcorr::diff {

/// Named trainable arrays in insertion order, plus the RNG that initialized
/// them.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed = 0) : seed_(seed), rng_(seed) {}

  /// Throws Error(kInvalidArgument) on a duplicate name.
  Tensor& add(const std::string& name, Matrix init);

  /// Xavier-uniform fan_in x fan_out weight, U(-a, a), a = sqrt(6/(in+out)).
  Tensor& add_xavier(const std::string& name, int fan_in, int fan_out);
  Tensor& add_constant(const std::string& name, int rows, int cols,
                       double value);

  bool contains(const std::string& name) const;
  /// Throws Error(kNotFound) for an unknown name.
  const Tensor& get(const std::string& name) const;
  Tensor& get(const std::string& name);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, Tensor> params_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Parameters that received no gradient in a step
/// are left untouched.
class Adam {
 public:
  explicit Adam(AdamConfig config = {});

  void step(ParamStore& store);
  int steps() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  struct Moments {
    Matrix m;
    Matrix v;
  };
  AdamConfig config_;
  int t_ = 0;
  std::unordered_map<std::string, Moments> moments_;
};

}  // namespace radcorr::diff
