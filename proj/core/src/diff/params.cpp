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
#include "radcorr/diff/params.hpp"

#include <cmath>
#include <utility>

#include "radcorr/error.hpp"

namespace radcorr::diff {

Tensor& ParamStore::add(const std::string& name, Matrix init) {
  if (params_.count(name) != 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "ParamStore: duplicate parameter '" + name + "'");
  }
  names_.push_back(name);
  auto [it, inserted] =
      params_.emplace(name, Tensor::parameter(std::move(init), name));
  return it->second;
}

Tensor& ParamStore::add_xavier(const std::string& name, int fan_in,
                               int fan_out) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix w(fan_in, fan_out);
  // Row-major fill order so the draw sequence does not depend on storage.
  for (int r = 0; r < fan_in; ++r) {
    for (int c = 0; c < fan_out; ++c) w(r, c) = dist(rng_);
  }
  return add(name, std::move(w));
}

Tensor& ParamStore::add_constant(const std::string& name, int rows, int cols,
                                 double value) {
  return add(name, Matrix::Constant(rows, cols, value));
}

bool ParamStore::contains(const std::string& name) const {
  return params_.count(name) != 0;
}

const Tensor& ParamStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw Error(ErrorKind::kNotFound, "ParamStore: no parameter '" + name + "'");
  }
  return it->second;
}

Tensor& ParamStore::get(const std::string& name) {
  return const_cast<Tensor&>(std::as_const(*this).get(name));
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : params_) n += static_cast<std::size_t>(t.value().size());
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [name, t] : params_) t.zero_grad();
}

Adam::Adam(AdamConfig config) : config_(config) {
  if (!(config_.learning_rate > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "Adam: learning rate must be > 0");
  }
}

void Adam::step(ParamStore& store) {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, t_);
  const double c2 = 1.0 - std::pow(config_.beta2, t_);
  for (const std::string& name : store.names()) {
    Tensor& p = store.get(name);
    if (p.grad().size() == 0) continue;
    Moments& mom = moments_[name];
    if (mom.m.size() == 0) {
      mom.m = Matrix::Zero(p.rows(), p.cols());
      mom.v = Matrix::Zero(p.rows(), p.cols());
    }
    const Matrix& g = p.grad();
    mom.m = config_.beta1 * mom.m + (1.0 - config_.beta1) * g;
    mom.v = config_.beta2 * mom.v + (1.0 - config_.beta2) * g.cwiseProduct(g);
    p.mutable_value().array() -=
        config_.learning_rate * (mom.m.array() / c1) /
        ((mom.v.array() / c2).sqrt() + config_.epsilon);
  }
}

}  // namespace radcorr::diff
