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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace radcorr::diff {

using Matrix = Eigen::MatrixXd;

/// One vertex of the reverse-mode tape.
struct Node {
  Matrix value;
  Matrix grad;  // empty until something flows into it
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents.
  std::function<void(Node&)> backward_fn;
  bool requires_grad = false;
  std::string name;

  bool is_leaf() const { return parents.empty(); }
  void accumulate(const Matrix& g);
};

/// Handle to a 2-D float64 array that records how it was computed.
/// Copies share the underlying node.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Matrix value);
  /// Trainable leaf; its grad accumulates across backward() calls until
  /// zero_grad().
  static Tensor parameter(Matrix value, std::string name = {});
  /// Non-leaf result of an op. Drops the parents when no input needs a
  /// gradient or when gradient recording is disabled.
  static Tensor from_op(Matrix value, std::vector<Tensor> inputs,
                        std::function<void(Node&)> backward_fn);

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  /// Gradient, zero-sized until the first backward pass reached this tensor.
  const Matrix& grad() const { return node_->grad; }
  void zero_grad();

  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  const std::string& name() const { return node_->name; }

  /// Convenience for 1x1 results.
  double item() const;

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  std::shared_ptr<Node> node_;
};

/// Reverse pass from a 1x1 tensor. Intermediate gradients are recomputed from
/// scratch; leaf gradients accumulate, so call zero_grad() between steps.
/// Throws Error(kShapeMismatch) on a non-scalar loss.
void backward(const Tensor& loss);

/// Gradient recording is on by default, per thread.
bool grad_enabled();

/// Disables gradient recording on this thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

}  // namespace radcorr::diff
