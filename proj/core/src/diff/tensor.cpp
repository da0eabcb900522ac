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
#include "radcorr/diff/tensor.hpp"

#include <unordered_set>

#include "radcorr/error.hpp"

namespace radcorr::diff {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}

NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

void Node::accumulate(const Matrix& g) {
  if (!requires_grad) return;
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

Tensor Tensor::constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Tensor(std::move(node));
}

Tensor Tensor::parameter(Matrix value, std::string name) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  node->name = std::move(name);
  return Tensor(std::move(node));
}

Tensor Tensor::from_op(Matrix value, std::vector<Tensor> inputs,
                       std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (!g_grad_enabled) return Tensor(std::move(node));
  bool any = false;
  for (const Tensor& t : inputs) any = any || t.requires_grad();
  if (!any) return Tensor(std::move(node));
  node->requires_grad = true;
  node->parents.reserve(inputs.size());
  for (Tensor& t : inputs) node->parents.push_back(std::move(t.node_));
  node->backward_fn = std::move(backward_fn);
  return Tensor(std::move(node));
}

void Tensor::zero_grad() {
  if (node_) node_->grad.resize(0, 0);
}

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) {
    throw Error(ErrorKind::kShapeMismatch, "item() on a non-1x1 tensor");
  }
  return node_->value(0, 0);
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.rows() != 1 || loss.cols() != 1) {
    throw Error(ErrorKind::kShapeMismatch, "backward: loss must be 1x1");
  }
  Node* root = loss.node().get();
  if (!root->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root, 0}};
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* n : order) {
    if (!n->is_leaf()) n->grad.resize(0, 0);
  }
  root->accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->is_leaf() || !n->backward_fn || n->grad.size() == 0) continue;
    n->backward_fn(*n);
  }
}

}  // namespace radcorr::diff
