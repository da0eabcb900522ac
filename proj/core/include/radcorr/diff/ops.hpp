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

#include <utility>
#include <vector>

#include "radcorr/diff/tensor.hpp"

namespace radcorr::diff {

// All ops throw Error(kShapeMismatch) on incompatible shapes.

Tensor matmul(const Tensor& a, const Tensor& b);

/// Elementwise sum. `b` may also be a 1 x cols row, added to every row of
/// `a` (bias add); no other broadcasting.
Tensor add(const Tensor& a, const Tensor& b);

Tensor relu(const Tensor& a);
Tensor scale(const Tensor& a, double s);
Tensor transpose(const Tensor& a);

/// Row-wise softmax, max-subtracted.
Tensor softmax_rows(const Tensor& a);
/// Row-wise log-softmax, log-sum-exp stabilized.
Tensor log_softmax_rows(const Tensor& a);

/// Normalizes every row to zero mean and unit (population) variance, then
/// applies the 1 x cols `gain` and `bias`: y = (x - mu) / sqrt(var + eps).
Tensor layer_norm(const Tensor& a, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);

/// Sum of all entries, 1x1.
Tensor sum(const Tensor& a);

/// Entries a(r, c) for every (r, c) in `index`, stacked into a column.
Tensor pick(const Tensor& a, const std::vector<std::pair<int, int>>& index);

Tensor slice_cols(const Tensor& a, Eigen::Index start, Eigen::Index count);
Tensor concat_cols(const std::vector<Tensor>& parts);

/// Multi-head scaled dot-product attention without projections: the model
/// dimension of q, k, v is split into `heads` equal slices, each head
/// computes softmax_rows(q_h k_h^T / sqrt(d_head)) v_h, and the head outputs
/// are concatenated back to q.rows() x model_dim.
///
/// `key_valid`, when non-empty, holds one flag per key row; keys flagged
/// false receive no attention weight.
Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v, int heads,
                 const std::vector<bool>& key_valid = {});

}  // namespace radcorr::diff
