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
#include "radcorr/diff/ops.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "radcorr/error.hpp"

namespace radcorr::diff {

namespace {

std::string shape_of(const Tensor& t) {
  std::ostringstream s;
  s << t.rows() << "x" << t.cols();
  return s.str();
}

[[noreturn]] void shape_error(const char* op, const Tensor& a,
                              const Tensor& b) {
  throw Error(ErrorKind::kShapeMismatch, std::string(op) + ": " +
                                             shape_of(a) + " vs " +
                                             shape_of(b));
}

Matrix row_softmax(const Matrix& x) {
  Matrix y = x;
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    const double mx = y.row(r).maxCoeff();
    y.row(r) = (y.row(r).array() - mx).exp();
    y.row(r) /= y.row(r).sum();
  }
  return y;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  return Tensor::from_op(a.value() * b.value(), {a, b}, [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) pa.accumulate(self.grad * pb.value.transpose());
    if (pb.requires_grad) pb.accumulate(pa.value.transpose() * self.grad);
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) {
    return Tensor::from_op(a.value() + b.value(), {a, b}, [](Node& self) {
      self.parents[0]->accumulate(self.grad);
      self.parents[1]->accumulate(self.grad);
    });
  }
  if (b.rows() == 1 && a.cols() == b.cols()) {
    Matrix out = a.value().rowwise() + b.value().row(0);
    return Tensor::from_op(std::move(out), {a, b}, [](Node& self) {
      self.parents[0]->accumulate(self.grad);
      if (self.parents[1]->requires_grad) {
        self.parents[1]->accumulate(self.grad.colwise().sum());
      }
    });
  }
  shape_error("add", a, b);
}

Tensor relu(const Tensor& a) {
  return Tensor::from_op(a.value().cwiseMax(0.0), {a}, [](Node& self) {
    Node& p = *self.parents[0];
    p.accumulate((p.value.array() > 0.0).cast<double>().matrix().cwiseProduct(
        self.grad));
  });
}

Tensor scale(const Tensor& a, double s) {
  return Tensor::from_op(a.value() * s, {a},
                         [s](Node& self) { self.parents[0]->accumulate(self.grad * s); });
}

Tensor transpose(const Tensor& a) {
  return Tensor::from_op(a.value().transpose(), {a}, [](Node& self) {
    self.parents[0]->accumulate(self.grad.transpose());
  });
}

Tensor softmax_rows(const Tensor& a) {
  return Tensor::from_op(row_softmax(a.value()), {a}, [](Node& self) {
    const Matrix& y = self.value;
    const Eigen::VectorXd dot = self.grad.cwiseProduct(y).rowwise().sum();
    Matrix dx = y.cwiseProduct(self.grad);
    dx -= y.cwiseProduct(dot.replicate(1, y.cols()));
    self.parents[0]->accumulate(dx);
  });
}

Tensor log_softmax_rows(const Tensor& a) {
  Matrix out = a.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double mx = out.row(r).maxCoeff();
    const double lse = mx + std::log((out.row(r).array() - mx).exp().sum());
    out.row(r).array() -= lse;
  }
  return Tensor::from_op(std::move(out), {a}, [](Node& self) {
    const Matrix probs = self.value.array().exp().matrix();
    const Eigen::VectorXd gsum = self.grad.rowwise().sum();
    Matrix dx = self.grad - probs.cwiseProduct(gsum.replicate(1, probs.cols()));
    self.parents[0]->accumulate(dx);
  });
}

Tensor layer_norm(const Tensor& a, const Tensor& gain, const Tensor& bias,
                  double eps) {
  if (gain.rows() != 1 || gain.cols() != a.cols()) {
    shape_error("layer_norm gain", a, gain);
  }
  if (bias.rows() != 1 || bias.cols() != a.cols()) {
    shape_error("layer_norm bias", a, bias);
  }
  const Eigen::Index n = a.cols();
  const Matrix& x = a.value();
  Matrix xhat(x.rows(), n);
  Eigen::VectorXd inv_std(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mu = x.row(r).mean();
    const double var = (x.row(r).array() - mu).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (x.row(r).array() - mu) * inv_std(r);
  }
  Matrix out = (xhat.array().rowwise() * gain.value().row(0).array()).matrix();
  out.rowwise() += bias.value().row(0);
  return Tensor::from_op(
      std::move(out), {a, gain, bias},
      [xhat = std::move(xhat), inv_std = std::move(inv_std), n](Node& self) {
        Node& px = *self.parents[0];
        Node& pg = *self.parents[1];
        Node& pb = *self.parents[2];
        const Matrix& g = self.grad;
        if (pg.requires_grad) pg.accumulate(g.cwiseProduct(xhat).colwise().sum());
        if (pb.requires_grad) pb.accumulate(g.colwise().sum());
        if (px.requires_grad) {
          const Matrix dxhat =
              (g.array().rowwise() * pg.value.row(0).array()).matrix();
          const Eigen::VectorXd s1 = dxhat.rowwise().sum();
          const Eigen::VectorXd s2 = dxhat.cwiseProduct(xhat).rowwise().sum();
          Matrix dx(g.rows(), n);
          for (Eigen::Index r = 0; r < g.rows(); ++r) {
            dx.row(r) = (inv_std(r) / static_cast<double>(n)) *
                        (static_cast<double>(n) * dxhat.row(r).array() - s1(r) -
                         xhat.row(r).array() * s2(r))
                            .matrix();
          }
          px.accumulate(dx);
        }
      });
}

Tensor sum(const Tensor& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return Tensor::from_op(std::move(out), {a}, [](Node& self) {
    Node& p = *self.parents[0];
    p.accumulate(Matrix::Constant(p.value.rows(), p.value.cols(),
                                  self.grad(0, 0)));
  });
}

Tensor pick(const Tensor& a, const std::vector<std::pair<int, int>>& index) {
  Matrix out(static_cast<Eigen::Index>(index.size()), 1);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto [r, c] = index[i];
    if (r < 0 || c < 0 || r >= a.rows() || c >= a.cols()) {
      throw Error(ErrorKind::kShapeMismatch,
                  "pick: index (" + std::to_string(r) + ", " +
                      std::to_string(c) + ") outside " + shape_of(a));
    }
    out(static_cast<Eigen::Index>(i), 0) = a.value()(r, c);
  }
  return Tensor::from_op(std::move(out), {a}, [index](Node& self) {
    Node& p = *self.parents[0];
    Matrix dx = Matrix::Zero(p.value.rows(), p.value.cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
      dx(index[i].first, index[i].second) +=
          self.grad(static_cast<Eigen::Index>(i), 0);
    }
    p.accumulate(dx);
  });
}

Tensor slice_cols(const Tensor& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw Error(ErrorKind::kShapeMismatch,
                "slice_cols: [" + std::to_string(start) + ", +" +
                    std::to_string(count) + ") outside " + shape_of(a));
  }
  return Tensor::from_op(a.value().middleCols(start, count), {a},
                         [start, count](Node& self) {
                           Node& p = *self.parents[0];
                           Matrix dx = Matrix::Zero(p.value.rows(), p.value.cols());
                           dx.middleCols(start, count) = self.grad;
                           p.accumulate(dx);
                         });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) {
    throw Error(ErrorKind::kShapeMismatch, "concat_cols: no inputs");
  }
  Eigen::Index total = 0;
  for (const Tensor& t : parts) {
    if (t.rows() != parts.front().rows()) {
      shape_error("concat_cols", parts.front(), t);
    }
    total += t.cols();
  }
  Matrix out(parts.front().rows(), total);
  std::vector<Eigen::Index> offsets;
  Eigen::Index at = 0;
  for (const Tensor& t : parts) {
    offsets.push_back(at);
    out.middleCols(at, t.cols()) = t.value();
    at += t.cols();
  }
  return Tensor::from_op(std::move(out), parts, [offsets](Node& self) {
    for (std::size_t i = 0; i < self.parents.size(); ++i) {
      Node& p = *self.parents[i];
      if (p.requires_grad) {
        p.accumulate(self.grad.middleCols(offsets[i], p.value.cols()));
      }
    }
  });
}

Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v, int heads,
                 const std::vector<bool>& key_valid) {
  if (heads <= 0 || q.cols() % heads != 0) {
    throw Error(ErrorKind::kShapeMismatch,
                "attention: model dim " + std::to_string(q.cols()) +
                    " not divisible by " + std::to_string(heads) + " heads");
  }
  if (k.cols() != q.cols() || v.cols() != q.cols()) shape_error("attention", q, k);
  if (k.rows() != v.rows()) shape_error("attention keys/values", k, v);
  if (!key_valid.empty() &&
      static_cast<Eigen::Index>(key_valid.size()) != k.rows()) {
    throw Error(ErrorKind::kShapeMismatch, "attention: key mask length");
  }

  Tensor mask;
  if (!key_valid.empty()) {
    // exp() of this underflows to exactly zero after max subtraction.
    constexpr double kMasked = -1e30;
    Matrix m = Matrix::Zero(q.rows(), k.rows());
    for (Eigen::Index j = 0; j < k.rows(); ++j) {
      if (!key_valid[j]) m.col(j).setConstant(kMasked);
    }
    mask = Tensor::constant(std::move(m));
  }

  const Eigen::Index d_head = q.cols() / heads;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d_head));
  std::vector<Tensor> outputs;
  outputs.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    const Tensor qh = slice_cols(q, h * d_head, d_head);
    const Tensor kh = slice_cols(k, h * d_head, d_head);
    const Tensor vh = slice_cols(v, h * d_head, d_head);
    Tensor scores = scale(matmul(qh, transpose(kh)), inv_sqrt_d);
    if (mask.defined()) scores = add(scores, mask);
    outputs.push_back(matmul(softmax_rows(scores), vh));
  }
  return heads == 1 ? outputs.front() : concat_cols(outputs);
}

}  // namespace radcorr::diff
