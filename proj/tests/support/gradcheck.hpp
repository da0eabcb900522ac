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

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "radcorr/diff/ops.hpp"
#include "radcorr/diff/tensor.hpp"
#include "radcorr/labelgen.hpp"
#include "radcorr/model.hpp"
#include "radcorr/trainer.hpp"

namespace radcorr::testing {

struct GradCase {
  std::string name;
  std::vector<Eigen::MatrixXd> inputs;
  std::function<diff::Tensor(const std::vector<diff::Tensor>&)> fn;
};

struct GradReport {
  std::string name;
  double worst = 0.0;  // 0 when every entry agrees
  int checked = 0;
  std::string worst_at;  // parameter or input holding the worst entry
};

// Reduces any output to a scalar through fixed random projections u' X v, so
// no entry of X has a vanishing weight by symmetry.
inline diff::Tensor project_to_scalar(const diff::Tensor& out) {
  if (out.rows() == 1 && out.cols() == 1) return out;
  std::mt19937_64 rng(out.rows() * 131 + out.cols());
  const diff::Tensor u =
      diff::Tensor::constant(random_matrix(rng, 1, static_cast<int>(out.rows())));
  const diff::Tensor v =
      diff::Tensor::constant(random_matrix(rng, static_cast<int>(out.cols()), 1));
  return diff::matmul(diff::matmul(u, out), v);
}

inline GradReport check_case(const GradCase& c) {
  GradReport report{c.name};
  std::vector<diff::Tensor> params;
  for (const auto& m : c.inputs) params.push_back(diff::Tensor::parameter(m));
  diff::backward(project_to_scalar(c.fn(params)));

  for (std::size_t i = 0; i < c.inputs.size(); ++i) {
    auto f = [&](const Eigen::MatrixXd& x) {
      diff::NoGradGuard no_grad;
      std::vector<diff::Tensor> args;
      for (std::size_t j = 0; j < c.inputs.size(); ++j) {
        args.push_back(diff::Tensor::constant(j == i ? x : c.inputs[j]));
      }
      return project_to_scalar(c.fn(args)).item();
    };
    const Eigen::MatrixXd numeric = finite_difference(f, c.inputs[i]);
    Eigen::MatrixXd analytic = params[i].grad();
    if (analytic.size() == 0) analytic = Eigen::MatrixXd::Zero(numeric.rows(), numeric.cols());
    report.worst = std::max(report.worst, worst_violation(analytic, numeric));
    report.checked += static_cast<int>(numeric.size());
  }
  return report;
}

inline Eigen::MatrixXd away_from_zero(Eigen::MatrixXd m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double& x = m.data()[i];
    x += x >= 0.0 ? 0.1 : -0.1;
  }
  return m;
}

inline std::vector<GradCase> diffcore_cases() {
  using diff::Tensor;
  using V = std::vector<Tensor>;
  std::mt19937_64 rng(2024);
  auto r = [&](int rows, int cols) { return random_matrix(rng, rows, cols); };
  std::vector<GradCase> cases;
  cases.push_back({"matmul", {r(3, 4), r(4, 2)},
                   [](const V& x) { return diff::matmul(x[0], x[1]); }});
  cases.push_back({"add", {r(3, 4), r(3, 4)},
                   [](const V& x) { return diff::add(x[0], x[1]); }});
  cases.push_back({"add_bias", {r(3, 4), r(1, 4)},
                   [](const V& x) { return diff::add(x[0], x[1]); }});
  cases.push_back({"relu", {away_from_zero(r(4, 3))},
                   [](const V& x) { return diff::relu(x[0]); }});
  cases.push_back({"scale", {r(2, 5)},
                   [](const V& x) { return diff::scale(x[0], -1.7); }});
  cases.push_back({"transpose", {r(3, 5)},
                   [](const V& x) { return diff::transpose(x[0]); }});
  cases.push_back({"softmax_rows", {r(4, 5)},
                   [](const V& x) { return diff::softmax_rows(x[0]); }});
  cases.push_back({"log_softmax_rows", {r(4, 5)},
                   [](const V& x) { return diff::log_softmax_rows(x[0]); }});
  cases.push_back({"layer_norm", {r(4, 6), r(1, 6), r(1, 6)},
                   [](const V& x) { return diff::layer_norm(x[0], x[1], x[2]); }});
  cases.push_back({"sum", {r(3, 3)}, [](const V& x) { return diff::sum(x[0]); }});
  cases.push_back({"pick", {r(4, 4)}, [](const V& x) {
                     return diff::pick(x[0], {{0, 1}, {2, 3}, {3, 0}, {2, 3}});
                   }});
  cases.push_back({"slice_cols", {r(3, 6)},
                   [](const V& x) { return diff::slice_cols(x[0], 2, 3); }});
  cases.push_back({"concat_cols", {r(3, 2), r(3, 4)},
                   [](const V& x) { return diff::concat_cols({x[0], x[1]}); }});
  cases.push_back({"attention", {r(3, 4), r(5, 4), r(5, 4)}, [](const V& x) {
                     return diff::attention(x[0], x[1], x[2], 2);
                   }});
  cases.push_back({"attention_masked", {r(3, 4), r(5, 4), r(5, 4)}, [](const V& x) {
                     return diff::attention(x[0], x[1], x[2], 2,
                                            {true, false, true, true, false});
                   }});
  // Full multi-head path on a 3-position toy: projections, attention, output map.
  cases.push_back({"attention_projected", {r(3, 4), r(4, 4), r(4, 4), r(4, 4), r(4, 4)},
                   [](const V& x) {
                     const Tensor q = diff::matmul(x[0], x[1]);
                     const Tensor k = diff::matmul(x[0], x[2]);
                     const Tensor v = diff::matmul(x[0], x[3]);
                     return diff::matmul(diff::attention(q, k, v, 2), x[4]);
                   }});
  return cases;
}

inline PointCloud random_scan(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  PointCloud c;
  for (int i = 0; i < n; ++i) c.points.emplace_back(u(rng) + 4.0, u(rng), u(rng));
  return c;
}

// End-to-end check of the row cross-entropy through the whole network with
// respect to every parameter entry.
inline GradReport check_model_loss(int n_max, int embed_dim, std::uint64_t seed) {
  ModelConfig mconf;
  mconf.n_max = n_max;
  mconf.embed_dim = embed_dim;
  CorrespondenceNet net(mconf, seed);

  // Zero biases put the padding rows exactly on a ReLU kink; move every
  // parameter off the initial point first.
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> nudge(-0.05, 0.05);
  for (const std::string& name : net.params().names()) {
    Eigen::MatrixXd& v = net.params().get(name).mutable_value();
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] += nudge(rng);
  }

  const PointCloud prev = random_scan(rng, n_max - 3);
  PointCloud curr = prev;
  std::normal_distribution<double> jitter(0.0, 0.05);
  for (Point3& p : curr.points) p += Eigen::Vector3d(jitter(rng), jitter(rng), jitter(rng));
  std::reverse(curr.points.begin(), curr.points.end());
  curr.points.push_back(Point3(5.0, 2.0, -1.0));
  const LabelSet labels = generate_labels(prev, curr, PoseSE3::identity(), 0.3);
  const PaddedCloud a = pad_cloud(prev, n_max);
  const PaddedCloud b = pad_cloud(curr, n_max);

  auto loss_value = [&]() {
    diff::NoGradGuard no_grad;
    return row_cross_entropy(net.affinity(a, b), labels).item();
  };

  net.params().zero_grad();
  diff::backward(row_cross_entropy(net.affinity(a, b), labels));

  GradReport report{"end_to_end_loss"};
  for (const std::string& name : net.params().names()) {
    diff::Tensor& p = net.params().get(name);
    const Eigen::MatrixXd analytic = p.grad();
    Eigen::MatrixXd numeric(p.rows(), p.cols());
    for (Eigen::Index i = 0; i < p.mutable_value().size(); ++i) {
      double& x = p.mutable_value().data()[i];
      const double orig = x;
      x = orig + 1e-5;
      const double up = loss_value();
      x = orig - 1e-5;
      const double down = loss_value();
      x = orig;
      numeric.data()[i] = (up - down) / 2e-5;
    }
    const double worst = analytic.size() == 0
                             ? (numeric.cwiseAbs().maxCoeff() > 1e-6 ? 1.0 : 0.0)
                             : worst_violation(analytic, numeric);
    if (worst > report.worst) {
      report.worst = worst;
      report.worst_at = name;
    }
    report.checked += static_cast<int>(numeric.size());
  }
  return report;
}

}  // namespace radcorr::testing
