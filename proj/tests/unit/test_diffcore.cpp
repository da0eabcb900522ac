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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "radcorr/diff/checkpoint.hpp"
#include "radcorr/diff/ops.hpp"
#include "radcorr/diff/params.hpp"
#include "radcorr/error.hpp"

namespace radcorr::diff {
namespace {

using radcorr::testing::random_matrix;

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "radcorr_test_diffcore";
  std::filesystem::create_directories(dir);
  return dir / name;
}

TEST(Matmul, IdentityAndShape) {
  std::mt19937_64 rng(1);
  const Matrix m = random_matrix(rng, 4, 3);
  const Tensor out = matmul(Tensor::constant(Matrix::Identity(4, 4)), Tensor::constant(m));
  EXPECT_EQ(out.value(), m);
  const Tensor s = matmul(Tensor::constant(random_matrix(rng, 2, 3)),
                          Tensor::constant(random_matrix(rng, 3, 4)));
  EXPECT_EQ(s.rows(), 2);
  EXPECT_EQ(s.cols(), 4);
}

TEST(Matmul, ShapeMismatchThrows) {
  EXPECT_THROW(matmul(Tensor::constant(Matrix::Zero(2, 3)), Tensor::constant(Matrix::Zero(2, 3))),
               Error);
  EXPECT_THROW(add(Tensor::constant(Matrix::Zero(2, 3)), Tensor::constant(Matrix::Zero(3, 2))),
               Error);
}

TEST(SoftmaxRows, UniformAndSaturated) {
  const Tensor u = softmax_rows(Tensor::constant(Matrix::Constant(2, 8, 3.0)));
  for (Eigen::Index i = 0; i < u.value().size(); ++i) {
    EXPECT_NEAR(u.value().data()[i], 1.0 / 8.0, 1e-15);
  }
  Matrix row = Matrix::Zero(1, 6);
  row(0, 4) = 50.0;
  EXPECT_GE(softmax_rows(Tensor::constant(row)).value()(0, 4), 1.0 - 1e-9);
}

TEST(SoftmaxRows, RowsSumToOneForLargeInputs) {
  std::mt19937_64 rng(2);
  const Matrix m = random_matrix(rng, 5, 7, -800.0, 800.0);
  const Matrix p = softmax_rows(Tensor::constant(m)).value();
  ASSERT_TRUE(p.allFinite());
  for (Eigen::Index r = 0; r < p.rows(); ++r) EXPECT_NEAR(p.row(r).sum(), 1.0, 1e-9);
  const Matrix lp = log_softmax_rows(Tensor::constant(m)).value();
  ASSERT_TRUE(lp.allFinite());
  EXPECT_LT((lp.array().exp().matrix() - p).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Relu, Values) {
  Matrix m(1, 3);
  m << -1.0, 2.0, 0.0;
  const Matrix out = relu(Tensor::constant(m)).value();
  EXPECT_EQ(out(0, 0), 0.0);
  EXPECT_EQ(out(0, 1), 2.0);
  EXPECT_EQ(out(0, 2), 0.0);
}

TEST(LayerNorm, NormalizesEachRow) {
  std::mt19937_64 rng(3);
  const Matrix m = random_matrix(rng, 6, 16, -4.0, 9.0);
  const Tensor out = layer_norm(Tensor::constant(m), Tensor::constant(Matrix::Ones(1, 16)),
                                Tensor::constant(Matrix::Zero(1, 16)), 1e-12);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const Eigen::RowVectorXd row = out.value().row(r);
    const double mean = row.mean();
    const double var = (row.array() - mean).square().mean();
    EXPECT_NEAR(mean, 0.0, 1e-7);
    EXPECT_NEAR(var, 1.0, 1e-6);
  }
}

TEST(LayerNorm, AppliesGainAndBias) {
  Matrix m(1, 2);
  m << 1.0, 3.0;
  Matrix gain(1, 2), bias(1, 2);
  gain << 2.0, 3.0;
  bias << 0.5, -0.5;
  const Matrix out = layer_norm(Tensor::constant(m), Tensor::constant(gain),
                                Tensor::constant(bias), 1e-12)
                         .value();
  EXPECT_NEAR(out(0, 0), -2.0 + 0.5, 1e-9);
  EXPECT_NEAR(out(0, 1), 3.0 - 0.5, 1e-9);
}

TEST(Attention, SinglePositionReturnsValueRow) {
  std::mt19937_64 rng(4);
  const Matrix q = random_matrix(rng, 3, 4);
  const Matrix k = random_matrix(rng, 1, 4);
  const Matrix v = random_matrix(rng, 1, 4);
  const Tensor out =
      attention(Tensor::constant(q), Tensor::constant(k), Tensor::constant(v), 2);
  ASSERT_EQ(out.rows(), 3);
  ASSERT_EQ(out.cols(), 4);
  for (int r = 0; r < 3; ++r) {
    EXPECT_LT((out.value().row(r) - v.row(0)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Attention, MatchesPerHeadReference) {
  std::mt19937_64 rng(5);
  const Matrix q = random_matrix(rng, 3, 6);
  const Matrix k = random_matrix(rng, 4, 6);
  const Matrix v = random_matrix(rng, 4, 6);
  const Matrix out =
      attention(Tensor::constant(q), Tensor::constant(k), Tensor::constant(v), 3).value();
  for (int h = 0; h < 3; ++h) {
    const Matrix qh = q.middleCols(2 * h, 2);
    const Matrix kh = k.middleCols(2 * h, 2);
    const Matrix vh = v.middleCols(2 * h, 2);
    Matrix s = qh * kh.transpose() / std::sqrt(2.0);
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      const double total = s.row(r).array().exp().sum();
      s.row(r) = s.row(r).array().exp() / total;
    }
    EXPECT_LT((out.middleCols(2 * h, 2) - s * vh).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Attention, MaskedKeysAreIgnored) {
  std::mt19937_64 rng(6);
  const Matrix q = random_matrix(rng, 2, 4);
  Matrix k = random_matrix(rng, 3, 4);
  Matrix v = random_matrix(rng, 3, 4);
  const std::vector<bool> mask = {true, false, true};
  const Matrix before = attention(Tensor::constant(q), Tensor::constant(k),
                                  Tensor::constant(v), 2, mask)
                            .value();
  k.row(1) *= 10.0;
  v.row(1).setConstant(99.0);
  const Matrix after = attention(Tensor::constant(q), Tensor::constant(k),
                                 Tensor::constant(v), 2, mask)
                           .value();
  EXPECT_LT((before - after).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Attention, IndivisibleHeadsThrow) {
  const Tensor x = Tensor::constant(Matrix::Zero(2, 5));
  EXPECT_THROW(attention(x, x, x, 2), Error);
}

TEST(GradientCheck, EveryOpAgreesWithFiniteDifferences) {
  for (const auto& c : radcorr::testing::diffcore_cases()) {
    const auto report = radcorr::testing::check_case(c);
    EXPECT_EQ(report.worst, 0.0) << c.name;
    EXPECT_GT(report.checked, 0) << c.name;
  }
}

TEST(GradientCheck, EndToEndLossSmallNetwork) {
  const auto report = radcorr::testing::check_model_loss(6, 8, 3);
  EXPECT_EQ(report.worst, 0.0) << report.worst_at;
}

TEST(Backward, SumOfParameterGivesOnes) {
  Tensor p = Tensor::parameter(Matrix::Random(3, 4));
  backward(sum(p));
  EXPECT_EQ(p.grad(), Matrix::Ones(3, 4));
}

TEST(Backward, AccumulatesWithoutZeroing) {
  Tensor p = Tensor::parameter(Matrix::Random(2, 2));
  backward(sum(p));
  backward(scale(sum(p), 2.0));
  EXPECT_EQ(p.grad(), Matrix::Constant(2, 2, 3.0));
  p.zero_grad();
  backward(sum(p));
  EXPECT_EQ(p.grad(), Matrix::Ones(2, 2));
}

TEST(Backward, SharedSubexpressionCountsTwice) {
  Tensor p = Tensor::parameter(Matrix::Constant(1, 1, 3.0));
  const Tensor y = matmul(p, p);  // p^2
  backward(add(y, y));            // 2 p^2
  EXPECT_DOUBLE_EQ(p.grad()(0, 0), 12.0);
}

TEST(Backward, NonScalarLossThrows) {
  Tensor p = Tensor::parameter(Matrix::Zero(2, 2));
  EXPECT_THROW(backward(p), Error);
}

TEST(Backward, NoGradGuardRecordsNothing) {
  Tensor p = Tensor::parameter(Matrix::Ones(2, 2));
  EXPECT_TRUE(grad_enabled());
  Tensor out;
  {
    NoGradGuard guard;
    EXPECT_FALSE(grad_enabled());
    out = sum(relu(p));
  }
  EXPECT_TRUE(grad_enabled());
  EXPECT_TRUE(out.node()->is_leaf());
  EXPECT_DOUBLE_EQ(out.item(), 4.0);
}

TEST(ParamStore, InitializationConventions) {
  ParamStore store(42);
  const Tensor& w = store.add_xavier("w", 10, 30);
  const double bound = std::sqrt(6.0 / 40.0);
  EXPECT_EQ(w.rows(), 10);
  EXPECT_EQ(w.cols(), 30);
  EXPECT_LE(w.value().cwiseAbs().maxCoeff(), bound);
  EXPECT_GT(w.value().cwiseAbs().maxCoeff(), 0.5 * bound);
  EXPECT_TRUE(store.add_constant("b", 1, 30, 0.0).value().isZero(0.0));
  EXPECT_EQ(store.add_constant("g", 1, 30, 1.0).value(), Matrix::Ones(1, 30));
  EXPECT_EQ(store.scalar_count(), 360u);
  EXPECT_EQ(store.seed(), 42u);
  EXPECT_EQ(store.names(), (std::vector<std::string>{"w", "b", "g"}));
}

TEST(ParamStore, SeedDeterminesValues) {
  ParamStore a(7), b(7), c(8);
  EXPECT_EQ(a.add_xavier("w", 5, 5).value(), b.add_xavier("w", 5, 5).value());
  EXPECT_NE(a.get("w").value(), c.add_xavier("w", 5, 5).value());
}

TEST(ParamStore, DuplicateAndMissingNames) {
  ParamStore store;
  store.add_constant("x", 1, 1, 0.0);
  EXPECT_THROW(store.add_constant("x", 1, 1, 0.0), Error);
  try {
    store.get("y");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotFound);
  }
}

TEST(Adam, SquaredNormShrinksMonotonically) {
  ParamStore store;
  Matrix init(1, 3);
  init << 1.0, -2.0, 0.5;
  Tensor& w = store.add("w", init);
  Adam adam(AdamConfig{0.05});
  double last = w.value().norm();
  for (int i = 0; i < 10; ++i) {
    store.zero_grad();
    backward(matmul(w, transpose(w)));
    adam.step(store);
    const double now = w.value().norm();
    EXPECT_LT(now, last) << "step " << i;
    last = now;
  }
  EXPECT_EQ(adam.steps(), 10);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // With bias correction the first update is lr * g / (|g| + eps) per entry.
  ParamStore store;
  Matrix init(1, 2);
  init << 3.0, -4.0;
  Tensor& w = store.add("w", init);
  Adam adam(AdamConfig{0.01});
  backward(matmul(w, transpose(w)));
  adam.step(store);
  EXPECT_NEAR(w.value()(0, 0), 3.0 - 0.01, 1e-9);
  EXPECT_NEAR(w.value()(0, 1), -4.0 + 0.01, 1e-9);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  ParamStore store(5);
  store.add_xavier("layer.w", 7, 3);
  store.add_constant("layer.b", 1, 3, -0.125);
  store.add("odd", Matrix::Constant(2, 2, 1.0 / 3.0));
  const auto path = scratch("round.ckpt");
  write_checkpoint(path, make_checkpoint(store, {{"note", "hello world"}}));

  const Checkpoint back = read_checkpoint(path);
  EXPECT_EQ(back.header_value("note"), "hello world");
  ParamStore other(99);
  other.add_constant("layer.w", 7, 3, 0.0);
  other.add_constant("layer.b", 1, 3, 0.0);
  other.add_constant("odd", 2, 2, 0.0);
  load_parameters(other, back);
  for (const auto& name : store.names()) {
    EXPECT_EQ(other.get(name).value(), store.get(name).value()) << name;
  }
}

TEST(Checkpoint, PayloadIsLittleEndianFloat64) {
  ParamStore store;
  store.add("x", Matrix::Constant(1, 1, 1.0));
  const auto path = scratch("le.ckpt");
  write_checkpoint(path, make_checkpoint(store));
  std::ifstream in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), {});
  // 1.0 in IEEE-754 binary64, little-endian, is the final eight bytes.
  const std::string tail = bytes.substr(bytes.size() - 8);
  const unsigned char expected[8] = {0, 0, 0, 0, 0, 0, 0xF0, 0x3F};
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(static_cast<unsigned char>(tail[i]), expected[i]) << i;
  }
}

TEST(Checkpoint, VersionMismatchAndMissingFile) {
  ParamStore store;
  store.add("x", Matrix::Ones(1, 1));
  const auto path = scratch("ver.ckpt");
  write_checkpoint(path, make_checkpoint(store));
  try {
    read_checkpoint(path, 2);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kVersionMismatch);
  }
  try {
    read_checkpoint(scratch("missing.ckpt"));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotFound);
  }
}

TEST(Checkpoint, TruncatedFileIsFormatError) {
  ParamStore store;
  store.add("x", Matrix::Ones(4, 4));
  const auto path = scratch("trunc.ckpt");
  write_checkpoint(path, make_checkpoint(store));
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 5);
  try {
    read_checkpoint(path);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
}

TEST(Checkpoint, ShapeMismatchOnLoad) {
  ParamStore store;
  store.add("x", Matrix::Ones(2, 3));
  ParamStore other;
  other.add("x", Matrix::Ones(3, 2));
  try {
    load_parameters(other, make_checkpoint(store));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShapeMismatch);
  }
}

}  // namespace
}  // namespace radcorr::diff
