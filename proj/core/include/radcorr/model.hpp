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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "radcorr/diff/checkpoint.hpp"
#include "radcorr/diff/ops.hpp"
#include "radcorr/diff/params.hpp"
#include "radcorr/geometry.hpp"

namespace radcorr {

struct ModelConfig {
  int n_max = 0;  // dataset-wide N
  int embed_dim = 64;
  std::vector<int> mlp_hidden = {32, 64};
  int tf_layers = 1;  // encoder layers and decoder layers per sub-network
  int heads = 4;
  int ff_dim = 128;
  /// Both transformer sub-networks use one parameter set. Off by default.
  bool share_transformers = false;
  /// Exclude padded rows (valid_count+1..N) from attention keys. Off by
  /// default: padded rows take part in attention like any other row.
  bool mask_padding = false;
  double layer_norm_eps = 1e-5;

  /// Throws Error(kInvalidArgument).
  void validate() const;
};

/// The (N+1) x (N+1) network output. Rows 1..valid_rows x cols 1..valid_cols
/// is the block that describes real points; row 0 / col 0 are the "no match"
/// slot.
struct AffinityMatrix {
  diff::Tensor g;
  int valid_rows = 0;
  int valid_cols = 0;

  /// valid_rows x valid_cols block of raw scores.
  Eigen::MatrixXd real_block() const;
};

/// G = sigma1 * sigma2^T for already computed final embeddings.
AffinityMatrix affinity_from_embeddings(const diff::Tensor& sigma1,
                                        const diff::Tensor& sigma2,
                                        int valid_rows, int valid_cols);

/// Shared per-point MLP embedding, two cross-context transformer
/// sub-networks, residual sum, and dot-product affinity.
///
/// Forward passes only read the parameters, so concurrent inference under
/// diff::NoGradGuard is safe. Training mutates parameters and is
/// single-threaded.
class CorrespondenceNet {
 public:
  CorrespondenceNet(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  diff::ParamStore& params() { return params_; }
  const diff::ParamStore& params() const { return params_; }

  /// (N+1) x E, the same MLP applied to every row.
  diff::Tensor embed_points(const PaddedCloud& padded) const;

  /// Returns (phi_a, phi_b). Sub-network A encodes emb_a with
  /// self-attention, then decodes it while cross-attending emb_b; B does the
  /// same with the roles swapped. valid_* are only consulted when
  /// mask_padding is set.
  std::pair<diff::Tensor, diff::Tensor> cross_transform(
      const diff::Tensor& emb_a, const diff::Tensor& emb_b, int valid_a = -1,
      int valid_b = -1) const;

  /// Throws Error(kShapeMismatch) if the clouds are not padded to this
  /// model's N.
  AffinityMatrix affinity(const PaddedCloud& a, const PaddedCloud& b) const;

  std::vector<std::pair<std::string, std::string>> header() const;

 private:
  struct Linear {
    std::string w, b;
  };
  struct Attention {
    Linear q, k, v, out;
  };
  struct LayerNorm {
    std::string gain, bias;
  };
  struct EncoderLayer {
    Attention self_attn;
    LayerNorm norm1;
    Linear ff1, ff2;
    LayerNorm norm2;
  };
  struct DecoderLayer {
    Attention self_attn;
    LayerNorm norm1;
    Attention cross_attn;
    LayerNorm norm2;
    Linear ff1, ff2;
    LayerNorm norm3;
  };
  struct Transformer {
    std::vector<EncoderLayer> encoder;
    std::vector<DecoderLayer> decoder;
  };

  Linear make_linear(const std::string& name, int in, int out);
  Attention make_attention(const std::string& name);
  LayerNorm make_norm(const std::string& name);
  Transformer make_transformer(const std::string& name);

  diff::Tensor apply(const Linear& l, const diff::Tensor& x) const;
  diff::Tensor apply(const Attention& a, const diff::Tensor& query,
                     const diff::Tensor& memory,
                     const std::vector<bool>& key_valid) const;
  diff::Tensor apply(const LayerNorm& n, const diff::Tensor& x) const;
  diff::Tensor feed_forward(const Linear& l1, const Linear& l2,
                            const diff::Tensor& x) const;
  diff::Tensor run(const Transformer& t, const diff::Tensor& own,
                   const diff::Tensor& other, const std::vector<bool>& own_valid,
                   const std::vector<bool>& other_valid) const;
  std::vector<bool> key_mask(int valid) const;

  ModelConfig config_;
  diff::ParamStore params_;
  std::vector<Linear> embed_;
  Transformer tf_a_;
  Transformer tf_b_;
};

std::vector<std::pair<std::string, std::string>> model_config_header(
    const ModelConfig& config);
/// Throws Error(kFormat) on missing or malformed keys.
ModelConfig model_config_from_header(const diff::Checkpoint& checkpoint);

void save_model(const CorrespondenceNet& net, const std::filesystem::path& path,
                std::vector<std::pair<std::string, std::string>> extra = {});
CorrespondenceNet load_model(const std::filesystem::path& path,
                             int expected_version = diff::kCheckpointFormatVersion);

}  // namespace radcorr
