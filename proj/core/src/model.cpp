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
#include "radcorr/model.hpp"

#include <sstream>

#include "radcorr/error.hpp"
#include "radcorr/kvconfig.hpp"

namespace radcorr {

using diff::Tensor;

void ModelConfig::validate() const {
  std::ostringstream msg;
  if (n_max <= 0) msg << "n_max must be positive; ";
  if (embed_dim <= 0) msg << "embed_dim must be positive; ";
  if (heads <= 0) msg << "heads must be positive; ";
  if (heads > 0 && embed_dim % heads != 0) {
    msg << "embed_dim " << embed_dim << " not divisible by heads " << heads
        << "; ";
  }
  if (tf_layers <= 0) msg << "tf_layers must be positive; ";
  if (ff_dim <= 0) msg << "ff_dim must be positive; ";
  for (int w : mlp_hidden) {
    if (w <= 0) msg << "mlp_hidden widths must be positive; ";
  }
  if (!(layer_norm_eps > 0.0)) msg << "layer_norm_eps must be positive; ";
  if (!msg.str().empty()) {
    throw Error(ErrorKind::kInvalidArgument, "ModelConfig: " + msg.str());
  }
}

Eigen::MatrixXd AffinityMatrix::real_block() const {
  return g.value().block(1, 1, valid_rows, valid_cols);
}

AffinityMatrix affinity_from_embeddings(const Tensor& sigma1,
                                        const Tensor& sigma2, int valid_rows,
                                        int valid_cols) {
  if (sigma1.cols() != sigma2.cols() || sigma1.rows() != sigma2.rows()) {
    throw Error(ErrorKind::kShapeMismatch,
                "affinity: final embeddings must have equal shapes");
  }
  if (valid_rows < 0 || valid_rows >= sigma1.rows() || valid_cols < 0 ||
      valid_cols >= sigma2.rows()) {
    throw Error(ErrorKind::kShapeMismatch, "affinity: valid counts out of range");
  }
  AffinityMatrix out;
  out.g = diff::matmul(sigma1, diff::transpose(sigma2));
  out.valid_rows = valid_rows;
  out.valid_cols = valid_cols;
  return out;
}

CorrespondenceNet::CorrespondenceNet(ModelConfig config, std::uint64_t seed)
    : config_(std::move(config)), params_(seed) {
  config_.validate();
  int in = 3;
  std::vector<int> widths = config_.mlp_hidden;
  widths.push_back(config_.embed_dim);
  for (std::size_t i = 0; i < widths.size(); ++i) {
    embed_.push_back(make_linear("embed.l" + std::to_string(i), in, widths[i]));
    in = widths[i];
  }
  if (config_.share_transformers) {
    tf_a_ = make_transformer("tf");
    tf_b_ = tf_a_;
  } else {
    tf_a_ = make_transformer("tf_a");
    tf_b_ = make_transformer("tf_b");
  }
}

CorrespondenceNet::Linear CorrespondenceNet::make_linear(
    const std::string& name, int in, int out) {
  params_.add_xavier(name + ".w", in, out);
  params_.add_constant(name + ".b", 1, out, 0.0);
  return {name + ".w", name + ".b"};
}

CorrespondenceNet::Attention CorrespondenceNet::make_attention(
    const std::string& name) {
  const int e = config_.embed_dim;
  return {make_linear(name + ".q", e, e), make_linear(name + ".k", e, e),
          make_linear(name + ".v", e, e), make_linear(name + ".out", e, e)};
}

CorrespondenceNet::LayerNorm CorrespondenceNet::make_norm(
    const std::string& name) {
  params_.add_constant(name + ".gain", 1, config_.embed_dim, 1.0);
  params_.add_constant(name + ".bias", 1, config_.embed_dim, 0.0);
  return {name + ".gain", name + ".bias"};
}

CorrespondenceNet::Transformer CorrespondenceNet::make_transformer(
    const std::string& name) {
  const int e = config_.embed_dim;
  const int f = config_.ff_dim;
  Transformer t;
  for (int l = 0; l < config_.tf_layers; ++l) {
    const std::string p = name + ".enc" + std::to_string(l);
    EncoderLayer layer;
    layer.self_attn = make_attention(p + ".self");
    layer.norm1 = make_norm(p + ".norm1");
    layer.ff1 = make_linear(p + ".ff1", e, f);
    layer.ff2 = make_linear(p + ".ff2", f, e);
    layer.norm2 = make_norm(p + ".norm2");
    t.encoder.push_back(std::move(layer));
  }
  for (int l = 0; l < config_.tf_layers; ++l) {
    const std::string p = name + ".dec" + std::to_string(l);
    DecoderLayer layer;
    layer.self_attn = make_attention(p + ".self");
    layer.norm1 = make_norm(p + ".norm1");
    layer.cross_attn = make_attention(p + ".cross");
    layer.norm2 = make_norm(p + ".norm2");
    layer.ff1 = make_linear(p + ".ff1", e, f);
    layer.ff2 = make_linear(p + ".ff2", f, e);
    layer.norm3 = make_norm(p + ".norm3");
    t.decoder.push_back(std::move(layer));
  }
  return t;
}

Tensor CorrespondenceNet::apply(const Linear& l, const Tensor& x) const {
  return diff::add(diff::matmul(x, params_.get(l.w)), params_.get(l.b));
}

Tensor CorrespondenceNet::apply(const Attention& a, const Tensor& query,
                                const Tensor& memory,
                                const std::vector<bool>& key_valid) const {
  const Tensor q = apply(a.q, query);
  const Tensor k = apply(a.k, memory);
  const Tensor v = apply(a.v, memory);
  return apply(a.out, diff::attention(q, k, v, config_.heads, key_valid));
}

Tensor CorrespondenceNet::apply(const LayerNorm& n, const Tensor& x) const {
  return diff::layer_norm(x, params_.get(n.gain), params_.get(n.bias),
                          config_.layer_norm_eps);
}

Tensor CorrespondenceNet::feed_forward(const Linear& l1, const Linear& l2,
                                       const Tensor& x) const {
  return apply(l2, diff::relu(apply(l1, x)));
}

std::vector<bool> CorrespondenceNet::key_mask(int valid) const {
  if (!config_.mask_padding || valid < 0) return {};
  std::vector<bool> mask(config_.n_max + 1, false);
  for (int i = 0; i <= valid && i <= config_.n_max; ++i) mask[i] = true;
  return mask;
}

Tensor CorrespondenceNet::run(const Transformer& t, const Tensor& own,
                              const Tensor& other,
                              const std::vector<bool>& own_valid,
                              const std::vector<bool>& other_valid) const {
  Tensor x = own;
  for (const EncoderLayer& layer : t.encoder) {
    x = apply(layer.norm1, diff::add(x, apply(layer.self_attn, x, x, own_valid)));
    x = apply(layer.norm2, diff::add(x, feed_forward(layer.ff1, layer.ff2, x)));
  }
  for (const DecoderLayer& layer : t.decoder) {
    x = apply(layer.norm1, diff::add(x, apply(layer.self_attn, x, x, own_valid)));
    x = apply(layer.norm2,
              diff::add(x, apply(layer.cross_attn, x, other, other_valid)));
    x = apply(layer.norm3, diff::add(x, feed_forward(layer.ff1, layer.ff2, x)));
  }
  return x;
}

Tensor CorrespondenceNet::embed_points(const PaddedCloud& padded) const {
  Tensor x = Tensor::constant(padded.matrix);
  for (std::size_t i = 0; i < embed_.size(); ++i) {
    x = apply(embed_[i], x);
    if (i + 1 < embed_.size()) x = diff::relu(x);
  }
  return x;
}

std::pair<Tensor, Tensor> CorrespondenceNet::cross_transform(
    const Tensor& emb_a, const Tensor& emb_b, int valid_a, int valid_b) const {
  if (emb_a.rows() != emb_b.rows() || emb_a.cols() != config_.embed_dim ||
      emb_b.cols() != config_.embed_dim) {
    throw Error(ErrorKind::kShapeMismatch,
                "cross_transform: embeddings must both be (N+1) x E");
  }
  const std::vector<bool> mask_a = key_mask(valid_a);
  const std::vector<bool> mask_b = key_mask(valid_b);
  Tensor phi_a = run(tf_a_, emb_a, emb_b, mask_a, mask_b);
  Tensor phi_b = run(tf_b_, emb_b, emb_a, mask_b, mask_a);
  return {std::move(phi_a), std::move(phi_b)};
}

AffinityMatrix CorrespondenceNet::affinity(const PaddedCloud& a,
                                           const PaddedCloud& b) const {
  if (a.n_max() != config_.n_max || b.n_max() != config_.n_max) {
    throw Error(ErrorKind::kShapeMismatch,
                "affinity: clouds padded to N = " + std::to_string(a.n_max()) +
                    "/" + std::to_string(b.n_max()) + ", model has N = " +
                    std::to_string(config_.n_max));
  }
  const Tensor emb_a = embed_points(a);
  const Tensor emb_b = embed_points(b);
  auto [phi_a, phi_b] = cross_transform(emb_a, emb_b, a.valid_count, b.valid_count);
  return affinity_from_embeddings(diff::add(emb_a, phi_a), diff::add(emb_b, phi_b),
                                  a.valid_count, b.valid_count);
}

std::vector<std::pair<std::string, std::string>> CorrespondenceNet::header()
    const {
  auto h = model_config_header(config_);
  h.emplace_back("model.seed", std::to_string(params_.seed()));
  return h;
}

std::vector<std::pair<std::string, std::string>> model_config_header(
    const ModelConfig& c) {
  std::string hidden;
  for (std::size_t i = 0; i < c.mlp_hidden.size(); ++i) {
    if (i) hidden += ",";
    hidden += std::to_string(c.mlp_hidden[i]);
  }
  return {
      {"model.n_max", std::to_string(c.n_max)},
      {"model.embed_dim", std::to_string(c.embed_dim)},
      {"model.mlp_hidden", hidden},
      {"model.tf_layers", std::to_string(c.tf_layers)},
      {"model.heads", std::to_string(c.heads)},
      {"model.ff_dim", std::to_string(c.ff_dim)},
      {"model.share_transformers", c.share_transformers ? "true" : "false"},
      {"model.mask_padding", c.mask_padding ? "true" : "false"},
      {"model.layer_norm_eps", format_double(c.layer_norm_eps)},
  };
}

ModelConfig model_config_from_header(const diff::Checkpoint& checkpoint) {
  const KeyValueConfig kv = KeyValueConfig::from_pairs(checkpoint.header);
  ModelConfig c;
  c.n_max = kv.get_int("model.n_max");
  c.embed_dim = kv.get_int("model.embed_dim");
  c.mlp_hidden = kv.get_int_list("model.mlp_hidden");
  c.tf_layers = kv.get_int("model.tf_layers");
  c.heads = kv.get_int("model.heads");
  c.ff_dim = kv.get_int("model.ff_dim");
  c.share_transformers = kv.get_bool("model.share_transformers");
  c.mask_padding = kv.get_bool("model.mask_padding");
  c.layer_norm_eps = kv.get_double("model.layer_norm_eps");
  return c;
}

void save_model(const CorrespondenceNet& net, const std::filesystem::path& path,
                std::vector<std::pair<std::string, std::string>> extra) {
  auto header = net.header();
  for (auto& kv : extra) header.push_back(std::move(kv));
  diff::write_checkpoint(path, diff::make_checkpoint(net.params(), std::move(header)));
}

CorrespondenceNet load_model(const std::filesystem::path& path,
                             int expected_version) {
  const diff::Checkpoint ckpt = diff::read_checkpoint(path, expected_version);
  const KeyValueConfig kv = KeyValueConfig::from_pairs(ckpt.header);
  const auto seed = parse_int(kv.get_string_or("model.seed", "0"));
  CorrespondenceNet net(model_config_from_header(ckpt),
                        seed ? static_cast<std::uint64_t>(*seed) : 0);
  diff::load_parameters(net.params(), ckpt);
  return net;
}

}  // namespace radcorr
