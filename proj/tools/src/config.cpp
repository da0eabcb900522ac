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
#include "config.hpp"

#include <set>

#include "radcorr/error.hpp"

namespace radcorr::cli {
namespace {

const std::set<std::string> kFovKeys = {
    "fov.azimuth_min",   "fov.azimuth_max", "fov.elevation_min",
    "fov.elevation_max", "fov.range_min",   "fov.range_max"};

KeyValueConfig load_checked(const std::filesystem::path& path,
                            const std::set<std::string>& allowed,
                            int expected_version) {
  KeyValueConfig kv = KeyValueConfig::load(path);
  for (const auto& [key, value] : kv.entries()) {
    if (key == "format_version" || allowed.count(key)) continue;
    throw Error(ErrorKind::kFormat, path.string() + ": unknown key '" + key + "'");
  }
  if (kv.has("format_version") && kv.get_int("format_version") != expected_version) {
    throw Error(ErrorKind::kVersionMismatch,
                path.string() + ": format_version " + kv.get_string("format_version") +
                    ", expected " + std::to_string(expected_version));
  }
  return kv;
}

FovSpec read_fov(const KeyValueConfig& kv, FovSpec fov) {
  fov.azimuth_min = kv.get_double_or("fov.azimuth_min", fov.azimuth_min);
  fov.azimuth_max = kv.get_double_or("fov.azimuth_max", fov.azimuth_max);
  fov.elevation_min = kv.get_double_or("fov.elevation_min", fov.elevation_min);
  fov.elevation_max = kv.get_double_or("fov.elevation_max", fov.elevation_max);
  fov.range_min = kv.get_double_or("fov.range_min", fov.range_min);
  fov.range_max = kv.get_double_or("fov.range_max", fov.range_max);
  fov.validate();
  return fov;
}

}  // namespace

GenConfig load_gen_config(const std::filesystem::path& path, int expected_version) {
  std::set<std::string> allowed = {
      "sequences",   "scans",         "name_prefix",   "gate",
      "min_points",  "max_points",    "translation_step", "rotation_step",
      "noise_sigma", "dropout",       "ghost_rate",    "scan_period",
      "cell_size",   "seed"};
  allowed.insert(kFovKeys.begin(), kFovKeys.end());
  const KeyValueConfig kv = load_checked(path, allowed, expected_version);

  GenConfig g;
  g.sequences = kv.get_int_or("sequences", g.sequences);
  g.scans = kv.get_int_or("scans", g.scans);
  g.name_prefix = kv.get_string_or("name_prefix", g.name_prefix);
  g.gate = kv.get_double_or("gate", g.gate);
  SynthConfig& s = g.synth;
  s.min_points = kv.get_int_or("min_points", s.min_points);
  s.max_points = kv.get_int_or("max_points", s.max_points);
  s.translation_step = kv.get_double_or("translation_step", s.translation_step);
  s.rotation_step = kv.get_double_or("rotation_step", s.rotation_step);
  s.noise_sigma = kv.get_double_or("noise_sigma", s.noise_sigma);
  s.dropout = kv.get_double_or("dropout", s.dropout);
  s.ghost_rate = kv.get_double_or("ghost_rate", s.ghost_rate);
  s.scan_period = kv.get_double_or("scan_period", s.scan_period);
  s.cell_size = kv.get_double_or("cell_size", s.cell_size);
  s.seed = static_cast<std::uint64_t>(kv.get_int_or("seed", static_cast<int>(s.seed)));
  s.fov = read_fov(kv, s.fov);
  s.validate();
  if (g.sequences < 1 || g.scans < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                path.string() + ": need sequences >= 1 and scans >= 2");
  }
  if (!(g.gate > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, path.string() + ": gate must be positive");
  }
  return g;
}

ModelConfig load_model_config(const std::filesystem::path& path, int expected_version) {
  const KeyValueConfig kv = load_checked(
      path,
      {"n_max", "embed_dim", "mlp_hidden", "tf_layers", "heads", "ff_dim",
       "share_transformers", "mask_padding", "layer_norm_eps"},
      expected_version);
  ModelConfig m;
  m.n_max = kv.get_int_or("n_max", 0);
  m.embed_dim = kv.get_int_or("embed_dim", m.embed_dim);
  m.mlp_hidden = kv.get_int_list_or("mlp_hidden", m.mlp_hidden);
  m.tf_layers = kv.get_int_or("tf_layers", m.tf_layers);
  m.heads = kv.get_int_or("heads", m.heads);
  m.ff_dim = kv.get_int_or("ff_dim", m.ff_dim);
  m.share_transformers = kv.get_bool_or("share_transformers", m.share_transformers);
  m.mask_padding = kv.get_bool_or("mask_padding", m.mask_padding);
  m.layer_norm_eps = kv.get_double_or("layer_norm_eps", m.layer_norm_eps);
  return m;
}

TrainSettings load_train_settings(const std::filesystem::path& path,
                                  int expected_version) {
  const KeyValueConfig kv = load_checked(
      path,
      {"batch_size", "epochs", "learning_rate", "beta1", "beta2", "epsilon", "seed",
       "checkpoint_every", "supervision", "val_fraction", "shuffle", "val_threshold",
       "val_score_space", "calibrate_precision", "score_space"},
      expected_version);
  TrainSettings s;
  TrainConfig& t = s.train;
  t.batch_size = kv.get_int_or("batch_size", t.batch_size);
  t.epochs = kv.get_int_or("epochs", t.epochs);
  t.adam.learning_rate = kv.get_double_or("learning_rate", t.adam.learning_rate);
  t.adam.beta1 = kv.get_double_or("beta1", t.adam.beta1);
  t.adam.beta2 = kv.get_double_or("beta2", t.adam.beta2);
  t.adam.epsilon = kv.get_double_or("epsilon", t.adam.epsilon);
  t.seed = static_cast<std::uint64_t>(kv.get_int_or("seed", static_cast<int>(t.seed)));
  t.checkpoint_every = kv.get_int_or("checkpoint_every", t.checkpoint_every);
  const std::string sup = kv.get_string_or("supervision", "all_rows");
  if (sup == "all_rows") {
    t.supervision = Supervision::kAllRows;
  } else if (sup == "matched_rows") {
    t.supervision = Supervision::kMatchedRows;
  } else {
    throw Error(ErrorKind::kFormat, path.string() + ": supervision must be all_rows or matched_rows");
  }
  t.val_fraction = kv.get_double_or("val_fraction", t.val_fraction);
  t.shuffle = kv.get_bool_or("shuffle", t.shuffle);
  t.val_threshold = kv.get_double_or("val_threshold", t.val_threshold);
  t.val_score_space = parse_score_space(kv.get_string_or("val_score_space", "logit"));
  s.calibrate_precision = kv.get_double_or("calibrate_precision", s.calibrate_precision);
  s.score_space = parse_score_space(kv.get_string_or("score_space", "softmax"));
  t.validate();
  return s;
}

ScoreSpace parse_score_space(const std::string& text) {
  if (text == "logit") return ScoreSpace::kLogit;
  if (text == "softmax") return ScoreSpace::kRowSoftmax;
  throw Error(ErrorKind::kInvalidArgument,
              "score space must be 'logit' or 'softmax', got '" + text + "'");
}

std::string score_space_name(ScoreSpace space) {
  return space == ScoreSpace::kLogit ? "logit" : "softmax";
}

}  // namespace radcorr::cli
