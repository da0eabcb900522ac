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
#include <optional>
#include <string>

#include "radcorr/dataio.hpp"

namespace radcorr::cli {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;  // overrides the seed of a config file
  int threads = 1;
  int format_version = kFormatVersion;
};

struct GenArgs {
  std::filesystem::path config;
  std::filesystem::path out_dir;
};

struct LabelArgs {
  std::filesystem::path dataset;
  std::optional<double> gate;  // default: the manifest's gate
};

struct TrainArgs {
  std::filesystem::path dataset;
  std::filesystem::path model_config;
  std::filesystem::path train_config;
  std::filesystem::path out_dir;
};

struct InferArgs {
  std::filesystem::path dataset;
  std::filesystem::path checkpoint;
  std::filesystem::path out;  // matches file
  std::optional<double> threshold;
  std::optional<std::string> score_space;
  std::filesystem::path affinity_dir;  // empty: no dumps
  std::filesystem::path timing;        // empty: no timing file
};

struct EvalArgs {
  std::filesystem::path matches;
  std::filesystem::path truth;  // dataset directory or a .truth file
  std::filesystem::path timing;
  std::filesystem::path out;
};

struct PlotArgs {
  std::filesystem::path report;
  std::filesystem::path affinity;
  std::filesystem::path dataset;
  std::filesystem::path matches;
  std::string pair;
  std::filesystem::path out_dir;
  bool pgm = false;
};

void cmd_gen(const GlobalOptions& g, const GenArgs& a);
void cmd_label(const GlobalOptions& g, const LabelArgs& a);
void cmd_train(const GlobalOptions& g, const TrainArgs& a);
void cmd_infer(const GlobalOptions& g, const InferArgs& a);
void cmd_eval(const GlobalOptions& g, const EvalArgs& a);
void cmd_plot(const GlobalOptions& g, const PlotArgs& a);

}  // namespace radcorr::cli
