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
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "radcorr/error.hpp"

namespace {

using radcorr::ErrorKind;

// One exit code per error category; 1 is reserved for unexpected failures
// and CLI11 uses its own codes (100+) for usage errors.
int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return 10;
    case ErrorKind::kShapeMismatch: return 11;
    case ErrorKind::kNonFinite: return 12;
    case ErrorKind::kCapacity: return 13;
    case ErrorKind::kFormat: return 14;
    case ErrorKind::kVersionMismatch: return 15;
    case ErrorKind::kNotFound: return 16;
    case ErrorKind::kNoLabels: return 17;
    case ErrorKind::kDiverged: return 18;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = radcorr::cli;
  CLI::App app{"radcorr: learned radar point correspondences"};
  app.require_subcommand(1);

  cli::GlobalOptions global;
  std::uint64_t seed = 0;
  std::string log_level = "warn";
  auto* seed_opt = app.add_option("--seed", seed, "Override the seed of the config file");
  app.add_option("--threads", global.threads, "Worker threads for per-pair work")
      ->check(CLI::PositiveNumber);
  app.add_option("--format-version", global.format_version,
                 "Expected format version of every input file");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  cli::GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("--config", gen.config, "Generator config (key = value)")->required();
  gen_cmd->add_option("--out", gen.out_dir, "Output dataset directory")->required();

  cli::LabelArgs label;
  double gate = 0.0;
  auto* label_cmd = app.add_subcommand("label", "Write geometric labels for a dataset");
  label_cmd->add_option("--dataset", label.dataset, "Dataset directory")->required();
  auto* gate_opt = label_cmd->add_option("--gate", gate, "Gate distance in meters");

  cli::TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a labeled dataset");
  train_cmd->add_option("--dataset", train.dataset, "Dataset directory")->required();
  train_cmd->add_option("--model-config", train.model_config, "Model config")->required();
  train_cmd->add_option("--train-config", train.train_config, "Training config")
      ->required();
  train_cmd->add_option("--out", train.out_dir, "Output directory")->required();

  cli::InferArgs infer;
  double threshold = 0.0;
  std::string space;
  auto* infer_cmd = app.add_subcommand("infer", "Match every pair of a dataset");
  infer_cmd->add_option("--dataset", infer.dataset, "Dataset directory")->required();
  infer_cmd->add_option("--checkpoint", infer.checkpoint, "Model checkpoint")->required();
  infer_cmd->add_option("--out", infer.out, "Output matches file")->required();
  auto* thr_opt = infer_cmd->add_option(
      "--threshold", threshold, "Acceptance threshold (default: from the checkpoint)");
  auto* space_opt =
      infer_cmd->add_option("--score-space", space, "logit or softmax");
  infer_cmd->add_option("--affinity-dir", infer.affinity_dir,
                        "Write one affinity dump per pair here");
  infer_cmd->add_option("--timing", infer.timing, "Write per-pair inference seconds");

  cli::EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score matches against truth");
  eval_cmd->add_option("--matches", eval.matches, "Matches file")->required();
  eval_cmd->add_option("--truth", eval.truth, "Dataset directory or .truth file")
      ->required();
  eval_cmd->add_option("--timing", eval.timing, "Timing file from infer");
  eval_cmd->add_option("--out", eval.out, "Report CSV")->required();

  cli::PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Write plot-ready tables");
  plot_cmd->add_option("--report", plot.report, "Report CSV from eval");
  plot_cmd->add_option("--affinity", plot.affinity, "Affinity dump from infer");
  auto* pair_opt = plot_cmd->add_option("--pair", plot.pair, "Pair id for overlays");
  plot_cmd->add_option("--dataset", plot.dataset, "Dataset directory")->needs(pair_opt);
  plot_cmd->add_option("--matches", plot.matches, "Matches file")->needs(pair_opt);
  pair_opt->needs(plot_cmd->get_option("--dataset"))
      ->needs(plot_cmd->get_option("--matches"));
  plot_cmd->add_option("--out", plot.out_dir, "Output directory")->required();
  plot_cmd->add_flag("--pgm", plot.pgm, "Also render the heat map as a PGM image");

  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(spdlog::level::from_str(log_level));
  if (*seed_opt) global.seed = seed;
  if (*gate_opt) label.gate = gate;
  if (*thr_opt) infer.threshold = threshold;
  if (*space_opt) infer.score_space = space;

  try {
    if (*gen_cmd) cli::cmd_gen(global, gen);
    if (*label_cmd) cli::cmd_label(global, label);
    if (*train_cmd) cli::cmd_train(global, train);
    if (*infer_cmd) cli::cmd_infer(global, infer);
    if (*eval_cmd) cli::cmd_eval(global, eval);
    if (*plot_cmd) cli::cmd_plot(global, plot);
  } catch (const radcorr::Error& e) {
    std::cerr << "error [" << radcorr::to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
