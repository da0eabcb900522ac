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
#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "config.hpp"
#include "files.hpp"
#include "radcorr/dataset.hpp"
#include "radcorr/diff/checkpoint.hpp"
#include "radcorr/error.hpp"
#include "radcorr/eval.hpp"
#include "radcorr/kvconfig.hpp"
#include "radcorr/labelgen.hpp"
#include "radcorr/matcher.hpp"
#include "radcorr/model.hpp"
#include "radcorr/synth.hpp"
#include "radcorr/trainer.hpp"

namespace radcorr::cli {
namespace {

namespace fs = std::filesystem;
using IndexPairs = std::vector<std::pair<int, int>>;

void require_file(const fs::path& path, const std::string& what) {
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorKind::kNotFound, what + " '" + path.string() + "' not found");
  }
}

void require_dir(const fs::path& path, const std::string& what) {
  if (!fs::is_directory(path)) {
    throw Error(ErrorKind::kNotFound, what + " '" + path.string() + "' not found");
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kNotFound, "cannot write '" + path.string() + "'");
  return out;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
// is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::map<std::string, LabelSet> load_labels(const Dataset& ds, const fs::path& dir,
                                            int version) {
  std::map<std::string, LabelSet> out;
  for (const SequenceEntry& e : ds.manifest.sequences) {
    const fs::path path = dir / (e.name + ".labels");
    if (!fs::exists(path)) {
      throw Error(ErrorKind::kNotFound,
                  "'" + path.string() + "' not found; run 'radcorr label' first");
    }
    for (PairLabels& l : read_labels(path, version)) out[l.id] = std::move(l.labels);
  }
  return out;
}

IndexPairs label_pairs(const LabelSet& labels) {
  IndexPairs out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels.labels[i] > 0) out.emplace_back(static_cast<int>(i), labels.labels[i] - 1);
  }
  return out;
}

std::map<std::string, IndexPairs> load_truth(const fs::path& path, int version) {
  std::map<std::string, IndexPairs> out;
  auto add = [&](const fs::path& file) {
    for (PairTruth& t : read_truth(file, version)) out[t.id] = std::move(t.pairs);
  };
  if (fs::is_directory(path)) {
    const Manifest m = read_manifest(path / "manifest.txt", version);
    for (const SequenceEntry& e : m.sequences) {
      const fs::path file = path / (e.name + ".truth");
      require_file(file, "truth file");
      add(file);
    }
  } else {
    require_file(path, "truth file");
    add(path);
  }
  return out;
}

}  // namespace

void cmd_gen(const GlobalOptions& g, const GenArgs& a) {
  require_file(a.config, "config");
  GenConfig conf = load_gen_config(a.config, g.format_version);
  if (g.seed) conf.synth.seed = *g.seed;
  fs::create_directories(a.out_dir);

  Manifest manifest;
  manifest.gate = conf.gate;
  manifest.fov = conf.synth.fov;
  std::vector<std::vector<ScanRecord>> all;
  for (int k = 0; k < conf.sequences; ++k) {
    SynthConfig sc = conf.synth;
    sc.seed = conf.synth.seed + static_cast<std::uint64_t>(k);
    SynthSequence seq = generate_synthetic(sc, conf.scans);
    const std::string name = conf.name_prefix + std::to_string(k);
    write_sequence(seq.records, a.out_dir / (name + ".seq"));
    std::vector<PairTruth> truth;
    for (std::size_t p = 0; p < seq.truth.size(); ++p) {
      truth.push_back({pair_id(name, p), seq.truth[p]});
    }
    write_truth(truth, a.out_dir / (name + ".truth"));
    manifest.sequences.push_back({name, static_cast<int>(seq.records.size())});
    all.push_back(std::move(seq.records));
  }
  manifest.n_max = compute_n_max(all, manifest.fov);
  write_manifest(manifest, a.out_dir / "manifest.txt");
  std::cout << "generated " << conf.sequences << " sequence(s), "
            << conf.sequences * (conf.scans - 1) << " pairs, n_max " << manifest.n_max
            << " in " << a.out_dir.string() << '\n';
}

void cmd_label(const GlobalOptions& g, const LabelArgs& a) {
  require_dir(a.dataset, "dataset");
  Dataset ds = load_dataset(a.dataset, g.format_version);
  const double gate = a.gate.value_or(ds.manifest.gate);
  if (!(gate > 0.0)) throw Error(ErrorKind::kInvalidArgument, "gate must be positive");

  std::vector<LabelSet> labels(ds.pairs.size());
  parallel_for(ds.pairs.size(), g.threads, [&](std::size_t i) {
    labels[i] = label_pair(ds.pairs[i], gate, ds.manifest.fov);
  });

  std::size_t next = 0;
  long matched = 0;
  for (const SequenceEntry& e : ds.manifest.sequences) {
    std::vector<PairLabels> out;
    const std::string prefix = e.name + ":";
    for (; next < ds.pairs.size() && ds.pairs[next].id.rfind(prefix, 0) == 0; ++next) {
      const PairRecord& p = ds.pairs[next];
      out.push_back({p.id, p.prev_timestamp, p.curr_timestamp, labels[next]});
      matched += labels[next].matched_count();
    }
    write_labels(out, a.dataset / (e.name + ".labels"));
  }
  ds.manifest.gate = gate;
  write_manifest(ds.manifest, a.dataset / "manifest.txt");
  std::cout << "labeled " << ds.pairs.size() << " pairs at gate " << format_double(gate)
            << ", " << matched << " matched rows\n";
}

void cmd_train(const GlobalOptions& g, const TrainArgs& a) {
  require_dir(a.dataset, "dataset");
  require_file(a.model_config, "model config");
  require_file(a.train_config, "train config");
  const Dataset ds = load_dataset(a.dataset, g.format_version);
  ModelConfig mconf = load_model_config(a.model_config, g.format_version);
  TrainSettings settings = load_train_settings(a.train_config, g.format_version);
  if (g.seed) settings.train.seed = *g.seed;
  if (mconf.n_max != 0 && mconf.n_max != ds.manifest.n_max) {
    throw Error(ErrorKind::kShapeMismatch,
                "model config n_max " + std::to_string(mconf.n_max) +
                    " differs from the dataset's " + std::to_string(ds.manifest.n_max));
  }
  mconf.n_max = ds.manifest.n_max;
  mconf.validate();
  if (ds.pairs.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "training needs at least 2 pairs");
  }

  const auto labels = load_labels(ds, a.dataset, g.format_version);
  std::vector<TrainExample> examples;
  for (const PairRecord& p : ds.pairs) {
    const auto it = labels.find(p.id);
    if (it == labels.end()) {
      throw Error(ErrorKind::kFormat, "no labels for pair '" + p.id + "'");
    }
    examples.push_back(make_example(p, it->second, ds.manifest.fov, ds.manifest.n_max));
  }
  const auto [train_idx, val_idx] =
      split_indices(examples.size(), settings.train.val_fraction, settings.train.seed);
  std::vector<TrainExample> train_set, val_set;
  for (int i : train_idx) train_set.push_back(examples[i]);
  for (int i : val_idx) val_set.push_back(examples[i]);

  fs::create_directories(a.out_dir);
  std::ofstream loss_log = open_out(a.out_dir / "loss.csv");
  loss_log << "epoch,mean_loss,val_precision,val_recall\n";
  TrainOutputs outputs;
  outputs.out_dir = a.out_dir;
  outputs.checkpoint_header = {{"dataset.n_max", std::to_string(ds.manifest.n_max)},
                               {"dataset.gate", format_double(ds.manifest.gate)}};
  outputs.on_epoch = [&](const EpochMetrics& m) {
    loss_log << m.epoch << ',' << format_double(m.mean_loss) << ','
             << format_double(m.val_precision) << ',' << format_double(m.val_recall)
             << '\n'
             << std::flush;
    spdlog::info("epoch {} loss {:.5f} val P {:.3f} R {:.3f} ({:.1f} s)", m.epoch,
                 m.mean_loss, m.val_precision, m.val_recall, m.wall_seconds);
  };
  spdlog::info("training on {} pairs, validating on {}", train_set.size(),
               val_set.size());
  const TrainResult result = train(train_set, val_set, mconf, settings.train, outputs);

  if (settings.calibrate_precision >= 0.0) {
    InferenceConfig ic;
    ic.fov = ds.manifest.fov;
    ic.score_space = settings.score_space;
    std::vector<LabeledPair> cal;
    for (int i : val_idx) {
      const PairRecord& p = ds.pairs[i];
      cal.push_back({p.prev, p.curr,
                     p.has_truth ? p.truth : label_pairs(labels.at(p.id))});
    }
    const Calibration c =
        calibrate_threshold(cal, result.model, settings.calibrate_precision, ic);
    auto header = outputs.checkpoint_header;
    header.emplace_back("train.seed", std::to_string(settings.train.seed));
    header.emplace_back("infer.threshold", format_double(c.threshold));
    header.emplace_back("infer.score_space", score_space_name(ic.score_space));
    save_model(result.model, a.out_dir / "model.ckpt", header);
    std::cout << "calibrated threshold " << format_double(c.threshold) << " ("
              << score_space_name(ic.score_space) << "): val precision "
              << format_double(c.precision) << ", recall " << format_double(c.recall)
              << (c.attained ? "" : ", target not attained") << '\n';
  }
  const EpochMetrics& last = result.history.back();
  std::cout << "trained " << last.epoch << " epochs, loss "
            << format_double(result.initial_loss) << " -> "
            << format_double(last.mean_loss) << "; model in "
            << (a.out_dir / "model.ckpt").string() << '\n';
}

void cmd_infer(const GlobalOptions& g, const InferArgs& a) {
  require_dir(a.dataset, "dataset");
  require_file(a.checkpoint, "checkpoint");
  const Dataset ds = load_dataset(a.dataset, g.format_version);
  const diff::Checkpoint ckpt = diff::read_checkpoint(a.checkpoint, g.format_version);
  const CorrespondenceNet net = load_model(a.checkpoint, g.format_version);
  if (net.config().n_max != ds.manifest.n_max) {
    throw Error(ErrorKind::kShapeMismatch,
                "model n_max " + std::to_string(net.config().n_max) +
                    " differs from the dataset's " + std::to_string(ds.manifest.n_max));
  }
  const KeyValueConfig header = KeyValueConfig::from_pairs(ckpt.header);

  InferenceConfig ic;
  ic.fov = ds.manifest.fov;
  ic.score_space = parse_score_space(
      a.score_space.value_or(header.get_string_or("infer.score_space", "logit")));
  ic.accept_threshold = a.threshold.value_or(header.get_double_or(
      "infer.threshold", -std::numeric_limits<double>::infinity()));
  if (!a.affinity_dir.empty()) fs::create_directories(a.affinity_dir);

  std::vector<PairMatches> results(ds.pairs.size());
  std::vector<TimingRow> timing(ds.pairs.size());
  parallel_for(ds.pairs.size(), g.threads, [&](std::size_t i) {
    const PairRecord& p = ds.pairs[i];
    const auto t0 = std::chrono::steady_clock::now();
    MatchSet m = match_pair(p.prev, p.curr, net, ic);
    const auto t1 = std::chrono::steady_clock::now();
    results[i] = {p.id, p.prev_timestamp, p.curr_timestamp, std::move(m.matches)};
    timing[i] = {p.id, std::chrono::duration<double>(t1 - t0).count()};
    if (!a.affinity_dir.empty()) {
      write_affinity({p.id, ic.score_space, score_block(p.prev, p.curr, net, ic)},
                     a.affinity_dir / (file_stem(p.id) + ".aff"));
    }
  });
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  write_matches(results, a.out);
  if (!a.timing.empty()) write_timing(timing, a.timing);

  std::size_t total = 0;
  double seconds = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    total += results[i].matches.size();
    seconds += timing[i].seconds;
  }
  std::cout << "matched " << results.size() << " pairs, " << total
            << " matches at threshold " << format_double(ic.accept_threshold) << " ("
            << score_space_name(ic.score_space) << "), mean "
            << format_double(results.empty() ? 0.0 : seconds / results.size() * 1e3)
            << " ms/pair\n";
}

void cmd_eval(const GlobalOptions& g, const EvalArgs& a) {
  require_file(a.matches, "matches file");
  const std::vector<PairMatches> matches = read_matches(a.matches, g.format_version);
  const auto truth = load_truth(a.truth, g.format_version);

  std::vector<PairMetrics> rows(matches.size());
  std::vector<std::vector<Match>> candidates(matches.size());
  std::vector<IndexPairs> reference(matches.size());
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const auto it = truth.find(matches[i].id);
    if (it == truth.end()) {
      throw Error(ErrorKind::kFormat, "no truth for pair '" + matches[i].id + "'");
    }
    candidates[i] = matches[i].matches;
    reference[i] = it->second;
  }
  parallel_for(matches.size(), g.threads, [&](std::size_t i) {
    IndexPairs predicted;
    for (const Match& m : candidates[i]) predicted.emplace_back(m.prev_index, m.curr_index);
    rows[i] = evaluate_pair(matches[i].id, predicted, reference[i]);
  });
  EvalReport report = summarize(std::move(rows));
  report.sweep = threshold_sweep(candidates, reference);
  if (!a.timing.empty()) {
    require_file(a.timing, "timing file");
    std::vector<double> seconds;
    for (const TimingRow& t : read_timing(a.timing, g.format_version)) {
      seconds.push_back(t.seconds);
    }
    set_runtime(report, seconds);
  }
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  write_report_csv(report, a.out);
  std::cout << "pairs " << report.pairs.size() << "  precision "
            << format_double(report.micro_precision) << "  recall "
            << format_double(report.micro_recall) << "  mean F1 "
            << format_double(report.mean_f1) << '\n';
}

namespace {

void plot_report(const fs::path& report_path, const fs::path& out_dir, int version) {
  const EvalReport r = read_report_csv(report_path, version);
  std::ofstream pr = open_out(out_dir / "pr_curve.csv");
  pr << "threshold,precision,recall,predicted,correct\n";
  for (const SweepRow& s : r.sweep) {
    pr << format_double(s.threshold) << ',' << format_double(s.precision) << ','
       << format_double(s.recall) << ',' << s.predicted << ',' << s.correct << '\n';
  }
  std::ofstream pairs = open_out(out_dir / "pair_metrics.csv");
  pairs << "pair_id,precision,recall,f1\n";
  for (const PairMetrics& m : r.pairs) {
    pairs << m.id << ',' << format_double(m.precision) << ',' << format_double(m.recall)
          << ',' << format_double(m.f1) << '\n';
  }
}

void plot_affinity(const fs::path& path, const fs::path& out_dir, bool pgm,
                   int version) {
  const AffinityDump d = read_affinity(path, version);
  const std::string stem = file_stem(d.id);
  const Eigen::MatrixXd& s = d.block.scores;
  std::ofstream out = open_out(out_dir / (stem + "_heatmap.csv"));
  out << "row,col,prev_index,curr_index,score\n";
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      out << i << ',' << j << ',' << d.block.prev_index[i] << ','
          << d.block.curr_index[j] << ',' << format_double(s(i, j)) << '\n';
    }
  }
  if (!pgm || s.size() == 0) return;
  constexpr int kCell = 8;
  const double lo = s.minCoeff();
  const double span = s.maxCoeff() - lo;
  std::ofstream img = open_out(out_dir / (stem + "_heatmap.pgm"));
  img << "P2\n" << s.cols() * kCell << ' ' << s.rows() * kCell << "\n255\n";
  for (Eigen::Index i = 0; i < s.rows() * kCell; ++i) {
    for (Eigen::Index j = 0; j < s.cols() * kCell; ++j) {
      const double v = span > 0.0 ? (s(i / kCell, j / kCell) - lo) / span : 0.5;
      img << (j ? " " : "") << static_cast<int>(std::lround(255.0 * v));
    }
    img << '\n';
  }
}

void plot_overlay(const fs::path& dataset, const fs::path& matches_path,
                  const std::string& id, const fs::path& out_dir, int version) {
  require_dir(dataset, "dataset");
  require_file(matches_path, "matches file");
  const Dataset ds = load_dataset(dataset, version);
  const auto pair = std::find_if(ds.pairs.begin(), ds.pairs.end(),
                                 [&](const PairRecord& p) { return p.id == id; });
  if (pair == ds.pairs.end()) {
    throw Error(ErrorKind::kNotFound, "pair '" + id + "' not in the dataset");
  }
  const auto all = read_matches(matches_path, version);
  const auto pm = std::find_if(all.begin(), all.end(),
                               [&](const PairMatches& m) { return m.id == id; });
  if (pm == all.end()) {
    throw Error(ErrorKind::kNotFound, "pair '" + id + "' not in the matches file");
  }
  // Both clouds in the current scan's frame.
  const PointCloud prev = transform_points(pair->prev, pair->relative);
  const PointCloud& curr = pair->curr;
  for (const auto& [plane, axis] : {std::pair{"xy", 1}, std::pair{"xz", 2}}) {
    const std::string stem = file_stem(id) + "_" + plane;
    std::ofstream pts = open_out(out_dir / (stem + "_points.csv"));
    pts << "cloud,index,u,v\n";
    for (std::size_t i = 0; i < prev.size(); ++i) {
      pts << "prev," << i << ',' << format_double(prev.points[i].x()) << ','
          << format_double(prev.points[i](axis)) << '\n';
    }
    for (std::size_t j = 0; j < curr.size(); ++j) {
      pts << "curr," << j << ',' << format_double(curr.points[j].x()) << ','
          << format_double(curr.points[j](axis)) << '\n';
    }
    std::ofstream seg = open_out(out_dir / (stem + "_matches.csv"));
    seg << "prev_index,curr_index,score,u0,v0,u1,v1\n";
    for (const Match& m : pm->matches) {
      const Point3& a = prev.points.at(m.prev_index);
      const Point3& b = curr.points.at(m.curr_index);
      seg << m.prev_index << ',' << m.curr_index << ',' << format_double(m.score) << ','
          << format_double(a.x()) << ',' << format_double(a(axis)) << ','
          << format_double(b.x()) << ',' << format_double(b(axis)) << '\n';
    }
  }
}

}  // namespace

void cmd_plot(const GlobalOptions& g, const PlotArgs& a) {
  const bool overlay = !a.pair.empty();
  if (a.report.empty() && a.affinity.empty() && !overlay) {
    throw Error(ErrorKind::kInvalidArgument,
                "plot needs --report, --affinity, or --pair with --dataset and --matches");
  }
  fs::create_directories(a.out_dir);
  if (!a.report.empty()) {
    require_file(a.report, "report");
    plot_report(a.report, a.out_dir, g.format_version);
  }
  if (!a.affinity.empty()) {
    require_file(a.affinity, "affinity dump");
    plot_affinity(a.affinity, a.out_dir, a.pgm, g.format_version);
  }
  if (overlay) plot_overlay(a.dataset, a.matches, a.pair, a.out_dir, g.format_version);
  std::cout << "plot data written to " << a.out_dir.string() << '\n';
}

}  // namespace radcorr::cli
