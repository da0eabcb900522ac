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
#include "radcorr/eval.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "radcorr/error.hpp"
#include "radcorr/kvconfig.hpp"

namespace radcorr {

PairMetrics evaluate_pair(const std::string& id,
                          const std::vector<std::pair<int, int>>& predicted,
                          const std::vector<std::pair<int, int>>& truth) {
  const std::set<std::pair<int, int>> t(truth.begin(), truth.end());
  const std::set<std::pair<int, int>> p(predicted.begin(), predicted.end());
  PairMetrics m;
  m.id = id;
  m.predicted = static_cast<int>(p.size());
  m.truth = static_cast<int>(t.size());
  for (const auto& pair : p) m.correct += t.count(pair) ? 1 : 0;
  m.no_predictions = m.predicted == 0;
  m.no_truth = m.truth == 0;
  m.precision = m.no_predictions ? 1.0 : static_cast<double>(m.correct) / m.predicted;
  m.recall = m.no_truth ? 1.0 : static_cast<double>(m.correct) / m.truth;
  const double denom = m.precision + m.recall;
  m.f1 = denom > 0.0 ? 2.0 * m.precision * m.recall / denom : 0.0;
  return m;
}

EvalReport summarize(std::vector<PairMetrics> pairs) {
  EvalReport r;
  r.pairs = std::move(pairs);
  long predicted = 0, correct = 0, truth = 0;
  for (const PairMetrics& m : r.pairs) {
    r.mean_precision += m.precision;
    r.mean_recall += m.recall;
    r.mean_f1 += m.f1;
    predicted += m.predicted;
    correct += m.correct;
    truth += m.truth;
  }
  if (!r.pairs.empty()) {
    const double n = static_cast<double>(r.pairs.size());
    r.mean_precision /= n;
    r.mean_recall /= n;
    r.mean_f1 /= n;
  }
  r.micro_precision = predicted > 0 ? static_cast<double>(correct) / predicted : 1.0;
  r.micro_recall = truth > 0 ? static_cast<double>(correct) / truth : 1.0;
  return r;
}

void set_runtime(EvalReport& report, const std::vector<double>& seconds) {
  report.timed_pairs = static_cast<int>(seconds.size());
  if (seconds.empty()) return;
  double sum = 0.0;
  for (double s : seconds) sum += s;
  report.runtime_mean = sum / static_cast<double>(seconds.size());
  double var = 0.0;
  for (double s : seconds) var += (s - report.runtime_mean) * (s - report.runtime_mean);
  report.runtime_std = std::sqrt(var / static_cast<double>(seconds.size()));
}

void write_report_csv(const EvalReport& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kNotFound, "cannot write '" + path.string() + "'");
  out << "# radcorr-report " << kFormatVersion << '\n';
  out << "# pairs\n";
  out << "pair_id,predicted,truth,correct,precision,recall,f1,no_predictions,no_truth\n";
  for (const PairMetrics& m : r.pairs) {
    out << m.id << ',' << m.predicted << ',' << m.truth << ',' << m.correct << ','
        << format_double(m.precision) << ',' << format_double(m.recall) << ','
        << format_double(m.f1) << ',' << (m.no_predictions ? 1 : 0) << ','
        << (m.no_truth ? 1 : 0) << '\n';
  }
  out << "# aggregate\n";
  out << "pairs,mean_precision,mean_recall,mean_f1,micro_precision,micro_recall\n";
  out << r.pairs.size() << ',' << format_double(r.mean_precision) << ','
      << format_double(r.mean_recall) << ',' << format_double(r.mean_f1) << ','
      << format_double(r.micro_precision) << ',' << format_double(r.micro_recall)
      << '\n';
  out << "# sweep\n";
  out << "threshold,predicted,correct,precision,recall\n";
  for (const SweepRow& s : r.sweep) {
    out << format_double(s.threshold) << ',' << s.predicted << ',' << s.correct
        << ',' << format_double(s.precision) << ',' << format_double(s.recall) << '\n';
  }
  out << "# runtime\n";
  out << "timed_pairs,mean_seconds,std_seconds\n";
  out << r.timed_pairs << ',' << format_double(r.runtime_mean) << ','
      << format_double(r.runtime_std) << '\n';
  if (!out) throw Error(ErrorKind::kFormat, "write failed for '" + path.string() + "'");
}

EvalReport read_report_csv(const std::filesystem::path& path, int expected_version) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot open '" + path.string() + "'");
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::kFormat,
                path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  auto num = [&](const std::string& s) {
    auto v = parse_double(s);
    if (!v) fail("bad number '" + s + "'");
    return *v;
  };

  if (!std::getline(in, line) || line.rfind("# radcorr-report ", 0) != 0) {
    ++line_no;
    fail("expected '# radcorr-report <version>'");
  }
  ++line_no;
  const auto version = parse_int(line.substr(17));
  if (!version) fail("bad format version");
  if (*version != expected_version) {
    throw Error(ErrorKind::kVersionMismatch,
                path.string() + ": format_version " + std::to_string(*version) +
                    ", expected " + std::to_string(expected_version));
  }

  EvalReport r;
  std::string section;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      section = line.substr(2);
      header_seen = false;
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (section == "pairs") {
      if (f.size() != 9) fail("expected 9 fields");
      PairMetrics m;
      m.id = f[0];
      m.predicted = static_cast<int>(num(f[1]));
      m.truth = static_cast<int>(num(f[2]));
      m.correct = static_cast<int>(num(f[3]));
      m.precision = num(f[4]);
      m.recall = num(f[5]);
      m.f1 = num(f[6]);
      m.no_predictions = f[7] == "1";
      m.no_truth = f[8] == "1";
      r.pairs.push_back(m);
    } else if (section == "aggregate") {
      if (f.size() != 6) fail("expected 6 fields");
      r.mean_precision = num(f[1]);
      r.mean_recall = num(f[2]);
      r.mean_f1 = num(f[3]);
      r.micro_precision = num(f[4]);
      r.micro_recall = num(f[5]);
    } else if (section == "sweep") {
      if (f.size() != 5) fail("expected 5 fields");
      r.sweep.push_back({num(f[0]), static_cast<int>(num(f[1])),
                         static_cast<int>(num(f[2])), num(f[3]), num(f[4])});
    } else if (section == "runtime") {
      if (f.size() != 3) fail("expected 3 fields");
      r.timed_pairs = static_cast<int>(num(f[0]));
      r.runtime_mean = num(f[1]);
      r.runtime_std = num(f[2]);
    } else {
      fail("unknown section '" + section + "'");
    }
  }
  return r;
}

}  // namespace radcorr
