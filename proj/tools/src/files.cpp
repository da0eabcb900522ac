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
#include "files.hpp"

#include <fstream>
#include <sstream>

#include "radcorr/dataio.hpp"
#include "radcorr/error.hpp"
#include "radcorr/kvconfig.hpp"

namespace radcorr::cli {
namespace {

class LineReader {
 public:
  LineReader(const std::filesystem::path& path, const std::string& magic,
             int expected_version)
      : path_(path), in_(path) {
    if (!in_) throw Error(ErrorKind::kNotFound, "cannot open '" + path.string() + "'");
    std::string line;
    if (!next(line) || line != magic) fail("expected '" + magic + "'");
    if (!next(line) || line.rfind("format_version ", 0) != 0) {
      fail("expected 'format_version <n>'");
    }
    const auto v = parse_int(line.substr(15));
    if (!v) fail("bad format_version");
    if (*v != expected_version) {
      throw Error(ErrorKind::kVersionMismatch,
                  path.string() + ": format_version " + std::to_string(*v) +
                      ", expected " + std::to_string(expected_version));
    }
  }

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty()) return true;
    }
    return false;
  }

  std::vector<std::string> fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) {
      if (sep != ' ' || !item.empty()) out.push_back(item);
    }
    return out;
  }

  double number(const std::string& s) {
    const auto v = parse_double(s);
    if (!v) fail("bad number '" + s + "'");
    return *v;
  }

  int integer(const std::string& s) {
    const auto v = parse_int(s);
    if (!v) fail("bad integer '" + s + "'");
    return *v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::kFormat,
                path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  int line_no_ = 0;
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kNotFound, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_affinity(const AffinityDump& dump, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  const ScoreBlock& b = dump.block;
  out << "radcorr-affinity\nformat_version " << kFormatVersion << '\n';
  out << "id " << dump.id << '\n';
  out << "score_space " << (dump.score_space == ScoreSpace::kLogit ? "logit" : "softmax")
      << '\n';
  out << "shape " << b.scores.rows() << ' ' << b.scores.cols() << '\n';
  out << "prev_index";
  for (int i : b.prev_index) out << ' ' << i;
  out << "\ncurr_index";
  for (int j : b.curr_index) out << ' ' << j;
  out << '\n';
  for (Eigen::Index i = 0; i < b.scores.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.scores.cols(); ++j) {
      out << (j ? " " : "") << format_double(b.scores(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::kFormat, "write failed for '" + path.string() + "'");
}

AffinityDump read_affinity(const std::filesystem::path& path, int expected_version) {
  LineReader r(path, "radcorr-affinity", expected_version);
  AffinityDump d;
  std::string line;
  auto keyed = [&](const std::string& key) {
    if (!r.next(line)) r.fail("missing '" + key + "'");
    auto f = r.fields(line, ' ');
    if (f.empty() || f[0] != key) r.fail("expected '" + key + "'");
    f.erase(f.begin());
    return f;
  };
  auto id = keyed("id");
  if (id.size() != 1) r.fail("bad id");
  d.id = id[0];
  auto space = keyed("score_space");
  if (space.size() != 1 || (space[0] != "logit" && space[0] != "softmax")) {
    r.fail("bad score_space");
  }
  d.score_space = space[0] == "logit" ? ScoreSpace::kLogit : ScoreSpace::kRowSoftmax;
  auto shape = keyed("shape");
  if (shape.size() != 2) r.fail("bad shape");
  const int rows = r.integer(shape[0]);
  const int cols = r.integer(shape[1]);
  if (rows < 0 || cols < 0) r.fail("negative shape");
  for (const auto& s : keyed("prev_index")) d.block.prev_index.push_back(r.integer(s));
  for (const auto& s : keyed("curr_index")) d.block.curr_index.push_back(r.integer(s));
  if (static_cast<int>(d.block.prev_index.size()) != rows ||
      static_cast<int>(d.block.curr_index.size()) != cols) {
    r.fail("index lists do not match the shape");
  }
  d.block.scores.resize(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!r.next(line)) r.fail("missing score row");
    const auto f = r.fields(line, ' ');
    if (static_cast<int>(f.size()) != cols) r.fail("wrong number of scores");
    for (int j = 0; j < cols; ++j) d.block.scores(i, j) = r.number(f[j]);
  }
  return d;
}

void write_timing(const std::vector<TimingRow>& rows, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "radcorr-timing\nformat_version " << kFormatVersion << '\n';
  out << "pair_id,seconds\n";
  for (const TimingRow& t : rows) out << t.id << ',' << format_double(t.seconds) << '\n';
  if (!out) throw Error(ErrorKind::kFormat, "write failed for '" + path.string() + "'");
}

std::vector<TimingRow> read_timing(const std::filesystem::path& path,
                                   int expected_version) {
  LineReader r(path, "radcorr-timing", expected_version);
  std::vector<TimingRow> rows;
  std::string line;
  if (!r.next(line) || line != "pair_id,seconds") r.fail("expected 'pair_id,seconds'");
  while (r.next(line)) {
    const auto f = r.fields(line, ',');
    if (f.size() != 2) r.fail("expected 2 fields");
    rows.push_back({f[0], r.number(f[1])});
  }
  return rows;
}

std::string file_stem(const std::string& pair_id) {
  std::string s = pair_id;
  for (char& c : s) {
    if (c == ':' || c == '/' || c == '\\') c = '_';
  }
  return s;
}

}  // namespace radcorr::cli
