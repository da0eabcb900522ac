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
#include "radcorr/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "radcorr/error.hpp"
#include "radcorr/kvconfig.hpp"

namespace radcorr {

namespace {

class LineWriter {
 public:
  LineWriter(const std::filesystem::path& path, const char* magic)
      : path_(path), out_(path, std::ios::trunc) {
    if (!out_) {
      throw Error(ErrorKind::kNotFound, "cannot open '" + path.string() + "' for writing");
    }
    out_ << magic << '\n' << "format_version " << kFormatVersion << '\n';
  }
  std::ostream& stream() { return out_; }
  void finish() {
    out_.flush();
    if (!out_) throw Error(ErrorKind::kFormat, "write failed for '" + path_.string() + "'");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// Tokenized record lines of a versioned text file.
class RecordReader {
 public:
  RecordReader(const std::filesystem::path& path, const char* magic,
               int expected_version)
      : path_(path), in_(path) {
    if (!in_) throw Error(ErrorKind::kNotFound, "cannot open '" + path.string() + "'");
    std::string line;
    if (!next_raw(line) || trim(line) != magic) {
      fail(std::string("expected '") + magic + "' header");
    }
    std::vector<std::string> tok;
    if (!next(tok) || tok.size() != 2 || tok[0] != "format_version") {
      fail("expected 'format_version <n>'");
    }
    const auto v = parse_int(tok[1]);
    if (!v) fail("bad format_version '" + tok[1] + "'");
    if (*v != expected_version) {
      throw Error(ErrorKind::kVersionMismatch,
                  path_.string() + ": format_version " + tok[1] + ", expected " +
                      std::to_string(expected_version));
    }
  }

  /// Next non-blank, non-comment line split on whitespace.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (next_raw(line)) {
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      tokens.clear();
      std::istringstream ss(t);
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::kFormat,
                path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

  double number(const std::string& tok) const {
    const auto v = parse_double(tok);
    if (!v) fail("'" + tok + "' is not a number");
    return *v;
  }
  double finite(const std::string& tok) const {
    const double v = number(tok);
    if (!std::isfinite(v)) fail("non-finite value '" + tok + "'");
    return v;
  }
  long long integer(const std::string& tok) const {
    const auto v = parse_int(tok);
    if (!v) fail("'" + tok + "' is not an integer");
    return *v;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }
  bool next_raw(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    return true;
  }

  std::filesystem::path path_;
  std::ifstream in_;
  int line_no_ = 0;
};

void expect_count(const RecordReader& r, const std::vector<std::string>& tok,
                  std::size_t fixed, long long count, std::size_t per_item) {
  if (count < 0) r.fail("negative count");
  if (tok.size() != fixed + static_cast<std::size_t>(count) * per_item) {
    r.fail("expected " + std::to_string(count) + " items, line has " +
           std::to_string(tok.size()) + " tokens");
  }
}

}  // namespace

PointCloud ScanRecord::cloud() const {
  PointCloud c;
  c.points = points;
  c.timestamp = timestamp;
  return c;
}

void write_sequence(const std::vector<ScanRecord>& records,
                    const std::filesystem::path& path) {
  LineWriter w(path, "radcorr-sequence");
  auto& out = w.stream();
  out << "# scan timestamp qw qx qy qz tx ty tz count x1 y1 z1 ... (meters)\n";
  for (const ScanRecord& r : records) {
    out << "scan " << format_double(r.timestamp);
    for (double v : {r.orientation.w(), r.orientation.x(), r.orientation.y(),
                     r.orientation.z(), r.position.x(), r.position.y(),
                     r.position.z()}) {
      out << ' ' << format_double(v);
    }
    out << ' ' << r.points.size();
    for (const Point3& p : r.points) {
      out << ' ' << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
          << format_double(p.z());
    }
    out << '\n';
  }
  w.finish();
}

std::vector<ScanRecord> read_sequence(const std::filesystem::path& path,
                                      int expected_version) {
  RecordReader reader(path, "radcorr-sequence", expected_version);
  std::vector<ScanRecord> records;
  std::vector<std::string> tok;
  while (reader.next(tok)) {
    if (tok[0] != "scan" || tok.size() < 10) reader.fail("expected a scan record");
    ScanRecord r;
    r.timestamp = reader.finite(tok[1]);
    Eigen::Quaterniond q(reader.finite(tok[2]), reader.finite(tok[3]),
                         reader.finite(tok[4]), reader.finite(tok[5]));
    const double norm = q.norm();
    if (std::abs(norm - 1.0) > 1e-6) {
      reader.fail("quaternion norm " + format_double(norm) + " is not 1");
    }
    if (std::abs(norm - 1.0) > 1e-12) q.normalize();
    r.orientation = q;
    r.position = {reader.finite(tok[6]), reader.finite(tok[7]), reader.finite(tok[8])};
    const long long count = reader.integer(tok[9]);
    expect_count(reader, tok, 10, count, 3);
    r.points.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) {
      const std::size_t at = 10 + 3 * static_cast<std::size_t>(i);
      Point3 p(reader.finite(tok[at]), reader.finite(tok[at + 1]),
               reader.finite(tok[at + 2]));
      if (p.isZero(0.0)) {
        reader.fail("point " + std::to_string(i) +
                    " at the exact origin collides with zero padding");
      }
      r.points.push_back(p);
    }
    if (!records.empty() && !(r.timestamp > records.back().timestamp)) {
      reader.fail("timestamps must be strictly increasing");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ScanPair> make_pairs(const std::vector<ScanRecord>& records) {
  std::vector<ScanPair> pairs;
  for (std::size_t k = 1; k < records.size(); ++k) {
    ScanPair p;
    p.prev = records[k - 1].cloud();
    p.curr = records[k].cloud();
    p.relative = records[k].pose().inverse() * records[k - 1].pose();
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kNotFound, "cannot open '" + path.string() + "' for writing");
  }
  out << "# radcorr dataset manifest\n";
  out << "format_version = " << m.format_version << '\n';
  out << "n_max = " << m.n_max << '\n';
  out << "gate = " << format_double(m.gate) << '\n';
  out << "fov.azimuth_min = " << format_double(m.fov.azimuth_min) << '\n';
  out << "fov.azimuth_max = " << format_double(m.fov.azimuth_max) << '\n';
  out << "fov.elevation_min = " << format_double(m.fov.elevation_min) << '\n';
  out << "fov.elevation_max = " << format_double(m.fov.elevation_max) << '\n';
  out << "fov.range_min = " << format_double(m.fov.range_min) << '\n';
  out << "fov.range_max = " << format_double(m.fov.range_max) << '\n';
  std::string names;
  for (const SequenceEntry& s : m.sequences) {
    if (!names.empty()) names += ",";
    names += s.name;
  }
  out << "sequences = " << names << '\n';
  for (const SequenceEntry& s : m.sequences) {
    out << "sequence." << s.name << ".records = " << s.records << '\n';
  }
  if (!out) throw Error(ErrorKind::kFormat, "write failed for '" + path.string() + "'");
}

Manifest read_manifest(const std::filesystem::path& path, int expected_version) {
  const KeyValueConfig kv = KeyValueConfig::load(path);
  Manifest m;
  m.format_version = kv.get_int("format_version");
  if (m.format_version != expected_version) {
    throw Error(ErrorKind::kVersionMismatch,
                path.string() + ": format_version " +
                    std::to_string(m.format_version) + ", expected " +
                    std::to_string(expected_version));
  }
  m.n_max = kv.get_int("n_max");
  m.gate = kv.get_double("gate");
  m.fov.azimuth_min = kv.get_double("fov.azimuth_min");
  m.fov.azimuth_max = kv.get_double("fov.azimuth_max");
  m.fov.elevation_min = kv.get_double("fov.elevation_min");
  m.fov.elevation_max = kv.get_double("fov.elevation_max");
  m.fov.range_min = kv.get_double("fov.range_min");
  m.fov.range_max = kv.get_double("fov.range_max");
  m.fov.validate();
  std::stringstream names(kv.get_string_or("sequences", ""));
  std::string name;
  while (std::getline(names, name, ',')) {
    if (name.empty()) continue;
    SequenceEntry e;
    e.name = name;
    e.records = kv.get_int_or("sequence." + name + ".records", 0);
    m.sequences.push_back(e);
  }
  return m;
}

int compute_n_max(const std::vector<std::vector<ScanRecord>>& sequences,
                  const FovSpec& fov) {
  int n = 0;
  for (const auto& seq : sequences) {
    for (const ScanRecord& r : seq) {
      n = std::max(n, static_cast<int>(fov_indices(r.cloud(), fov).size()));
    }
  }
  return n;
}

std::string pair_id(const std::string& sequence, std::size_t prev_index) {
  return sequence + ":" + std::to_string(prev_index);
}

void write_labels(const std::vector<PairLabels>& labels,
                  const std::filesystem::path& path) {
  LineWriter w(path, "radcorr-labels");
  auto& out = w.stream();
  out << "# pair id t_prev t_curr gate count label_1 ... label_count\n";
  for (const PairLabels& p : labels) {
    out << "pair " << p.id << ' ' << format_double(p.prev_timestamp) << ' '
        << format_double(p.curr_timestamp) << ' ' << format_double(p.labels.gate)
        << ' ' << p.labels.size();
    for (int l : p.labels.labels) out << ' ' << l;
    out << '\n';
  }
  w.finish();
}

std::vector<PairLabels> read_labels(const std::filesystem::path& path,
                                    int expected_version) {
  RecordReader reader(path, "radcorr-labels", expected_version);
  std::vector<PairLabels> out;
  std::vector<std::string> tok;
  while (reader.next(tok)) {
    if (tok[0] != "pair" || tok.size() < 6) reader.fail("expected a pair record");
    PairLabels p;
    p.id = tok[1];
    p.prev_timestamp = reader.finite(tok[2]);
    p.curr_timestamp = reader.finite(tok[3]);
    p.labels.gate = reader.number(tok[4]);
    const long long count = reader.integer(tok[5]);
    expect_count(reader, tok, 6, count, 1);
    for (long long i = 0; i < count; ++i) {
      const long long l = reader.integer(tok[6 + static_cast<std::size_t>(i)]);
      if (l < 0) reader.fail("negative label");
      p.labels.labels.push_back(static_cast<int>(l));
    }
    out.push_back(std::move(p));
  }
  return out;
}

void write_matches(const std::vector<PairMatches>& matches,
                   const std::filesystem::path& path) {
  LineWriter w(path, "radcorr-matches");
  auto& out = w.stream();
  out << "# pair id t_prev t_curr count (prev_index curr_index score)*count\n";
  for (const PairMatches& p : matches) {
    out << "pair " << p.id << ' ' << format_double(p.prev_timestamp) << ' '
        << format_double(p.curr_timestamp) << ' ' << p.matches.size();
    for (const Match& m : p.matches) {
      out << ' ' << m.prev_index << ' ' << m.curr_index << ' ' << format_double(m.score);
    }
    out << '\n';
  }
  w.finish();
}

std::vector<PairMatches> read_matches(const std::filesystem::path& path,
                                      int expected_version) {
  RecordReader reader(path, "radcorr-matches", expected_version);
  std::vector<PairMatches> out;
  std::vector<std::string> tok;
  while (reader.next(tok)) {
    if (tok[0] != "pair" || tok.size() < 5) reader.fail("expected a pair record");
    PairMatches p;
    p.id = tok[1];
    p.prev_timestamp = reader.finite(tok[2]);
    p.curr_timestamp = reader.finite(tok[3]);
    const long long count = reader.integer(tok[4]);
    expect_count(reader, tok, 5, count, 3);
    for (long long i = 0; i < count; ++i) {
      const std::size_t at = 5 + 3 * static_cast<std::size_t>(i);
      Match m;
      m.prev_index = static_cast<int>(reader.integer(tok[at]));
      m.curr_index = static_cast<int>(reader.integer(tok[at + 1]));
      m.score = reader.number(tok[at + 2]);
      p.matches.push_back(m);
    }
    out.push_back(std::move(p));
  }
  return out;
}

void write_truth(const std::vector<PairTruth>& truth,
                 const std::filesystem::path& path) {
  LineWriter w(path, "radcorr-truth");
  auto& out = w.stream();
  out << "# pair id count (prev_index curr_index)*count\n";
  for (const PairTruth& p : truth) {
    out << "pair " << p.id << ' ' << p.pairs.size();
    for (const auto& [i, j] : p.pairs) out << ' ' << i << ' ' << j;
    out << '\n';
  }
  w.finish();
}

std::vector<PairTruth> read_truth(const std::filesystem::path& path,
                                  int expected_version) {
  RecordReader reader(path, "radcorr-truth", expected_version);
  std::vector<PairTruth> out;
  std::vector<std::string> tok;
  while (reader.next(tok)) {
    if (tok[0] != "pair" || tok.size() < 3) reader.fail("expected a pair record");
    PairTruth p;
    p.id = tok[1];
    const long long count = reader.integer(tok[2]);
    expect_count(reader, tok, 3, count, 2);
    for (long long i = 0; i < count; ++i) {
      const std::size_t at = 3 + 2 * static_cast<std::size_t>(i);
      p.pairs.emplace_back(static_cast<int>(reader.integer(tok[at])),
                           static_cast<int>(reader.integer(tok[at + 1])));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace radcorr
