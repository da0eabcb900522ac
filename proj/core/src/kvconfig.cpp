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
#include "radcorr/kvconfig.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "radcorr/error.hpp"

namespace radcorr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double value) {
  if (value != value) return "nan";
  if (value == std::numeric_limits<double>::infinity()) return "inf";
  if (value == -std::numeric_limits<double>::infinity()) return "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::optional<double> parse_double(const std::string& token) {
  if (token == "inf" || token == "+inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

std::optional<long long> parse_int(const std::string& token) {
  long long value = 0;
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), last, value);
  if (ec != std::errc() || ptr != last || token.empty()) return std::nullopt;
  return value;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text,
                                     const std::string& source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kFormat, source + ":" + std::to_string(line_no) +
                                          ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorKind::kFormat,
                  source + ":" + std::to_string(line_no) + ": empty key");
    }
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kNotFound, "cannot open config '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

KeyValueConfig KeyValueConfig::from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  KeyValueConfig cfg;
  for (const auto& [k, v] : pairs) cfg.values_[k] = v;
  return cfg;
}

std::optional<std::string> KeyValueConfig::find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto v = find(key);
  if (!v) throw Error(ErrorKind::kFormat, source_ + ": missing key '" + key + "'");
  return *v;
}

int KeyValueConfig::get_int(const std::string& key) const {
  const std::string raw = get_string(key);
  auto v = parse_int(raw);
  if (!v || *v < std::numeric_limits<int>::min() ||
      *v > std::numeric_limits<int>::max()) {
    throw Error(ErrorKind::kFormat,
                source_ + ": '" + key + "' is not an integer: '" + raw + "'");
  }
  return static_cast<int>(*v);
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  auto v = parse_double(raw);
  if (!v) {
    throw Error(ErrorKind::kFormat,
                source_ + ": '" + key + "' is not a number: '" + raw + "'");
  }
  return *v;
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  const std::string raw = get_string(key);
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw Error(ErrorKind::kFormat,
              source_ + ": '" + key + "' is not a boolean: '" + raw + "'");
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<int> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    auto v = parse_int(item);
    if (!v) {
      throw Error(ErrorKind::kFormat, source_ + ": '" + key +
                                          "' has a non-integer item '" + item + "'");
    }
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

std::string KeyValueConfig::get_string_or(const std::string& key,
                                          std::string fallback) const {
  return has(key) ? get_string(key) : fallback;
}
int KeyValueConfig::get_int_or(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}
double KeyValueConfig::get_double_or(const std::string& key,
                                     double fallback) const {
  return has(key) ? get_double(key) : fallback;
}
bool KeyValueConfig::get_bool_or(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}
std::vector<int> KeyValueConfig::get_int_list_or(
    const std::string& key, std::vector<int> fallback) const {
  return has(key) ? get_int_list(key) : fallback;
}

void KeyValueConfig::set(const std::string& key, std::string value) {
  values_[key] = std::move(value);
}

}  // namespace radcorr
