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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace radcorr {

/// Flat `key = value` configuration. Blank lines and `#` comments are
/// ignored; later duplicates override earlier ones.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(const std::string& text,
                              const std::string& source = "<text>");
  /// Throws Error(kNotFound) if the file cannot be opened.
  static KeyValueConfig load(const std::filesystem::path& path);
  static KeyValueConfig from_pairs(
      const std::vector<std::pair<std::string, std::string>>& pairs);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> find(const std::string& key) const;

  // Typed getters throw Error(kFormat) naming the key on a bad value; the
  // *_or variants return the fallback when the key is absent.
  std::string get_string(const std::string& key) const;
  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;

  std::string get_string_or(const std::string& key, std::string fallback) const;
  int get_int_or(const std::string& key, int fallback) const;
  double get_double_or(const std::string& key, double fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list_or(const std::string& key,
                                   std::vector<int> fallback) const;

  void set(const std::string& key, std::string value);
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::string source_ = "<config>";
  std::map<std::string, std::string> values_;
};

/// Shortest round-trip decimal form of `value` ("inf"/"-inf"/"nan" for
/// non-finite values).
std::string format_double(double value);
/// Parses the output of format_double and ordinary decimal/exponent forms.
/// Returns nullopt if the whole token is not a number.
std::optional<double> parse_double(const std::string& token);
std::optional<long long> parse_int(const std::string& token);

}  // namespace radcorr
