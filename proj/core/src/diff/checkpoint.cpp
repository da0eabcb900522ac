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
#include "radcorr/diff/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "radcorr/error.hpp"

namespace radcorr::diff {

namespace {

constexpr const char* kMagic = "radcorr-checkpoint";

template <typename T>
void write_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = std::bit_cast<U>(value);
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename T>
T read_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw Error(ErrorKind::kFormat, "checkpoint: truncated payload");
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bits |= static_cast<U>(bytes[i]) << (8 * i);
  }
  return std::bit_cast<T>(bits);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::string& Checkpoint::header_value(const std::string& key) const {
  for (const auto& [k, v] : header) {
    if (k == key) return v;
  }
  throw Error(ErrorKind::kFormat, "checkpoint: header has no '" + key + "'");
}

Checkpoint make_checkpoint(
    const ParamStore& store,
    std::vector<std::pair<std::string, std::string>> header) {
  Checkpoint ckpt;
  ckpt.header = std::move(header);
  for (const std::string& name : store.names()) {
    ckpt.arrays.emplace_back(name, store.get(name).value());
  }
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path,
                      const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kNotFound,
                "checkpoint: cannot open '" + path.string() + "' for writing");
  }
  out << kMagic << '\n';
  out << "format_version = " << checkpoint.format_version << '\n';
  for (const auto& [k, v] : checkpoint.header) {
    if (k.find('\n') != std::string::npos || v.find('\n') != std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument,
                  "checkpoint: header entries must be single-line");
    }
    out << k << " = " << v << '\n';
  }
  out << "arrays = " << checkpoint.arrays.size() << '\n';
  out << "end_header\n";
  for (const auto& [name, m] : checkpoint.arrays) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) write_le<double>(out, m(r, c));
    }
  }
  if (!out) {
    throw Error(ErrorKind::kFormat, "checkpoint: write failed for '" +
                                        path.string() + "'");
  }
}

Checkpoint read_checkpoint(const std::filesystem::path& path,
                           int expected_version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kNotFound,
                "checkpoint: cannot open '" + path.string() + "'");
  }
  std::string line;
  if (!std::getline(in, line) || trim(line) != kMagic) {
    throw Error(ErrorKind::kFormat,
                "checkpoint: '" + path.string() + "' is not a checkpoint");
  }
  Checkpoint ckpt;
  bool have_version = false;
  std::size_t array_count = 0;
  bool ended = false;
  while (std::getline(in, line)) {
    if (trim(line) == "end_header") {
      ended = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kFormat, "checkpoint: bad header line '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "format_version") {
      ckpt.format_version = std::stoi(value);
      have_version = true;
      if (ckpt.format_version != expected_version) {
        throw Error(ErrorKind::kVersionMismatch,
                    "checkpoint: format_version " + value + ", expected " +
                        std::to_string(expected_version));
      }
    } else if (key == "arrays") {
      array_count = std::stoul(value);
    } else {
      ckpt.header.emplace_back(key, value);
    }
  }
  if (!ended || !have_version) {
    throw Error(ErrorKind::kFormat, "checkpoint: incomplete header");
  }
  for (std::size_t a = 0; a < array_count; ++a) {
    const auto name_len = read_le<std::uint32_t>(in);
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) {
      throw Error(ErrorKind::kFormat, "checkpoint: truncated array name");
    }
    const auto rows = read_le<std::uint64_t>(in);
    const auto cols = read_le<std::uint64_t>(in);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = read_le<double>(in);
    }
    ckpt.arrays.emplace_back(std::move(name), std::move(m));
  }
  return ckpt;
}

void load_parameters(ParamStore& store, const Checkpoint& checkpoint) {
  for (const std::string& name : store.names()) {
    const Matrix* found = nullptr;
    for (const auto& [n, m] : checkpoint.arrays) {
      if (n == name) {
        found = &m;
        break;
      }
    }
    if (found == nullptr) {
      throw Error(ErrorKind::kShapeMismatch,
                  "checkpoint: missing parameter '" + name + "'");
    }
    Tensor& p = store.get(name);
    if (found->rows() != p.rows() || found->cols() != p.cols()) {
      std::ostringstream msg;
      msg << "checkpoint: parameter '" << name << "' is " << found->rows()
          << "x" << found->cols() << ", model expects " << p.rows() << "x"
          << p.cols();
      throw Error(ErrorKind::kShapeMismatch, msg.str());
    }
    p.mutable_value() = *found;
  }
}

}  // namespace radcorr::diff
