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

#include <stdexcept>
#include <string>
#include <string_view>

namespace radcorr {

/// Coarse failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
  kInvalidArgument,
  kShapeMismatch,
  kNonFinite,
  kCapacity,        // cloud longer than the dataset-wide N
  kFormat,          // malformed file content
  kVersionMismatch,
  kNotFound,
  kNoLabels,        // empty cloud, nothing to label
  kDiverged,        // training produced a non-finite loss
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace radcorr
