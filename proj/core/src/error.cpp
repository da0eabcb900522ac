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
#include "radcorr/error.hpp"

namespace radcorr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kShapeMismatch: return "shape mismatch";
    case ErrorKind::kNonFinite: return "non-finite value";
    case ErrorKind::kCapacity: return "capacity exceeded";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kVersionMismatch: return "version mismatch";
    case ErrorKind::kNotFound: return "not found";
    case ErrorKind::kNoLabels: return "no labels derivable";
    case ErrorKind::kDiverged: return "training diverged";
  }
  return "unknown";
}

}  // namespace radcorr
