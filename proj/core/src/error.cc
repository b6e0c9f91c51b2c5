// Copyright 2026 The fairboost Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairboost/error.h"

namespace fairboost {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema: return "schema error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kLabel: return "label error";
    case ErrorCode::kSize: return "size error";
    case ErrorCode::kEmptySelection: return "empty selection";
    case ErrorCode::kNumeric: return "numeric error";
    case ErrorCode::kFit: return "fit error";
    case ErrorCode::kDegenerateClass: return "degenerate class";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kCalibration: return "calibration error";
    case ErrorCode::kDegenerateImportance: return "degenerate importance";
    case ErrorCode::kLogitOverflow: return "logit overflow";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kIncompatible: return "incompatible reports";
  }
  return "error";
}

}  // namespace fairboost
