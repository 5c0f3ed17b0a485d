// Copyright 2026 The wmbound Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wmbound/status.h"

namespace wmbound {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kUndetectable: return "undetectable";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kAbsoluteContinuity: return "absolute-continuity";
    case ErrorCode::kCoverage: return "coverage";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kBudgetExceeded: return "budget-exceeded";
    case ErrorCode::kNumeric: return "numeric";
  }
  return "unknown";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasible:
    case ErrorCode::kDomain:
    case ErrorCode::kUndetectable:
    case ErrorCode::kDegenerate:
    case ErrorCode::kAbsoluteContinuity:
      return 2;
    case ErrorCode::kCoverage:
    case ErrorCode::kConflict:
    case ErrorCode::kParse:
      return 3;
    case ErrorCode::kBudgetExceeded:
    case ErrorCode::kNumeric:
      return 4;
  }
  return 1;
}

}  // namespace wmbound
