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

#ifndef WMBOUND_STATUS_H_
#define WMBOUND_STATUS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace wmbound {

enum class ErrorCode {
  kInfeasible,           // alpha > 1 - beta, or a rate outside [0, 1]
  kDomain,               // argument outside an operation's domain
  kUndetectable,         // empty detection region
  kDegenerate,           // full detection region or infinite reward
  kAbsoluteContinuity,   // G puts mass where F has none
  kCoverage,             // score missing for a state
  kConflict,             // duplicate score for a state
  kParse,                // malformed input text
  kBudgetExceeded,       // rejection sampler hit its proposal cap
  kNumeric,              // NaN or overflow in an iterative routine
};

std::string_view ErrorCodeName(ErrorCode code);

// Every library failure is reported as an Error carrying a code; the CLI maps
// codes onto process exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// 2 infeasible input, 3 coverage/parse error, 4 budget/non-convergence.
int ExitCodeFor(ErrorCode code);

}  // namespace wmbound

#endif  // WMBOUND_STATUS_H_
