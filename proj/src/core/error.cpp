// Copyright 2026 The dcfcalc Authors
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

#include "error.hpp"

namespace dcf {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::solver_failure: return "solver failure";
    case ErrorCode::undefined_conditioning: return "undefined conditioning";
    case ErrorCode::truncation: return "truncation";
    case ErrorCode::horizon_not_found: return "horizon not found";
    case ErrorCode::empty_clock: return "empty clock";
    case ErrorCode::alignment: return "alignment";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::instability: return "instability";
    case ErrorCode::malformed_trace: return "malformed trace";
    case ErrorCode::not_enough_backlog: return "not enough backlog";
    case ErrorCode::undefined_index: return "undefined index";
    case ErrorCode::internal_consistency: return "internal consistency";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

}  // namespace dcf
