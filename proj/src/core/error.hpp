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

#pragma once

#include <stdexcept>
#include <string>

namespace dcf {

// Stable error categories. The numeric values are mirrored by dcf_status in
// the C API header; keep both in sync.
enum class ErrorCode : int {
  invalid_argument = 1,
  solver_failure = 2,
  undefined_conditioning = 3,
  truncation = 4,
  horizon_not_found = 5,
  empty_clock = 6,
  alignment = 7,
  divergence = 8,
  instability = 9,
  malformed_trace = 10,
  not_enough_backlog = 11,
  undefined_index = 12,
  internal_consistency = 13,
  io = 14,
  parse = 15,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::invalid_argument, what);
}

}  // namespace dcf
