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

// JSON run configuration. The simulator part mirrors SimConfig:
//
//   {
//     "scenario": "n10",
//     "n": 10,
//     "mac": { "cw_min": 32, ... },          // shared MacParams
//     "stations": [ { "cw_min": 16 }, ... ], // optional per-station overrides
//     "mode": "saturated" | "poisson",
//     "lambda_pps": 120 | [120, 80, ...],
//     "horizon": { "slots": 1000000 } | { "duration_us": 5e7 },
//     "seed": 42,
//     "payload_bits": 8000,
//     "record": { "slots": true, "events": true, "success_owners": false },
//     "analysis": { ... },                   // consumed by the CLI
//     "output_dir": "out"
//   }

#pragma once

#include <string>
#include <string_view>

#include <json.hpp>
#include "mac_model.hpp"
#include "simulator.hpp"

namespace dcf {

// Parses JSON text; syntax errors carry line and column.
nlohmann::json parse_json_text(std::string_view text);

MacParams mac_params_from_json(const nlohmann::json& j, const MacParams& base,
                               const std::string& path);
nlohmann::json to_json(const MacParams& p);

// Field errors name the offending key path (ErrorCode::parse).
SimConfig sim_config_from_json(const nlohmann::json& doc);

}  // namespace dcf
