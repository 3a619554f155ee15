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

// CSV schemas shared by the simulator, the analyses and external captures:
//   slot trace:  slot_index,wallclock_start_us,outcome,owner_or_colliders,duration_us
//   event trace: station,packet_id,arrival_us,departure_us
//   owners:      slot_index,owner_id

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "simulator.hpp"

namespace dcf {

void write_slot_trace_csv(std::ostream& out, const SlotTrace& trace);
SlotTrace read_slot_trace_csv(std::istream& in);

void write_event_trace_csv(std::ostream& out, std::span<const EventRecord> events);
std::vector<EventRecord> read_event_trace_csv(std::istream& in);

struct OwnedSuccess {
  std::int64_t slot_index = 0;
  std::int32_t owner = 0;
};

// Success-ownership sequence extracted from a slot trace.
std::vector<OwnedSuccess> success_sequence(const SlotTrace& trace);
void write_owner_csv(std::ostream& out, std::span<const OwnedSuccess> owners);
std::vector<OwnedSuccess> read_owner_csv(std::istream& in);

std::vector<std::int32_t> owners_only(std::span<const OwnedSuccess> seq);

// Shortest round-trip decimal representation.
std::string format_double(double v);

// File helpers; failures raise ErrorCode::io.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace dcf
