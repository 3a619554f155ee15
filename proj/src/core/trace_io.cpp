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

#include "trace_io.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "error.hpp"

namespace dcf {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  fail(ErrorCode::parse, fmt::format("line {}: {}", line_no, what));
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, std::string_view name) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    malformed(line_no, fmt::format("field '{}' is not a valid number: '{}'", name, field));
  }
  return value;
}

// Reads lines, strips '\r', checks the header and skips blank lines.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string_view header) : in_(in) {
    std::string first;
    if (!std::getline(in_, first)) malformed(1, "missing header");
    strip(first);
    if (first != header) {
      malformed(1, fmt::format("expected header '{}', got '{}'", header, first));
    }
    line_no_ = 1;
  }

  bool next(std::vector<std::string_view>& fields, std::size_t expected) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      strip(line_);
      if (line_.empty()) continue;
      fields = split(line_, ',');
      if (fields.size() != expected) {
        malformed(line_no_, fmt::format("expected {} fields, got {}", expected, fields.size()));
      }
      return true;
    }
    return false;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  static void strip(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  }

  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

constexpr std::string_view kSlotHeader =
    "slot_index,wallclock_start_us,outcome,owner_or_colliders,duration_us";
constexpr std::string_view kEventHeader = "station,packet_id,arrival_us,departure_us";
constexpr std::string_view kOwnerHeader = "slot_index,owner_id";

}  // namespace

void write_slot_trace_csv(std::ostream& out, const SlotTrace& trace) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kSlotHeader);
  std::size_t index = 0;
  for (const SlotRecord& r : trace.records()) {
    switch (r.outcome) {
      case SlotOutcome::idle:
        fmt::format_to(std::back_inserter(buf), "{},{},idle,,{}\n", index, r.wallclock_start,
                       r.duration);
        break;
      case SlotOutcome::success:
        fmt::format_to(std::back_inserter(buf), "{},{},success,{},{}\n", index,
                       r.wallclock_start, r.owner, r.duration);
        break;
      case SlotOutcome::collision:
        fmt::format_to(std::back_inserter(buf), "{},{},collision,{},{}\n", index,
                       r.wallclock_start, fmt::join(trace.colliders(r), ";"), r.duration);
        break;
    }
    ++index;
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

SlotTrace read_slot_trace_csv(std::istream& in) {
  CsvReader reader(in, kSlotHeader);
  SlotTrace trace;
  std::vector<std::string_view> f;
  Micros expected_start = 0;
  std::vector<int> colliders;
  while (reader.next(f, 5)) {
    const std::size_t ln = reader.line_no();
    const auto index = parse_number<std::int64_t>(f[0], ln, "slot_index");
    const auto start = parse_number<Micros>(f[1], ln, "wallclock_start_us");
    const auto duration = parse_number<Micros>(f[4], ln, "duration_us");
    if (index != static_cast<std::int64_t>(trace.size())) {
      malformed(ln, fmt::format("slot_index {} out of sequence (expected {})", index, trace.size()));
    }
    if (start != expected_start) {
      malformed(ln, fmt::format("wallclock_start_us {} is not the prefix sum {}", start,
                                expected_start));
    }
    if (duration <= 0) malformed(ln, "duration_us must be > 0");
    if (f[2] == "idle") {
      trace.add_idle(start, duration);
    } else if (f[2] == "success") {
      trace.add_success(start, duration, parse_number<int>(f[3], ln, "owner_or_colliders"));
    } else if (f[2] == "collision") {
      colliders.clear();
      for (auto part : split(f[3], ';')) {
        colliders.push_back(parse_number<int>(part, ln, "owner_or_colliders"));
      }
      if (colliders.size() < 2) malformed(ln, "a collision needs at least two members");
      trace.add_collision(start, duration, colliders);
    } else {
      malformed(ln, fmt::format("unknown outcome '{}'", f[2]));
    }
    expected_start += duration;
  }
  return trace;
}

void write_event_trace_csv(std::ostream& out, std::span<const EventRecord> events) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kEventHeader);
  for (const auto& e : events) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{}\n", e.station, e.packet_id,
                   e.arrival_us, e.departure_us);
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<EventRecord> read_event_trace_csv(std::istream& in) {
  CsvReader reader(in, kEventHeader);
  std::vector<EventRecord> events;
  std::vector<std::string_view> f;
  while (reader.next(f, 4)) {
    const std::size_t ln = reader.line_no();
    events.push_back(EventRecord{parse_number<int>(f[0], ln, "station"),
                                 parse_number<std::int64_t>(f[1], ln, "packet_id"),
                                 parse_number<double>(f[2], ln, "arrival_us"),
                                 parse_number<double>(f[3], ln, "departure_us")});
  }
  return events;
}

std::vector<OwnedSuccess> success_sequence(const SlotTrace& trace) {
  std::vector<OwnedSuccess> out;
  std::int64_t index = 0;
  for (const auto& r : trace.records()) {
    if (r.outcome == SlotOutcome::success) out.push_back({index, r.owner});
    ++index;
  }
  return out;
}

void write_owner_csv(std::ostream& out, std::span<const OwnedSuccess> owners) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kOwnerHeader);
  for (const auto& o : owners) {
    fmt::format_to(std::back_inserter(buf), "{},{}\n", o.slot_index, o.owner);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<OwnedSuccess> read_owner_csv(std::istream& in) {
  CsvReader reader(in, kOwnerHeader);
  std::vector<OwnedSuccess> out;
  std::vector<std::string_view> f;
  while (reader.next(f, 2)) {
    const std::size_t ln = reader.line_no();
    out.push_back({parse_number<std::int64_t>(f[0], ln, "slot_index"),
                   parse_number<std::int32_t>(f[1], ln, "owner_id")});
  }
  return out;
}

std::vector<std::int32_t> owners_only(std::span<const OwnedSuccess> seq) {
  std::vector<std::int32_t> out;
  out.reserve(seq.size());
  for (const auto& o : seq) out.push_back(o.owner);
  return out;
}

std::string format_double(double v) { return fmt::format("{}", v); }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, fmt::format("cannot open '{}' for writing", path));
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) fail(ErrorCode::io, fmt::format("write to '{}' failed", path));
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace dcf
