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

// Slot-level DCF simulator with binary exponential backoff.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mac_model.hpp"

namespace dcf {

enum class TrafficMode { saturated, poisson };

struct Horizon {
  enum class Kind { slots, duration_us };
  Kind kind = Kind::slots;
  std::int64_t value = 1'000'000;

  static Horizon slots(std::int64_t n) { return {Kind::slots, n}; }
  static Horizon duration(Micros us) { return {Kind::duration_us, us}; }
};

struct SimConfig {
  std::vector<MacParams> stations;  // one entry per station
  TrafficMode mode = TrafficMode::saturated;
  std::vector<double> lambda_pps;  // poisson mode, packets/s per station
  Horizon horizon;
  std::uint64_t seed = 1;
  double payload_bits = 8000.0;

  bool record_slots = true;
  bool record_events = true;
  bool record_success_owners = false;

  static SimConfig homogeneous(const MacParams& params, int n, Horizon horizon,
                               std::uint64_t seed);

  int n() const { return static_cast<int>(stations.size()); }
  void validate() const;
};

enum class SlotOutcome : std::uint8_t { idle, success, collision };

struct SlotRecord {
  Micros wallclock_start = 0;
  std::int32_t duration = 0;
  std::int32_t owner = -1;  // success owner, -1 otherwise
  std::uint32_t colliders_begin = 0;
  std::uint16_t colliders_count = 0;
  SlotOutcome outcome = SlotOutcome::idle;
};

// Slot records in order; slot_index is the position in records(). Collision
// member sets live in a shared pool.
class SlotTrace {
 public:
  void add_idle(Micros start, Micros duration);
  void add_success(Micros start, Micros duration, int owner);
  void add_collision(Micros start, Micros duration, std::span<const int> colliders);

  std::span<const SlotRecord> records() const { return records_; }
  std::span<const std::int32_t> colliders(const SlotRecord& r) const {
    return std::span<const std::int32_t>(collider_pool_).subspan(r.colliders_begin,
                                                                 r.colliders_count);
  }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  void reserve(std::size_t n) { records_.reserve(n); }

  bool operator==(const SlotTrace&) const;

 private:
  std::vector<SlotRecord> records_;
  std::vector<std::int32_t> collider_pool_;
};

bool operator==(const SlotRecord& a, const SlotRecord& b);

struct EventRecord {
  int station = 0;
  std::int64_t packet_id = 0;
  double arrival_us = 0.0;
  double departure_us = 0.0;

  bool operator==(const EventRecord&) const = default;
};

struct StationCounters {
  std::int64_t attempts = 0;
  std::int64_t successes = 0;
  std::int64_t collisions = 0;  // attempts that collided
  std::int64_t drops = 0;
  std::int64_t arrivals = 0;
  std::int64_t queue_remainder = 0;
  Micros success_airtime = 0;

  bool operator==(const StationCounters&) const = default;
};

struct SimResult {
  SlotTrace slots;
  std::vector<EventRecord> events;
  std::vector<std::int32_t> success_owners;
  std::vector<StationCounters> stations;
  std::int64_t total_slots = 0;
  std::int64_t idle_slots = 0;
  std::int64_t success_slots = 0;
  std::int64_t collision_slots = 0;
  Micros total_time_us = 0;
  double payload_bits = 0.0;

  double attempt_frequency(int station) const;
  double collision_probability(int station) const;
  double aggregate_collision_probability() const;
  double throughput_bps(int station) const;
  double total_throughput_bps() const;
};

SimResult run(const SimConfig& config);

using Statistic = std::function<double(const SimResult&)>;

// Named reducers: total_throughput_bps, station0_throughput_bps,
// collision_probability, attempt_frequency, success_fraction.
Statistic named_statistic(std::string_view name);

// Runs reps simulations with seeds config.seed + r; results are indexed by
// replication regardless of how many worker threads are used.
std::vector<double> replicate(const SimConfig& config, int reps, const Statistic& statistic,
                              int jobs = 1);

// Same, keeping every result; the caller controls what is recorded.
std::vector<SimResult> replicate_runs(const SimConfig& config, int reps, int jobs = 1);

// Runs fn(r) for r in [0, count) over up to jobs threads.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace dcf
