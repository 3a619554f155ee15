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

// GPS fluid reference and the DCF clock: the tagged station's departure
// instants written recursively as T_j = T_{j-1} + I_j, with per-packet error
// terms e_j = I_j - fair_increment.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mac_model.hpp"
#include "simulator.hpp"

namespace dcf {

struct PacketArrival {
  double time_us = 0.0;
  double size_bits = 0.0;
};

// One interval of constant backlogged set; delivered_bits is per station.
struct GpsSegment {
  double start_us = 0.0;
  double end_us = 0.0;
  std::vector<double> delivered_bits;
};

struct GpsReference {
  std::vector<double> weights;
  double capacity_bps = 0.0;
  std::vector<std::vector<double>> finish_times;  // per station, per packet (us)
  std::vector<GpsSegment> segments;               // only when requested
};

inline constexpr double kGpsBreakpointTol = 1e-9;  // us

GpsReference gps_finish_times(const std::vector<std::vector<PacketArrival>>& arrivals,
                              std::span<const double> weights, double capacity_bps,
                              bool record_segments = false);

struct ClockTrace {
  std::vector<Micros> departures;  // T_j, j = 1..J
  std::vector<Micros> increments;  // I_j, with T_0 = 0
  double fair_increment = 0.0;
  std::vector<double> errors;      // e_j = I_j - fair_increment

  std::size_t size() const { return departures.size(); }
};

// I_j sums the slot durations after the (j-1)-th tagged success up to and
// including the j-th. The stretch before the first tagged success is part of
// I_1, so callers may want to discard it as warm-up.
ClockTrace dcf_clock(std::span<const SlotRecord> slots, int tagged, double fair_increment);

ClockTrace clock_from_departures(std::span<const Micros> departures, double fair_increment);

struct DeviationSummary {
  std::size_t packets = 0;
  double mean = 0.0;
  double p05 = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double max_abs = 0.0;
};

// deviation_j = T_j - gps finish of the tagged station's j-th packet. The GPS
// reference must cover at least the clock's packet range.
std::vector<double> clock_deviations(const ClockTrace& clock, const GpsReference& gps,
                                     int tagged);
DeviationSummary clock_vs_gps(const ClockTrace& clock, const GpsReference& gps, int tagged);

// Saturated GPS reference matched to a simulated scenario: every station
// holds `packets` packets of payload_bits at t = 0, equal weights, capacity
// = n x per-station throughput.
GpsReference matched_saturated_gps(int n, std::size_t packets, double payload_bits,
                                   double per_station_bps);

}  // namespace dcf
