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

// Passive fair-rate estimation from one station's own arrival and departure
// timestamps. Only inter-departure gaps inside a busy period are samples of
// the backlogged service process; gaps across an empty queue are dropped.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "simulator.hpp"

namespace dcf {

struct BusyPeriod {
  double start_us = 0.0;
  double end_us = 0.0;
  std::size_t departures = 0;
  std::size_t first_event = 0;  // index of the first record in the period
};

// Records must be one station's packets in arrival order; departures must be
// FIFO. Ties between an arrival and a departure keep the period open.
std::vector<BusyPeriod> detect_busy_periods(std::span<const EventRecord> events);

// Filters a multi-station trace down to one station, in packet order.
std::vector<EventRecord> station_events(std::span<const EventRecord> events, int station);

struct RateEstimate {
  double rate_pps = 0.0;
  double stderr_pps = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::size_t samples = 0;
  double busy_fraction = 0.0;
  double lag1_autocorrelation = 0.0;  // diagnostic only, not corrected for
  double ratio_rate_pps = 0.0;        // departures / busy time of qualifying periods
};

inline constexpr std::size_t kDefaultMinPeriodDepartures = 2;

RateEstimate estimate_fair_rate(std::span<const EventRecord> events,
                                std::size_t min_period_departures = kDefaultMinPeriodDepartures);

struct ConvergenceRow {
  std::size_t requested = 0;
  std::size_t used = 0;
  bool truncated = false;  // fewer samples available than requested
  double rate_pps = 0.0;
  double ci_width_pps = 0.0;
  double ratio_rate_pps = 0.0;
};

// Estimates from the first m inter-departure samples for each requested m.
std::vector<ConvergenceRow> convergence_report(
    std::span<const EventRecord> events, std::span<const std::size_t> sample_counts,
    std::size_t min_period_departures = kDefaultMinPeriodDepartures);

}  // namespace dcf
