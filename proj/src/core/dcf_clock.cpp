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

#include "dcf_clock.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "error.hpp"
#include "stats.hpp"

namespace dcf {

GpsReference gps_finish_times(const std::vector<std::vector<PacketArrival>>& arrivals,
                              std::span<const double> weights, double capacity_bps,
                              bool record_segments) {
  const std::size_t n = arrivals.size();
  require(n >= 1, "GPS needs at least one station");
  require(weights.size() == n, "one weight per station is required");
  require(capacity_bps > 0.0, "GPS capacity must be > 0");
  for (double w : weights) require(w > 0.0, "GPS weights must be > 0");
  for (const auto& a : arrivals) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      require(a[j].size_bits > 0.0, "packet sizes must be > 0");
      require(j == 0 || a[j].time_us >= a[j - 1].time_us, "arrivals must be time-ordered");
    }
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double capacity_per_us = capacity_bps * 1e-6;

  GpsReference ref;
  ref.weights.assign(weights.begin(), weights.end());
  ref.capacity_bps = capacity_bps;
  ref.finish_times.resize(n);
  for (std::size_t i = 0; i < n; ++i) ref.finish_times[i].reserve(arrivals[i].size());

  std::vector<std::size_t> admitted(n, 0);  // arrivals admitted so far
  std::vector<std::size_t> finished(n, 0);  // packets completed so far
  std::vector<double> remaining(n, 0.0);    // head packet's residual bits

  auto next_arrival_time = [&] {
    double t = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (admitted[i] < arrivals[i].size()) t = std::min(t, arrivals[i][admitted[i]].time_us);
    }
    return t;
  };
  auto backlogged = [&](std::size_t i) { return finished[i] < admitted[i]; };

  double now = next_arrival_time();
  while (std::isfinite(now)) {
    for (std::size_t i = 0; i < n; ++i) {
      while (admitted[i] < arrivals[i].size() &&
             arrivals[i][admitted[i]].time_us <= now + kGpsBreakpointTol) {
        if (!backlogged(i)) remaining[i] = arrivals[i][admitted[i]].size_bits;
        ++admitted[i];
      }
    }

    double phi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (backlogged(i)) phi += weights[i];
    }
    const double t_arrival = next_arrival_time();
    if (phi == 0.0) {
      now = t_arrival;
      continue;
    }

    double dt = t_arrival - now;
    for (std::size_t i = 0; i < n; ++i) {
      if (backlogged(i)) {
        dt = std::min(dt, remaining[i] / (capacity_per_us * weights[i] / phi));
      }
    }
    const double t_next = now + dt;

    GpsSegment seg;
    if (record_segments) {
      seg.start_us = now;
      seg.end_us = t_next;
      seg.delivered_bits.assign(n, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!backlogged(i)) continue;
      const double rate = capacity_per_us * weights[i] / phi;
      const double served = rate * dt;
      if (record_segments) seg.delivered_bits[i] = served;
      // Completion within the breakpoint tolerance counts as completion now.
      if (remaining[i] / rate <= dt + kGpsBreakpointTol) {
        ref.finish_times[i].push_back(t_next);
        ++finished[i];
        remaining[i] = backlogged(i) ? arrivals[i][finished[i]].size_bits : 0.0;
      } else {
        remaining[i] -= served;
      }
    }
    if (record_segments) ref.segments.push_back(std::move(seg));
    now = t_next;

    bool any_backlog = false;
    for (std::size_t i = 0; i < n; ++i) any_backlog = any_backlog || backlogged(i);
    if (!any_backlog) now = next_arrival_time();
  }
  return ref;
}

ClockTrace dcf_clock(std::span<const SlotRecord> slots, int tagged, double fair_increment) {
  require(!slots.empty(), "slot trace is empty");
  ClockTrace clock;
  clock.fair_increment = fair_increment;
  Micros pending = 0;
  Micros t = 0;
  for (const SlotRecord& s : slots) {
    pending += s.duration;
    if (s.outcome == SlotOutcome::success && s.owner == tagged) {
      t += pending;
      clock.departures.push_back(t);
      clock.increments.push_back(pending);
      clock.errors.push_back(static_cast<double>(pending) - fair_increment);
      pending = 0;
    }
  }
  if (clock.departures.empty()) {
    fail(ErrorCode::empty_clock,
         fmt::format("station {} never succeeds in the {}-slot trace", tagged, slots.size()));
  }
  return clock;
}

ClockTrace clock_from_departures(std::span<const Micros> departures, double fair_increment) {
  require(!departures.empty(), "departure list is empty");
  ClockTrace clock;
  clock.fair_increment = fair_increment;
  Micros prev = 0;
  for (Micros t : departures) {
    require(t >= prev, "departures must be non-decreasing");
    clock.departures.push_back(t);
    clock.increments.push_back(t - prev);
    clock.errors.push_back(static_cast<double>(t - prev) - fair_increment);
    prev = t;
  }
  return clock;
}

std::vector<double> clock_deviations(const ClockTrace& clock, const GpsReference& gps,
                                     int tagged) {
  require(tagged >= 0 && static_cast<std::size_t>(tagged) < gps.finish_times.size(),
          fmt::format("tagged station {} not in GPS reference", tagged));
  const auto& fin = gps.finish_times[static_cast<std::size_t>(tagged)];
  if (clock.size() == 0 || fin.size() < clock.size()) {
    fail(ErrorCode::alignment,
         fmt::format("clock has {} packets but GPS reference covers {}", clock.size(),
                     fin.size()));
  }
  std::vector<double> dev(clock.size());
  for (std::size_t j = 0; j < clock.size(); ++j) {
    dev[j] = static_cast<double>(clock.departures[j]) - fin[j];
  }
  return dev;
}

DeviationSummary clock_vs_gps(const ClockTrace& clock, const GpsReference& gps, int tagged) {
  const std::vector<double> dev = clock_deviations(clock, gps, tagged);
  DeviationSummary s;
  s.packets = dev.size();
  s.mean = stats::mean(dev);
  s.p05 = stats::quantile(dev, 0.05);
  s.p50 = stats::quantile(dev, 0.50);
  s.p95 = stats::quantile(dev, 0.95);
  for (double d : dev) s.max_abs = std::max(s.max_abs, std::abs(d));
  return s;
}

GpsReference matched_saturated_gps(int n, std::size_t packets, double payload_bits,
                                   double per_station_bps) {
  require(n >= 1 && packets >= 1, "matched GPS needs n >= 1 and packets >= 1");
  std::vector<std::vector<PacketArrival>> arrivals(
      static_cast<std::size_t>(n),
      std::vector<PacketArrival>(packets, PacketArrival{0.0, payload_bits}));
  const std::vector<double> weights(static_cast<std::size_t>(n), 1.0);
  return gps_finish_times(arrivals, weights, n * per_station_bps);
}

}  // namespace dcf
