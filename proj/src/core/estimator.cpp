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

#include "estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "error.hpp"
#include "stats.hpp"

namespace dcf {

std::vector<BusyPeriod> detect_busy_periods(std::span<const EventRecord> events) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!(e.departure_us >= e.arrival_us)) {
      fail(ErrorCode::malformed_trace,
           fmt::format("packet {} departs at {} before arriving at {}", e.packet_id,
                       e.departure_us, e.arrival_us));
    }
    if (i > 0 && (e.arrival_us < events[i - 1].arrival_us ||
                  e.departure_us < events[i - 1].departure_us)) {
      fail(ErrorCode::malformed_trace,
           fmt::format("FIFO violation at packet {} (record {})", e.packet_id, i));
    }
  }

  // With FIFO order, arrival i+1 finds a busy queue iff it arrives no later
  // than departure i; otherwise the queue drains at departure i.
  std::vector<BusyPeriod> periods;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i == 0 || events[i].arrival_us > events[i - 1].departure_us) {
      periods.push_back(BusyPeriod{events[i].arrival_us, events[i].departure_us, 0, i});
    }
    auto& p = periods.back();
    p.end_us = events[i].departure_us;
    ++p.departures;
  }
  return periods;
}

std::vector<EventRecord> station_events(std::span<const EventRecord> events, int station) {
  std::vector<EventRecord> out;
  for (const auto& e : events) {
    if (e.station == station) out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.packet_id < b.packet_id; });
  return out;
}

namespace {

struct Samples {
  std::vector<double> gaps;
  // For each gap: departures and busy time accumulated over qualifying
  // periods up to the gap's closing departure.
  std::vector<std::size_t> cum_departures;
  std::vector<double> cum_busy;
  // Per qualifying period: (departures, busy time), in order.
  std::vector<std::pair<std::size_t, double>> periods;
  double busy_fraction = 0.0;
};

Samples collect_samples(std::span<const EventRecord> events, std::size_t min_period_departures) {
  Samples s;
  const std::vector<BusyPeriod> periods = detect_busy_periods(events);
  double busy = 0.0;
  std::size_t done_departures = 0;
  double done_busy = 0.0;
  for (const auto& p : periods) {
    busy += p.end_us - p.start_us;
    if (p.departures < std::max<std::size_t>(min_period_departures, 2)) continue;
    for (std::size_t k = 1; k < p.departures; ++k) {
      const std::size_t i = p.first_event + k;
      s.gaps.push_back(events[i].departure_us - events[i - 1].departure_us);
      s.cum_departures.push_back(done_departures + k + 1);
      s.cum_busy.push_back(done_busy + (events[i].departure_us - p.start_us));
    }
    done_departures += p.departures;
    done_busy += p.end_us - p.start_us;
    s.periods.emplace_back(p.departures, p.end_us - p.start_us);
  }
  if (!events.empty()) {
    const double span = events.back().departure_us - events.front().arrival_us;
    s.busy_fraction = span > 0.0 ? busy / span : 0.0;
  }
  return s;
}

void fill_estimate(std::span<const double> gaps, RateEstimate& est) {
  const double m = stats::mean(gaps);
  est.samples = gaps.size();
  est.rate_pps = 1e6 / m;
  // Delta method: se(1/mean) = se(mean) / mean^2.
  const double se_mean = std::sqrt(stats::variance(gaps) / static_cast<double>(gaps.size()));
  est.stderr_pps = 1e6 * se_mean / (m * m);
  est.ci95_low = est.rate_pps - 1.96 * est.stderr_pps;
  est.ci95_high = est.rate_pps + 1.96 * est.stderr_pps;
}

[[noreturn]] void not_enough_backlog(std::size_t samples, double busy_fraction,
                                     std::size_t min_period_departures) {
  fail(ErrorCode::not_enough_backlog,
       fmt::format("not enough backlog: {} inter-departure samples from busy periods with >= {} "
                   "departures (busy_fraction={:.4f})",
                   samples, min_period_departures, busy_fraction));
}

}  // namespace

RateEstimate estimate_fair_rate(std::span<const EventRecord> events,
                                std::size_t min_period_departures) {
  const Samples s = collect_samples(events, min_period_departures);
  if (s.gaps.empty()) not_enough_backlog(0, s.busy_fraction, min_period_departures);
  RateEstimate est;
  fill_estimate(s.gaps, est);
  est.busy_fraction = s.busy_fraction;
  est.lag1_autocorrelation = stats::lag1_autocorrelation(s.gaps);
  std::size_t deps = 0;
  double busy = 0.0;
  for (const auto& [d, t] : s.periods) {
    deps += d;
    busy += t;
  }
  est.ratio_rate_pps = busy > 0.0 ? 1e6 * static_cast<double>(deps) / busy : 0.0;
  return est;
}

std::vector<ConvergenceRow> convergence_report(std::span<const EventRecord> events,
                                               std::span<const std::size_t> sample_counts,
                                               std::size_t min_period_departures) {
  const Samples s = collect_samples(events, min_period_departures);
  if (s.gaps.empty()) not_enough_backlog(0, s.busy_fraction, min_period_departures);
  std::vector<ConvergenceRow> rows;
  rows.reserve(sample_counts.size());
  for (std::size_t m : sample_counts) {
    require(m >= 1, "sample counts must be >= 1");
    ConvergenceRow row;
    row.requested = m;
    row.used = std::min(m, s.gaps.size());
    row.truncated = m > s.gaps.size();
    const auto prefix = std::span<const double>(s.gaps).first(row.used);
    RateEstimate est;
    fill_estimate(prefix, est);
    row.rate_pps = est.rate_pps;
    row.ci_width_pps = est.ci95_high - est.ci95_low;
    const double busy = s.cum_busy[row.used - 1];
    row.ratio_rate_pps =
        busy > 0.0 ? 1e6 * static_cast<double>(s.cum_departures[row.used - 1]) / busy : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dcf
