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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "error.hpp"
#include "estimator.hpp"
#include "mac_model.hpp"
#include "simulator.hpp"

using namespace dcf;

namespace {

std::vector<EventRecord> make_events(const std::vector<double>& arr, const std::vector<double>& dep) {
  std::vector<EventRecord> ev;
  for (std::size_t i = 0; i < arr.size(); ++i)
    ev.push_back(EventRecord{0, static_cast<std::int64_t>(i), arr[i], dep[i]});
  return ev;
}

// Backlogged bursts of `burst` packets departing every `gap` us, separated
// by `idle` us of empty queue.
std::vector<EventRecord> bursts(int count, int burst, double gap, double idle) {
  std::vector<double> arr, dep;
  double t = 0.0;
  for (int b = 0; b < count; ++b) {
    const double start = t;
    for (int k = 0; k < burst; ++k) {
      arr.push_back(start);
      t += gap;
      dep.push_back(t);
    }
    t += idle;
  }
  return make_events(arr, dep);
}

}  // namespace

TEST_CASE("busy periods split when the queue empties") {
  const auto p = detect_busy_periods(make_events({0, 1000, 2000}, {500, 1500, 2500}));
  REQUIRE(p.size() == 3);
  CHECK(p[0].start_us == 0.0);
  CHECK(p[0].end_us == 500.0);
  CHECK(p[1].start_us == 1000.0);
  CHECK(p[2].end_us == 2500.0);
  const auto q = detect_busy_periods(make_events({0, 100}, {500, 900}));
  REQUIRE(q.size() == 1);
  CHECK(q[0].start_us == 0.0);
  CHECK(q[0].end_us == 900.0);
  CHECK(q[0].departures == 2);
  // An arrival exactly at the previous departure continues the period.
  CHECK(detect_busy_periods(make_events({0, 500}, {500, 900})).size() == 1);
}

TEST_CASE("saturated station forms one busy period") {
  auto cfg = SimConfig::homogeneous(MacParams{}, 3, Horizon::slots(20'000), 6);
  const auto res = run(cfg);
  const auto ev = station_events(res.events, 1);
  const auto p = detect_busy_periods(ev);
  REQUIRE(p.size() == 1);
  CHECK(p[0].departures == ev.size());
}

TEST_CASE("malformed traces are rejected") {
  for (const auto& ev : {make_events({0, 100}, {500, 400}), make_events({100, 0}, {500, 600}),
                         make_events({0}, {-1})}) {
    try {
      detect_busy_periods(ev);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::malformed_trace);
    }
  }
}

TEST_CASE("deterministic departures") {
  const auto ev = bursts(5, 10, 520.0, 3000.0);
  const auto est = estimate_fair_rate(ev);
  CHECK(est.rate_pps == doctest::Approx(1e6 / 520.0));
  CHECK(est.stderr_pps == 0.0);
  CHECK(est.samples == 45u);
  CHECK(est.ratio_rate_pps == doctest::Approx(1e6 / 520.0));
  std::vector<std::size_t> ms{2, 10, 45, 1000};
  const auto rows = convergence_report(ev, ms);
  for (const auto& r : rows) CHECK(r.ci_width_pps == 0.0);
  CHECK_FALSE(rows[2].truncated);
  CHECK(rows[3].truncated);
  CHECK(rows[3].used == 45u);
}

TEST_CASE("idle gaps do not move the estimate") {
  const auto a = estimate_fair_rate(bursts(20, 7, 800.0, 100.0));
  const auto b = estimate_fair_rate(bursts(20, 7, 800.0, 1e7));
  CHECK(a.rate_pps == doctest::Approx(b.rate_pps).epsilon(1e-12));
  CHECK(a.busy_fraction > b.busy_fraction);
}

TEST_CASE("short periods are excluded") {
  const auto ev = bursts(10, 2, 500.0, 1000.0);
  CHECK(estimate_fair_rate(ev, 2).samples == 10u);
  try {
    estimate_fair_rate(ev, 3);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_enough_backlog);
  }
}

TEST_CASE("empty trace") {
  std::vector<EventRecord> none;
  try {
    estimate_fair_rate(none);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_enough_backlog);
  }
}

TEST_CASE("simulated saturated rate") {
  MacParams p;
  const int n = 10;
  auto cfg = SimConfig::homogeneous(p, n, Horizon::slots(3'900'000), 77);
  cfg.record_slots = false;
  const auto res = run(cfg);
  const auto ev = station_events(res.events, 0);
  REQUIRE(ev.size() >= 95'000u);
  const auto est = estimate_fair_rate(ev);
  const double truth = saturation_throughput(homogeneous_slot_distribution(p, n), 8000)[0] / 8000;
  CHECK(std::abs(est.rate_pps / truth - 1.0) < 0.02);
  CHECK(std::abs(est.ratio_rate_pps / truth - 1.0) < 0.02);
  CHECK(est.busy_fraction == doctest::Approx(1.0));
  std::vector<std::size_t> ms{100, 1000, 10'000, 90'000};
  const auto rows = convergence_report(ev, ms);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].ci_width_pps < rows[i - 1].ci_width_pps);
}
