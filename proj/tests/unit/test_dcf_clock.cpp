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
#include <numeric>
#include <random>
#include <vector>

#include "dcf_clock.hpp"
#include "error.hpp"
#include "mac_model.hpp"
#include "netcalc.hpp"
#include "simulator.hpp"
#include "stats.hpp"

using namespace dcf;

namespace {

std::vector<std::vector<PacketArrival>> saturated(int stations, int packets, double bits) {
  return std::vector<std::vector<PacketArrival>>(
      static_cast<std::size_t>(stations),
      std::vector<PacketArrival>(static_cast<std::size_t>(packets), PacketArrival{0.0, bits}));
}

}  // namespace

TEST_CASE("GPS equal share") {
  std::vector<double> w{1.0, 1.0};
  // 1000-bit packets at 1 Mbit/s: one packet per ms.
  const auto g = gps_finish_times(saturated(2, 5, 1000.0), w, 1e6);
  for (int k = 1; k <= 5; ++k) {
    CHECK(g.finish_times[0][k - 1] == doctest::Approx(2000.0 * k));
    CHECK(g.finish_times[1][k - 1] == doctest::Approx(2000.0 * k));
  }
}

TEST_CASE("GPS single station") {
  std::vector<double> w{3.0};
  const auto g = gps_finish_times(saturated(1, 4, 1000.0), w, 1e6);
  for (int k = 1; k <= 4; ++k) CHECK(g.finish_times[0][k - 1] == doctest::Approx(1000.0 * k));
}

TEST_CASE("GPS weighted shares") {
  std::vector<double> w{2.0, 1.0};
  const auto g = gps_finish_times(saturated(2, 4, 1000.0), w, 1e6);
  // Both stay backlogged through t = 3 ms: spacings 1.5 ms and 3 ms.
  CHECK(g.finish_times[0][0] == doctest::Approx(1500.0));
  CHECK(g.finish_times[0][1] == doctest::Approx(3000.0));
  CHECK(g.finish_times[1][0] == doctest::Approx(3000.0));
  // Station 0 drains at 6 ms, then station 1 gets the full link.
  CHECK(g.finish_times[0][3] == doctest::Approx(6000.0));
  CHECK(g.finish_times[1][1] == doctest::Approx(6000.0));
  CHECK(g.finish_times[1][2] == doctest::Approx(7000.0));
  CHECK(g.finish_times[1][3] == doctest::Approx(8000.0));
}

TEST_CASE("GPS idle gaps and late arrivals") {
  std::vector<std::vector<PacketArrival>> a(2);
  a[0] = {{0.0, 1000.0}, {5000.0, 1000.0}};
  a[1] = {{500.0, 1000.0}};
  std::vector<double> w{1.0, 1.0};
  const auto g = gps_finish_times(a, w, 1e6);
  // 0..0.5 ms alone (500 bits), then shared: 500 bits left at 0.5 Mbit/s.
  CHECK(g.finish_times[0][0] == doctest::Approx(1500.0));
  CHECK(g.finish_times[1][0] == doctest::Approx(2000.0));
  CHECK(g.finish_times[0][1] == doctest::Approx(6000.0));
}

TEST_CASE("GPS proportional service and work conservation") {
  std::mt19937_64 gen(9);
  std::exponential_distribution<double> gap(1.0 / 700.0);
  std::uniform_real_distribution<double> size(200.0, 2000.0);
  std::vector<std::vector<PacketArrival>> a(3);
  for (auto& st : a) {
    double t = 0.0;
    for (int k = 0; k < 200; ++k) {
      t += gap(gen);
      st.push_back({t, size(gen)});
    }
  }
  std::vector<double> w{1.0, 2.0, 0.5};
  const double cap = 2e6;
  const auto g = gps_finish_times(a, w, cap, true);
  REQUIRE(!g.segments.empty());
  double total_bits = 0.0;
  for (const auto& st : a)
    for (const auto& p : st) total_bits += p.size_bits;
  double delivered = 0.0;
  for (const auto& seg : g.segments) {
    const double len = seg.end_us - seg.start_us;
    CHECK(len >= 0.0);
    double sum = 0.0;
    for (double b : seg.delivered_bits) sum += b;
    // Segments are only recorded while some station is backlogged.
    CHECK(sum == doctest::Approx(cap * 1e-6 * len).epsilon(1e-9));
    // Backlogged stations share in proportion to weight.
    double ratio = -1.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (seg.delivered_bits[i] <= 0.0) continue;
      const double r = seg.delivered_bits[i] / w[i];
      if (ratio < 0.0) ratio = r;
      CHECK(r == doctest::Approx(ratio).epsilon(1e-9));
    }
    delivered += sum;
  }
  CHECK(delivered == doctest::Approx(total_bits).epsilon(1e-9));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      CHECK(g.finish_times[i][j] >= a[i][j].time_us);
      if (j > 0) CHECK(g.finish_times[i][j] >= g.finish_times[i][j - 1]);
    }
  }
}

TEST_CASE("GPS input validation") {
  std::vector<double> w{1.0};
  CHECK_THROWS_AS(gps_finish_times(saturated(1, 1, 1000.0), w, 0.0), Error);
  std::vector<double> w2{1.0, 0.0};
  CHECK_THROWS_AS(gps_finish_times(saturated(2, 1, 1000.0), w2, 1e6), Error);
}

TEST_CASE("clock arithmetic") {
  SlotTrace t;
  t.add_idle(0, 20);
  t.add_success(20, 500, 1);
  t.add_success(520, 500, 0);
  const auto c = dcf_clock(t.records(), 0, 500.0);
  REQUIRE(c.size() == 1);
  CHECK(c.departures[0] == 1020);
  CHECK(c.increments[0] == 1020);
  CHECK(c.errors[0] == doctest::Approx(520.0));
  try {
    dcf_clock(t.records(), 2, 1.0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_clock);
  }
}

TEST_CASE("deterministic single station clock") {
  MacParams p;
  p.cw_min = 1;
  p.cw_max = 1;
  p.max_backoff_stage = 0;
  auto cfg = SimConfig::homogeneous(p, 1, Horizon::slots(2000), 4);
  const auto res = run(cfg);
  const double ds = static_cast<double>(p.success_duration());
  const auto c = dcf_clock(res.slots.records(), 0, ds);
  CHECK(c.size() == 2000);
  for (std::size_t j = 0; j < c.size(); ++j) {
    CHECK(c.increments[j] == p.success_duration());
    CHECK(c.errors[j] == 0.0);
  }
}

TEST_CASE("clock telescopes on simulated traces") {
  MacParams p;
  const auto res = run(SimConfig::homogeneous(p, 6, Horizon::slots(200'000), 21));
  const double fair = 1234.5;
  const auto c = dcf_clock(res.slots.records(), 2, fair);
  Micros sum = 0;
  double err = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    sum += c.increments[j];
    err += c.errors[j];
    CHECK(c.departures[j] == sum);
  }
  const auto J = static_cast<double>(c.size());
  CHECK(static_cast<double>(c.departures.back()) == doctest::Approx(J * fair + err).epsilon(1e-12));
  // clock_from_departures recovers the same trace.
  const auto c2 = clock_from_departures(c.departures, fair);
  CHECK(c2.increments == c.increments);
}

TEST_CASE("GPS trace fed as clock has zero deviation") {
  std::vector<double> w{1.0, 1.0};
  const auto g = gps_finish_times(saturated(2, 50, 1000.0), w, 1e6);
  std::vector<Micros> deps;
  for (double f : g.finish_times[0]) deps.push_back(static_cast<Micros>(std::llround(f)));
  const auto c = clock_from_departures(deps, 2000.0);
  const auto s = clock_vs_gps(c, g, 0);
  CHECK(s.packets == 50);
  CHECK(s.max_abs == 0.0);
  CHECK(s.mean == 0.0);
}

TEST_CASE("GPS must cover the clock") {
  std::vector<double> w{1.0};
  const auto g = gps_finish_times(saturated(1, 3, 1000.0), w, 1e6);
  std::vector<Micros> deps{1000, 2000, 3000, 4000};
  const auto c = clock_from_departures(deps, 1000.0);
  try {
    clock_vs_gps(c, g, 0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::alignment);
  }
}

TEST_CASE("matched GPS tracks the DCF clock for two stations") {
  MacParams p;
  const int packets = 100'000;
  const auto dist = homogeneous_slot_distribution(p, 2);
  const double per_station = saturation_throughput(dist, 8000.0)[0];
  // Roughly 9 slots per success at n = 2, so 18 per tagged success.
  auto cfg = SimConfig::homogeneous(p, 2, Horizon::slots(20 * packets), 17);
  cfg.record_events = false;
  const auto res = run(cfg);
  auto clock = dcf_clock(res.slots.records(), 0, 0.0);
  REQUIRE(clock.size() >= static_cast<std::size_t>(packets));
  clock.departures.resize(packets);
  clock.increments.resize(packets);
  clock.errors.resize(packets);
  const auto gps = matched_saturated_gps(2, packets, 8000.0, per_station);
  const auto s = clock_vs_gps(clock, gps, 0);
  const double horizon = static_cast<double>(clock.departures.back());
  CHECK(std::abs(s.mean) / horizon < 0.01);
  CHECK(s.p05 <= s.p50);
  CHECK(s.p50 <= s.p95);
}

TEST_CASE("clock error mean matches increment model") {
  MacParams p;
  const int n = 10;
  const auto im = increment_model(homogeneous_slot_distribution(p, n), 0);
  const auto mo = increment_moments(im);
  // About 38 slots per tagged success at n = 10.
  auto cfg = SimConfig::homogeneous(p, n, Horizon::slots(40 * 100'000), 3);
  cfg.record_events = false;
  const auto res = run(cfg);
  auto c = dcf_clock(res.slots.records(), 0, mo.mean);
  REQUIRE(c.size() >= 100'000u);
  c.errors.resize(100'000);
  const double se = std::sqrt(stats::variance(c.errors) / c.errors.size());
  CHECK(std::abs(stats::mean(c.errors)) <= 3.0 * se);
}
