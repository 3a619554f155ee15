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
#include <random>
#include <vector>

#include "error.hpp"
#include "mac_model.hpp"

using namespace dcf;

TEST_CASE("single station attempt probability") {
  MacParams p;
  const AttemptSolution s = solve_attempt_fixed_point(p, 1);
  CHECK(s.tau == doctest::Approx(2.0 / 33.0).epsilon(1e-12));
  CHECK(s.p_coll == 0.0);
}

TEST_CASE("fixed window attempt probability") {
  MacParams p;
  p.cw_min = 2;
  p.cw_max = 2;
  p.max_backoff_stage = 0;
  const AttemptSolution s = solve_attempt_fixed_point(p, 2);
  CHECK(s.tau == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(s.p_coll == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("chain attempt probability matches direct Markov sum") {
  MacParams p;
  for (double pc : {0.0, 0.1, 0.3, 0.7, 0.95}) {
    // Truncated direct sum over a long stage chain.
    double num = 0.0, den = 0.0, reach = 1.0;
    for (int i = 0; i < 5000; ++i) {
      num += reach;
      den += reach * (p.window_at_stage(i) + 1) / 2.0;
      reach *= pc;
    }
    CHECK(attempt_probability_from_chain(p, pc) == doctest::Approx(num / den).epsilon(1e-12));
  }
  p.retry_limit = 3;
  const double pc = 0.4;
  double num = 0.0, den = 0.0, reach = 1.0;
  for (int i = 0; i < 3; ++i) {
    num += reach;
    den += reach * (p.window_at_stage(i) + 1) / 2.0;
    reach *= pc;
  }
  CHECK(attempt_probability_from_chain(p, pc) == doctest::Approx(num / den).epsilon(1e-12));
}

TEST_CASE("fixed point residual and monotonicity in n") {
  MacParams p;
  double prev_tau = 1.0;
  double prev_p = -1.0;
  for (int n = 1; n <= 50; ++n) {
    const AttemptSolution s = solve_attempt_fixed_point(p, n);
    CHECK(s.residual <= 1e-10);
    CHECK(s.tau < prev_tau);
    CHECK(s.p_coll > prev_p);
    CHECK(s.p_coll == doctest::Approx(1.0 - std::pow(1.0 - s.tau, n - 1)).epsilon(1e-9));
    prev_tau = s.tau;
    prev_p = s.p_coll;
  }
}

TEST_CASE("heterogeneous solver reduces to homogeneous") {
  MacParams p;
  std::vector<MacParams> v(6, p);
  const auto h = solve_attempt_heterogeneous(v);
  const auto s = solve_attempt_fixed_point(p, 6);
  for (double t : h.tau) CHECK(t == doctest::Approx(s.tau).epsilon(1e-8));
}

TEST_CASE("heterogeneous solver favours smaller windows") {
  MacParams a, b;
  b.cw_min = 64;
  std::vector<MacParams> v{a, b, a};
  const auto h = solve_attempt_heterogeneous(v);
  CHECK(h.tau[0] > h.tau[1]);
  CHECK(h.tau[0] == doctest::Approx(h.tau[2]).epsilon(1e-9));
}

TEST_CASE("slot distribution examples") {
  MacParams p;
  {
    std::vector<double> tau{0.5, 0.5};
    const auto d = slot_distribution(tau, p);
    CHECK(d.p_idle == doctest::Approx(0.25));
    CHECK(d.p_succ[0] == doctest::Approx(0.25));
    CHECK(d.p_succ[1] == doctest::Approx(0.25));
    CHECK(d.p_coll == doctest::Approx(0.25));
  }
  {
    std::vector<double> tau{0.1, 0.2};
    const auto d = slot_distribution(tau, p);
    CHECK(d.p_idle == doctest::Approx(0.72));
    CHECK(d.p_succ[0] == doctest::Approx(0.08));
    CHECK(d.p_succ[1] == doctest::Approx(0.18));
    CHECK(d.p_coll == doctest::Approx(0.02));
    CHECK(d.q[0] == doctest::Approx(4.0 / 13.0));
    CHECK(d.q[1] == doctest::Approx(9.0 / 13.0));
  }
  {
    const double t = 2.0 / 33.0;
    std::vector<double> tau{t};
    const auto d = slot_distribution(tau, p);
    CHECK(d.p_succ[0] == doctest::Approx(t));
    CHECK(d.p_coll == 0.0);
  }
}

TEST_CASE("slot probabilities sum to one") {
  MacParams p;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  std::uniform_int_distribution<int> nd(1, 30);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> tau(static_cast<std::size_t>(nd(gen)));
    for (double& t : tau) t = u(gen);
    const auto d = slot_distribution(tau, p);
    double total = d.p_idle + d.p_coll;
    double qs = 0.0;
    for (double s : d.p_succ) total += s;
    for (double q : d.q) qs += q;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.p_idle >= 0.0);
    CHECK(d.p_coll >= -1e-15);
    if (d.p_any_success() > 0.0) CHECK(qs == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("homogeneous ownership is uniform") {
  MacParams p;
  for (int n : {2, 5, 17}) {
    const auto d = homogeneous_slot_distribution(p, n);
    for (double q : d.q) CHECK(q == doctest::Approx(1.0 / n).epsilon(1e-12));
  }
}

TEST_CASE("saturation throughput formula") {
  MacParams p;
  p.header_dur = 100;
  p.payload_dur = 100;
  p.sifs = 10;
  p.ack_dur = 240;
  p.difs = 50;
  p.slot_sigma = 20;
  // d_succ = 500, d_coll = 250 here, so set up the second example by hand.
  {
    std::vector<double> tau{1.0};
    const auto d = slot_distribution(tau, p);
    CHECK(d.d_succ == 500);
    const auto s = saturation_throughput(d, 8000.0);
    CHECK(s[0] == doctest::Approx(8000.0 / 500.0 * 1e6));
  }
  {
    SlotDistribution d;
    d.p_idle = 0.25;
    d.p_succ = {0.25, 0.25};
    d.p_coll = 0.25;
    d.d_idle = 20;
    d.d_succ = 500;
    d.d_coll = 480;
    d.q = {0.5, 0.5};
    const auto s = saturation_throughput(d, 8000.0);
    const double per_us = 0.25 * 8000.0 / (0.25 * 20 + 0.5 * 500 + 0.25 * 480);
    CHECK(s[0] == doctest::Approx(per_us * 1e6));
    CHECK(s[1] == doctest::Approx(per_us * 1e6));
  }
}

TEST_CASE("parameter validation") {
  MacParams p;
  p.cw_max = 16;
  CHECK_THROWS_AS(p.validate(), Error);
  MacParams q;
  q.slot_sigma = 0;
  CHECK_THROWS_AS(solve_attempt_fixed_point(q, 3), Error);
  CHECK_THROWS_AS(solve_attempt_fixed_point(MacParams{}, 0), Error);
  std::vector<double> bad{0.0, 0.5};
  CHECK_THROWS_AS(slot_distribution(bad, MacParams{}), Error);
}

TEST_CASE("window capping") {
  MacParams p;
  CHECK(p.window_at_stage(0) == 32);
  CHECK(p.window_at_stage(3) == 256);
  CHECK(p.window_at_stage(5) == 1024);
  CHECK(p.window_at_stage(40) == 1024);
  p.cw_max = 100;
  CHECK(p.window_at_stage(2) == 100);
}

TEST_CASE("degenerate window has no interior root") {
  MacParams p;
  p.cw_min = 1;
  p.cw_max = 1;
  p.max_backoff_stage = 0;
  try {
    solve_attempt_fixed_point(p, 3);
    FAIL("expected solver failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::solver_failure);
  }
}
