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

// Analytical saturation model of the DCF: the decoupled attempt-probability
// fixed point, the per-slot outcome distribution and per-station throughput.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dcf {

// All MAC durations are integer microseconds so that slot arithmetic in the
// simulator and the clock is exact.
using Micros = std::int64_t;

struct MacParams {
  int cw_min = 32;
  int cw_max = 1024;
  int max_backoff_stage = 5;  // stage at which the window stops doubling
  int retry_limit = 0;        // drop after this many attempts, 0 = never
  Micros slot_sigma = 20;
  Micros difs = 50;
  Micros sifs = 10;
  Micros ack_dur = 304;
  Micros header_dur = 192;
  Micros payload_dur = 752;

  // Throws ErrorCode::invalid_argument when an invariant is violated.
  void validate() const;

  // Contention window at a backoff stage: cw_min doubled per stage up to
  // max_backoff_stage, clamped to cw_max.
  int window_at_stage(int stage) const;

  Micros success_duration() const {
    return header_dur + payload_dur + sifs + ack_dur + difs;
  }
  // Basic access: no ACK follows a collision.
  Micros collision_duration() const { return header_dur + payload_dur + difs; }

  bool operator==(const MacParams&) const = default;
};

struct AttemptSolution {
  int n = 0;
  double tau = 0.0;
  double p_coll = 0.0;
  double residual = 0.0;
};

inline constexpr double kDefaultFixedPointTol = 1e-12;

// Attempt probability implied by the backoff-stage chain when each attempt
// collides independently with probability p_coll.
double attempt_probability_from_chain(const MacParams& params, double p_coll);

// Solves tau = chain(1 - (1 - tau)^(n-1)) by bisection on (1e-9, 1 - 1e-9).
AttemptSolution solve_attempt_fixed_point(const MacParams& params, int n,
                                          double tol = kDefaultFixedPointTol);

struct HeterogeneousSolution {
  std::vector<double> tau;
  std::vector<double> p_coll;
  double residual = 0.0;
  int iterations = 0;
};

// Vector fixed point for stations with different MacParams, solved by damped
// iteration (damping 0.5, at most 10^5 iterations).
HeterogeneousSolution solve_attempt_heterogeneous(std::span<const MacParams> params,
                                                  double tol = 1e-12);

struct SlotDistribution {
  double p_idle = 0.0;
  std::vector<double> p_succ;
  double p_coll = 0.0;
  Micros d_idle = 0;
  Micros d_succ = 0;
  Micros d_coll = 0;
  std::vector<double> q;  // success ownership, q_i = p_succ_i / sum_j p_succ_j

  std::size_t stations() const { return p_succ.size(); }
  double p_any_success() const;
  double mean_slot_duration() const;
};

SlotDistribution slot_distribution(std::span<const double> tau, const MacParams& params);

// Slot distribution of n homogeneous stations at the solved fixed point.
SlotDistribution homogeneous_slot_distribution(const MacParams& params, int n);

// Per-station throughput in bits/s.
std::vector<double> saturation_throughput(const SlotDistribution& dist, double payload_bits);

}  // namespace dcf
