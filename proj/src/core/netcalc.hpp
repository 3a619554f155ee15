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

// Stochastic service curve of a saturated tagged station. Inter-departure
// increments are modelled as a compound geometric sum: a Geometric(p_tag)
// number of slots, each non-tagged slot drawn i.i.d. from a conditional
// duration distribution, closed by one tagged success. A Chernoff bound on
// the i.i.d. increment sum T_j gives the (1 - eps) envelope
//   t_eps(j) = (j Lambda(theta) + ln(1/eps)) / theta,
// i.e. a rate-latency curve with rate theta / Lambda(theta) and latency
// ln(1/eps) / theta. This is the MGF (moment-bound) flavour of stochastic
// service curve.

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mac_model.hpp"

namespace dcf {

struct DurationAtom {
  double value_us = 0.0;
  double probability = 0.0;
};

struct IncrementModel {
  double p_tag = 1.0;
  std::vector<DurationAtom> other_slots;  // conditional on "not a tagged success"
  double d_succ = 0.0;

  void validate() const;
};

IncrementModel increment_model(const SlotDistribution& dist, int tagged);

struct IncrementMoments {
  double mean = 0.0;
  double variance = 0.0;
};

IncrementMoments increment_moments(const IncrementModel& model);

// Root of (1 - p_tag) E[exp(theta D)] = 1; +inf when p_tag = 1.
double theta_max(const IncrementModel& model);

// Lambda(theta) = ln E[exp(theta I)], theta in 1/us. Negative theta is valid.
double log_mgf(const IncrementModel& model, double theta);

struct StochasticServiceCurve {
  double rate_pps = 0.0;
  double latency_s = 0.0;
  double eps = 0.0;
  double theta = 0.0;

  double rate_per_us() const { return rate_pps * 1e-6; }
};

StochasticServiceCurve service_curve(const IncrementModel& model, double theta, double eps);

// (1 - eps) quantile envelope of T_j in us.
double envelope_time(const IncrementModel& model, double theta, double eps, double j);

struct ThetaOptimum {
  double theta = 0.0;
  double envelope_us = 0.0;
  double upper = 0.0;   // search cap, min(0.999 theta_max, theta_cap)
  bool unimodal = true; // false: grid argmin returned with a warning
};

inline constexpr double kDefaultThetaCap = 1.0;  // 1/us, used when theta_max is infinite

ThetaOptimum optimize_theta(const IncrementModel& model, double eps, int horizon_j,
                            double theta_cap = kDefaultThetaCap);

struct ArrivalEnvelope {
  double sigma_b = 0.0;   // packets
  double rho_pps = 0.0;   // packets/s
};

// Horizontal deviation between a token bucket and the rate-latency curve, s.
double delay_bound(const ArrivalEnvelope& arrivals, const StochasticServiceCurve& sc);
// Vertical deviation, packets.
double backlog_bound(const ArrivalEnvelope& arrivals, const StochasticServiceCurve& sc);

}  // namespace dcf
