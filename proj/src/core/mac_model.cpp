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

#include "mac_model.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "error.hpp"

namespace dcf {

void MacParams::validate() const {
  require(cw_min >= 1, fmt::format("cw_min must be >= 1 (got {})", cw_min));
  require(cw_max >= cw_min,
          fmt::format("cw_max must be >= cw_min (got {} < {})", cw_max, cw_min));
  require(max_backoff_stage >= 0 && max_backoff_stage <= 30,
          fmt::format("max_backoff_stage must be in [0, 30] (got {})", max_backoff_stage));
  require(retry_limit >= 0, fmt::format("retry_limit must be >= 0 (got {})", retry_limit));
  require(slot_sigma > 0 && difs > 0 && sifs > 0 && ack_dur > 0 && header_dur > 0 &&
              payload_dur > 0,
          "all MAC durations must be > 0");
}

int MacParams::window_at_stage(int stage) const {
  const int doublings = std::min(stage, max_backoff_stage);
  // Saturate before shifting so large stage counts cannot overflow.
  std::int64_t w = cw_min;
  for (int i = 0; i < doublings && w < cw_max; ++i) w *= 2;
  return static_cast<int>(std::min<std::int64_t>(w, cw_max));
}

double attempt_probability_from_chain(const MacParams& params, double p) {
  // Each visit to stage i costs (W_i + 1) / 2 slots on average: the uniform
  // counter on {0..W_i-1} plus the transmission slot. Stage i is reached with
  // probability p^i. Without a retry limit the stages at and beyond
  // max_backoff_stage share one window; the geometric tail is multiplied
  // through by (1 - p) so that p -> 1 stays finite.
  auto half_cost = [&](int stage) { return (params.window_at_stage(stage) + 1.0) / 2.0; };
  double attempts = 0.0;
  double slots = 0.0;
  if (params.retry_limit > 0) {
    double reach = 1.0;
    for (int i = 0; i < params.retry_limit; ++i) {
      attempts += reach;
      slots += reach * half_cost(i);
      reach *= p;
    }
  } else {
    const int m = params.max_backoff_stage;
    double reach = 1.0;
    for (int i = 0; i < m; ++i) {
      attempts += (1.0 - p) * reach;
      slots += (1.0 - p) * reach * half_cost(i);
      reach *= p;
    }
    attempts += reach;
    slots += reach * half_cost(m);
  }
  return attempts / slots;
}

namespace {

double collision_probability(double tau, int n) {
  return 1.0 - std::pow(1.0 - tau, n - 1);
}

double fixed_point_residual(const MacParams& params, int n, double tau) {
  return tau - attempt_probability_from_chain(params, collision_probability(tau, n));
}

}  // namespace

AttemptSolution solve_attempt_fixed_point(const MacParams& params, int n, double tol) {
  params.validate();
  require(n >= 1, fmt::format("station count must be >= 1 (got {})", n));
  require(tol > 0.0, "fixed-point tolerance must be > 0");

  double lo = 1e-9;
  double hi = 1.0 - 1e-9;
  const double f_lo = fixed_point_residual(params, n, lo);
  const double f_hi = fixed_point_residual(params, n, hi);
  if (f_lo > 0.0 || f_hi < 0.0) {
    fail(ErrorCode::solver_failure,
         fmt::format("no root bracketed on tau in [{}, {}]: residual {:.6g} .. {:.6g} "
                     "(cw_min={}, cw_max={}, n={})",
                     lo, hi, f_lo, f_hi, params.cw_min, params.cw_max, n));
  }

  double tau = 0.5 * (lo + hi);
  double residual = fixed_point_residual(params, n, tau);
  for (int iter = 0; iter < 400 && std::abs(residual) > tol; ++iter) {
    if (residual > 0.0) {
      hi = tau;
    } else {
      lo = tau;
    }
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    tau = mid;
    residual = fixed_point_residual(params, n, tau);
  }
  if (std::abs(residual) > tol) {
    fail(ErrorCode::solver_failure,
         fmt::format("bisection stalled at tau={:.17g} with residual {:.3g} > tol {:.3g}", tau,
                     residual, tol));
  }
  return AttemptSolution{n, tau, collision_probability(tau, n), std::abs(residual)};
}

HeterogeneousSolution solve_attempt_heterogeneous(std::span<const MacParams> params,
                                                  double tol) {
  require(!params.empty(), "at least one station is required");
  require(tol > 0.0, "fixed-point tolerance must be > 0");
  for (const auto& p : params) p.validate();

  constexpr double kDamping = 0.5;
  constexpr int kMaxIterations = 100000;
  const std::size_t n = params.size();

  HeterogeneousSolution sol;
  sol.tau.resize(n);
  sol.p_coll.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) sol.tau[i] = attempt_probability_from_chain(params[i], 0.0);

  std::vector<double> target(n);
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double silent = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) silent *= 1.0 - sol.tau[j];
      }
      sol.p_coll[i] = 1.0 - silent;
      target[i] = attempt_probability_from_chain(params[i], sol.p_coll[i]);
      residual = std::max(residual, std::abs(sol.tau[i] - target[i]));
    }
    sol.residual = residual;
    sol.iterations = iter;
    if (residual <= tol) return sol;
    for (std::size_t i = 0; i < n; ++i) {
      sol.tau[i] = kDamping * sol.tau[i] + (1.0 - kDamping) * target[i];
    }
  }
  fail(ErrorCode::solver_failure,
       fmt::format("damped iteration did not converge in {} iterations (residual {:.3g})",
                   kMaxIterations, sol.residual));
}

double SlotDistribution::p_any_success() const {
  double s = 0.0;
  for (double p : p_succ) s += p;
  return s;
}

double SlotDistribution::mean_slot_duration() const {
  return p_idle * static_cast<double>(d_idle) +
         p_any_success() * static_cast<double>(d_succ) +
         p_coll * static_cast<double>(d_coll);
}

SlotDistribution slot_distribution(std::span<const double> tau, const MacParams& params) {
  params.validate();
  require(!tau.empty(), "tau vector must be non-empty");
  for (double t : tau) {
    require(t > 0.0 && t <= 1.0, fmt::format("attempt probability {} outside (0, 1]", t));
  }
  const std::size_t n = tau.size();
  SlotDistribution d;
  d.p_idle = 1.0;
  for (double t : tau) d.p_idle *= 1.0 - t;
  d.p_succ.resize(n);
  double total_succ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double p = tau[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) p *= 1.0 - tau[j];
    }
    d.p_succ[i] = p;
    total_succ += p;
  }
  d.p_coll = std::max(0.0, 1.0 - d.p_idle - total_succ);
  d.d_idle = params.slot_sigma;
  d.d_succ = params.success_duration();
  d.d_coll = params.collision_duration();
  d.q.assign(n, 0.0);
  if (total_succ > 0.0) {
    for (std::size_t i = 0; i < n; ++i) d.q[i] = d.p_succ[i] / total_succ;
  }
  return d;
}

SlotDistribution homogeneous_slot_distribution(const MacParams& params, int n) {
  const AttemptSolution sol = solve_attempt_fixed_point(params, n);
  const std::vector<double> tau(static_cast<std::size_t>(n), sol.tau);
  return slot_distribution(tau, params);
}

std::vector<double> saturation_throughput(const SlotDistribution& dist, double payload_bits) {
  require(payload_bits > 0.0, "payload_bits must be > 0");
  const double mean_slot_us = dist.mean_slot_duration();
  require(mean_slot_us > 0.0, "mean slot duration must be > 0");
  std::vector<double> s(dist.p_succ.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = dist.p_succ[i] * payload_bits / mean_slot_us * 1e6;
  }
  return s;
}

}  // namespace dcf
