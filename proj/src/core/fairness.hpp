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

// Conditional fairness distribution P[K = k | l]: the number K of contender
// successes inside the minimal success prefix that holds exactly l tagged
// successes, under i.i.d. success ownership.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dcf {

inline constexpr double kDefaultTruncTol = 1e-9;

struct ConditionalPmf {
  int l = 1;
  double beta = 0.0;  // contender share of tagged-or-contender successes
  int k_max = 0;
  std::vector<double> pmf;  // k = 0..k_max
  double tail_mass = 0.0;   // 1 - sum(pmf)

  double at(int k) const {
    return k >= 0 && k <= k_max ? pmf[static_cast<std::size_t>(k)] : 0.0;
  }
};

// Negative binomial C(k+l-1, k) (1-beta)^l beta^k, truncated at the smallest
// k_max whose remaining mass is <= trunc_tol.
ConditionalPmf conditional_pmf(double q_tagged, double q_contender, int l,
                               double trunc_tol = kDefaultTruncTol);

struct PmfMoments {
  double mean = 0.0;
  double variance = 0.0;
  double mean_from_pmf = 0.0;
  double variance_from_pmf = 0.0;
};

// Closed-form moments, cross-checked against the truncated pmf. Relative
// disagreement above 1e-6 is reported as an internal consistency failure.
PmfMoments pmf_moments(const ConditionalPmf& pmf);

double jain_index(std::span<const double> x);

struct FairnessWindowStats {
  std::size_t window_len = 0;
  int stations = 0;
  std::vector<std::int64_t> counts;  // row-major, windows x stations
  std::vector<double> jain;          // one per window
  double jain_mean = 0.0;
  double jain_p05 = 0.0;
  double jain_p95 = 0.0;

  std::size_t windows() const { return jain.size(); }
  std::int64_t count(std::size_t window, int station) const {
    return counts[window * static_cast<std::size_t>(stations) + static_cast<std::size_t>(station)];
  }
};

// Disjoint windows of window_len consecutive successes; a trailing partial
// window is dropped. stations = 0 infers max(owner) + 1.
FairnessWindowStats windowed_fairness(std::span<const std::int32_t> owners,
                                      std::size_t window_len, int stations = 0);

// Smallest l with P[|K - E[K|l]| > delta E[K|l]] <= eps, scanning l upward.
int short_term_horizon(std::span<const double> q, int tagged, int contender, double delta,
                       double eps, int max_l = 1'000'000);

// Empirical counterpart of conditional_pmf: the owner sequence is cut into
// consecutive blocks each ending at the l-th tagged success, and contender
// successes are counted per block. Entry k is the number of blocks with K = k.
std::vector<std::int64_t> conditional_histogram(std::span<const std::int32_t> owners,
                                                int tagged, int contender, int l);

// Total-variation distance between an empirical histogram and a pmf.
double total_variation(std::span<const std::int64_t> histogram, const ConditionalPmf& pmf);

}  // namespace dcf
