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

#include "fairness.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "error.hpp"
#include "stats.hpp"

namespace dcf {

namespace {

constexpr int kMaxPmfLength = 50'000'000;
constexpr int kExactBinomialLimit = 50;

// C(n, k) for n <= kExactBinomialLimit; every intermediate is an exact integer
// below 2^63.
std::uint64_t exact_binomial(int n, int k) {
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 0; i < k; ++i) {
    c = c * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
  }
  return c;
}

double negative_binomial_term(int k, int l, double beta, double log_beta, double log_one_minus) {
  const int n = k + l - 1;
  if (k + l <= kExactBinomialLimit) {
    return static_cast<double>(exact_binomial(n, k)) * std::pow(1.0 - beta, l) *
           std::pow(beta, k);
  }
  const double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(l + 0.0);
  return std::exp(log_c + l * log_one_minus + k * log_beta);
}

}  // namespace

ConditionalPmf conditional_pmf(double q_tagged, double q_contender, int l, double trunc_tol) {
  if (!(q_tagged > 0.0)) {
    fail(ErrorCode::undefined_conditioning,
         fmt::format("tagged ownership probability must be > 0 (got {})", q_tagged));
  }
  require(q_contender >= 0.0, "contender ownership probability must be >= 0");
  require(q_tagged + q_contender <= 1.0 + 1e-12,
          fmt::format("ownership probabilities sum to {} > 1", q_tagged + q_contender));
  require(l >= 1, fmt::format("tagged count l must be >= 1 (got {})", l));
  require(trunc_tol > 0.0 && trunc_tol < 1.0, "truncation tolerance must be in (0, 1)");

  ConditionalPmf out;
  out.l = l;
  out.beta = q_contender / (q_tagged + q_contender);
  if (out.beta == 0.0) {
    out.pmf = {1.0};
    return out;
  }

  const double log_beta = std::log(out.beta);
  const double log_one_minus = std::log1p(-out.beta);
  stats::CompensatedSum cumulative;
  for (int k = 0;; ++k) {
    if (k >= kMaxPmfLength) {
      fail(ErrorCode::truncation,
           fmt::format("pmf needs more than {} terms to reach tail <= {} (beta={}, l={})",
                       kMaxPmfLength, trunc_tol, out.beta, l));
    }
    const double p = negative_binomial_term(k, l, out.beta, log_beta, log_one_minus);
    out.pmf.push_back(p);
    cumulative.add(p);
    const double tail = 1.0 - cumulative.value();
    if (tail <= trunc_tol) {
      out.k_max = k;
      out.tail_mass = std::max(0.0, tail);
      return out;
    }
  }
}

PmfMoments pmf_moments(const ConditionalPmf& pmf) {
  if (pmf.tail_mass > 1e-9) {
    fail(ErrorCode::truncation,
         fmt::format("tail mass {:.3g} exceeds 1e-9; moments would be biased", pmf.tail_mass));
  }
  PmfMoments m;
  const double b = pmf.beta;
  m.mean = pmf.l * b / (1.0 - b);
  m.variance = pmf.l * b / ((1.0 - b) * (1.0 - b));

  stats::CompensatedSum s1;
  for (int k = 0; k <= pmf.k_max; ++k) s1.add(k * pmf.at(k));
  m.mean_from_pmf = s1.value();
  stats::CompensatedSum s2;
  for (int k = 0; k <= pmf.k_max; ++k) {
    const double d = k - m.mean_from_pmf;
    s2.add(d * d * pmf.at(k));
  }
  m.variance_from_pmf = s2.value();

  auto rel = [](double a, double ref) { return std::abs(a - ref) / std::max(1.0, std::abs(ref)); };
  if (rel(m.mean_from_pmf, m.mean) > 1e-6 || rel(m.variance_from_pmf, m.variance) > 1e-6) {
    fail(ErrorCode::internal_consistency,
         fmt::format("pmf moments ({}, {}) disagree with closed form ({}, {})", m.mean_from_pmf,
                     m.variance_from_pmf, m.mean, m.variance));
  }
  return m;
}

double jain_index(std::span<const double> x) {
  require(!x.empty(), "jain index of an empty vector");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : x) {
    require(v >= 0.0, "jain index needs nonnegative shares");
    sum += v;
    sum_sq += v * v;
  }
  if (sum == 0.0) fail(ErrorCode::undefined_index, "jain index undefined for an all-zero vector");
  return (sum * sum) / (static_cast<double>(x.size()) * sum_sq);
}

FairnessWindowStats windowed_fairness(std::span<const std::int32_t> owners,
                                      std::size_t window_len, int stations) {
  require(window_len >= 1, "window_len must be >= 1");
  require(owners.size() >= window_len,
          fmt::format("trace has {} successes, fewer than window_len {}", owners.size(),
                      window_len));
  if (stations <= 0) {
    stations = 1 + *std::max_element(owners.begin(), owners.end());
  }
  for (auto o : owners) {
    require(o >= 0 && o < stations, fmt::format("owner id {} outside [0, {})", o, stations));
  }

  FairnessWindowStats st;
  st.window_len = window_len;
  st.stations = stations;
  const std::size_t windows = owners.size() / window_len;
  const auto ns = static_cast<std::size_t>(stations);
  st.counts.assign(windows * ns, 0);
  st.jain.resize(windows);
  std::vector<double> shares(ns);
  for (std::size_t w = 0; w < windows; ++w) {
    std::int64_t* row = &st.counts[w * ns];
    for (std::size_t i = 0; i < window_len; ++i) ++row[owners[w * window_len + i]];
    for (std::size_t s = 0; s < ns; ++s) shares[s] = static_cast<double>(row[s]);
    st.jain[w] = jain_index(shares);
  }
  st.jain_mean = stats::mean(st.jain);
  st.jain_p05 = stats::quantile(st.jain, 0.05);
  st.jain_p95 = stats::quantile(st.jain, 0.95);
  return st;
}

int short_term_horizon(std::span<const double> q, int tagged, int contender, double delta,
                       double eps, int max_l) {
  require(delta > 0.0, "delta must be > 0");
  require(eps > 0.0 && eps <= 1.0, "eps must be in (0, 1]");
  const auto n = static_cast<int>(q.size());
  require(tagged >= 0 && tagged < n && contender >= 0 && contender < n && tagged != contender,
          "tagged and contender must be distinct valid station indices");

  for (int l = 1; l <= max_l; ++l) {
    const ConditionalPmf pmf = conditional_pmf(q[tagged], q[contender], l);
    const double m = l * pmf.beta / (1.0 - pmf.beta);
    // Truncated mass lies beyond k_max and is counted as a deviation.
    double violation = pmf.tail_mass;
    for (int k = 0; k <= pmf.k_max; ++k) {
      if (std::abs(k - m) > delta * m) violation += pmf.at(k);
    }
    if (violation <= eps) return l;
  }
  fail(ErrorCode::horizon_not_found,
       fmt::format("no l <= {} satisfies the deviation bound (delta={}, eps={})", max_l, delta,
                   eps));
}

std::vector<std::int64_t> conditional_histogram(std::span<const std::int32_t> owners,
                                                int tagged, int contender, int l) {
  require(l >= 1, "l must be >= 1");
  std::vector<std::int64_t> hist;
  int tagged_seen = 0;
  std::size_t k = 0;
  for (auto o : owners) {
    if (o == contender) {
      ++k;
    } else if (o == tagged && ++tagged_seen == l) {
      if (hist.size() <= k) hist.resize(k + 1, 0);
      ++hist[k];
      tagged_seen = 0;
      k = 0;
    }
  }
  return hist;
}

double total_variation(std::span<const std::int64_t> histogram, const ConditionalPmf& pmf) {
  std::int64_t total = 0;
  for (auto c : histogram) total += c;
  require(total > 0, "total variation needs a non-empty histogram");
  const std::size_t len = std::max(histogram.size(), pmf.pmf.size());
  double tv = pmf.tail_mass;
  for (std::size_t k = 0; k < len; ++k) {
    const double emp =
        k < histogram.size() ? static_cast<double>(histogram[k]) / static_cast<double>(total) : 0.0;
    tv += std::abs(emp - pmf.at(static_cast<int>(k)));
  }
  return 0.5 * tv;
}

}  // namespace dcf
