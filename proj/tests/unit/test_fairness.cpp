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
#include <cstdint>
#include <random>
#include <vector>

#include "../common/oracles.hpp"
#include "error.hpp"
#include "fairness.hpp"
#include "stats.hpp"

using namespace dcf;

TEST_CASE("symmetric pmf leading terms") {
  const auto pmf = conditional_pmf(0.5, 0.5, 1);
  CHECK(pmf.at(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(pmf.at(1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(pmf.at(2) == doctest::Approx(0.125).epsilon(1e-14));
  const auto pmf2 = conditional_pmf(0.5, 0.5, 2);
  CHECK(pmf2.at(2) == doctest::Approx(0.1875).epsilon(1e-14));
}

TEST_CASE("pmf agrees with enumeration") {
  for (double beta : {0.2, 0.5, 0.8}) {
    for (int l = 1; l <= 3; ++l) {
      const auto pmf = conditional_pmf(1.0 - beta, beta, l);
      const auto ref = testing::enumerate_conditional(beta, l, 6);
      for (int k = 0; k <= 6; ++k) CHECK(std::abs(pmf.at(k) - ref[k]) <= 1e-12);
    }
  }
  // Enumeration against length-12 strings, scaled q inputs.
  const auto ref = testing::enumerate_conditional(0.5, 1, 11);
  const auto pmf = conditional_pmf(0.2, 0.2, 1);
  for (int k = 0; k <= 11; ++k) CHECK(std::abs(pmf.at(k) - ref[k]) <= 1e-14);
}

TEST_CASE("contender that never wins") {
  const auto pmf = conditional_pmf(0.3, 0.0, 5);
  CHECK(pmf.k_max == 0);
  CHECK(pmf.at(0) == 1.0);
  CHECK(pmf.at(1) == 0.0);
}

TEST_CASE("pmf normalization and truncation") {
  for (double beta : {0.05, 0.3, 0.5, 0.9, 0.99}) {
    for (int l : {1, 3, 20, 200}) {
      const auto pmf = conditional_pmf(1.0 - beta, beta, l);
      stats::CompensatedSum s;
      for (double v : pmf.pmf) {
        CHECK(v >= 0.0);
        s.add(v);
      }
      CHECK(1.0 - s.value() <= kDefaultTruncTol);
      CHECK(pmf.tail_mass == doctest::Approx(1.0 - s.value()).epsilon(1e-6).scale(1e-12));
    }
  }
}

TEST_CASE("log domain branch matches recurrence") {
  // k + l > 50 is evaluated in logs; compare with a forward product.
  const double beta = 0.45;
  const int l = 40;
  const auto pmf = conditional_pmf(1.0 - beta, beta, l);
  double p = std::pow(1.0 - beta, l);
  for (int k = 0; k <= pmf.k_max; ++k) {
    CHECK(pmf.at(k) == doctest::Approx(p).epsilon(1e-11));
    p *= (k + l) / static_cast<double>(k + 1) * beta;
  }
}

TEST_CASE("moments examples") {
  {
    const auto m = pmf_moments(conditional_pmf(0.5, 0.5, 7));
    CHECK(m.mean == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(m.mean_from_pmf == doctest::Approx(7.0).epsilon(1e-7));
  }
  {
    // beta = 1/3
    const auto m = pmf_moments(conditional_pmf(0.4, 0.2, 3));
    CHECK(m.mean == doctest::Approx(1.5).epsilon(1e-12));
  }
  {
    const auto m = pmf_moments(conditional_pmf(0.5, 0.5, 1));
    CHECK(m.variance == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.variance_from_pmf == doctest::Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("homogeneous long-term share") {
  for (int l : {1, 2, 5, 10, 50}) {
    const auto m = pmf_moments(conditional_pmf(0.1, 0.1, l));
    CHECK(std::abs(m.mean - l) <= 1e-9);
    CHECK(std::abs(m.mean_from_pmf - l) <= 1e-6 * l);
  }
}

TEST_CASE("variance matches Monte Carlo windows") {
  std::mt19937_64 gen(11);
  std::bernoulli_distribution coin(0.5);
  const int windows = 1'000'000;
  std::vector<double> ks;
  ks.reserve(windows);
  for (int w = 0; w < windows; ++w) {
    int k = 0;
    while (coin(gen)) ++k;
    ks.push_back(k);
  }
  const double v = stats::variance(ks);
  // Var of the sample variance for a geometric law: (mu4 - sigma^4)/N.
  const double mu4 = 26.0;  // fourth central moment of Geometric(1/2) on {0,1,...}
  const double se = std::sqrt((mu4 - 4.0) / windows);
  CHECK(std::abs(v - 2.0) <= 3.0 * se);
  CHECK(std::abs(stats::mean(ks) - 1.0) <= 3.0 * std::sqrt(2.0 / windows));
}

TEST_CASE("conditioning errors") {
  try {
    conditional_pmf(0.0, 0.5, 1);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::undefined_conditioning);
  }
  CHECK_THROWS_AS(conditional_pmf(0.5, 0.5, 0), Error);
}

TEST_CASE("Jain index examples") {
  std::vector<double> a{5, 5, 5, 5}, b{1, 0, 0, 0}, c{3, 1};
  CHECK(jain_index(a) == doctest::Approx(1.0));
  CHECK(jain_index(b) == doctest::Approx(0.25));
  CHECK(jain_index(c) == doctest::Approx(0.8));
  std::vector<double> zero{0, 0};
  try {
    jain_index(zero);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::undefined_index);
  }
  std::vector<double> neg{1, -1};
  CHECK_THROWS_AS(jain_index(neg), Error);
}

TEST_CASE("Jain index bounds and scale invariance") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x(1 + t % 12);
    for (double& v : x) v = u(gen);
    const double j = jain_index(x);
    CHECK(j >= 1.0 / x.size() - 1e-12);
    CHECK(j <= 1.0 + 1e-12);
    for (double& v : x) v *= 3.7;
    CHECK(jain_index(x) == doctest::Approx(j).epsilon(1e-12));
  }
}

TEST_CASE("windowed fairness examples") {
  std::vector<std::int32_t> alt, pairs;
  for (int i = 0; i < 40; ++i) alt.push_back(i % 2);
  for (int i = 0; i < 40; ++i) pairs.push_back((i / 2) % 2);
  const auto a = windowed_fairness(alt, 2);
  CHECK(a.windows() == 20);
  for (double j : a.jain) CHECK(j == doctest::Approx(1.0));
  const auto b = windowed_fairness(pairs, 2);
  for (double j : b.jain) CHECK(j == doctest::Approx(0.5));
  CHECK(b.jain_mean == doctest::Approx(0.5));
  CHECK(b.count(0, 0) == 2);
  CHECK(b.count(1, 1) == 2);
  // Partial tail window is dropped.
  std::vector<std::int32_t> odd{0, 1, 0};
  CHECK(windowed_fairness(odd, 2).windows() == 1);
  CHECK_THROWS_AS(windowed_fairness(odd, 0), Error);
}

TEST_CASE("short-term horizon") {
  std::vector<double> q{0.25, 0.25, 0.5};
  CHECK(short_term_horizon(q, 0, 1, 1.0, 1.0) == 1);
  std::vector<double> q0{0.5, 0.0};
  CHECK(short_term_horizon(q0, 0, 1, 0.5, 0.05) == 1);
  CHECK(short_term_horizon(q, 0, 1, 0.5, 0.05) == 28);
  try {
    short_term_horizon(q, 0, 1, 0.01, 1e-6, 10);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::horizon_not_found);
  }
}

TEST_CASE("short-term horizon against Monte Carlo") {
  // At l = 28 the deviation probability is at most 5%, at l = 27 it is not.
  std::mt19937_64 gen(5);
  std::bernoulli_distribution coin(0.5);
  auto violation = [&](int l) {
    const int reps = 200'000;
    int bad = 0;
    for (int r = 0; r < reps; ++r) {
      int tagged = 0, k = 0;
      while (tagged < l) (coin(gen) ? ++k : ++tagged);
      if (std::abs(k - l) > 0.5 * l) ++bad;
    }
    return static_cast<double>(bad) / reps;
  };
  const double se = std::sqrt(0.05 * 0.95 / 200'000);
  CHECK(violation(28) <= 0.05 + 3 * se);
  CHECK(violation(27) > 0.05 - 3 * se);
}

TEST_CASE("conditional histogram blocks") {
  // tagged = 0, contender = 1, station 2 ignored
  std::vector<std::int32_t> owners{1, 2, 0, 0, 1, 1, 0, 2, 0};
  const auto h1 = conditional_histogram(owners, 0, 1, 1);
  REQUIRE(h1.size() == 3);
  CHECK(h1[0] == 2);
  CHECK(h1[1] == 1);
  CHECK(h1[2] == 1);
  const auto h2 = conditional_histogram(owners, 0, 1, 2);
  REQUIRE(h2.size() == 3);
  CHECK(h2[0] == 0);
  CHECK(h2[1] == 1);
  CHECK(h2[2] == 1);
}

TEST_CASE("total variation") {
  const auto pmf = conditional_pmf(0.5, 0.5, 1);
  std::vector<std::int64_t> exact{500, 250, 125, 63, 31, 16, 8, 4, 2, 1};
  CHECK(total_variation(exact, pmf) < 0.01);
  std::vector<std::int64_t> point{1};
  CHECK(total_variation(point, pmf) == doctest::Approx(0.5).epsilon(1e-8));
  std::vector<std::int64_t> empty;
  CHECK_THROWS_AS(total_variation(empty, pmf), Error);
}
