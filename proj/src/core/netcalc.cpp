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

#include "netcalc.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "error.hpp"
#include "stats.hpp"

namespace dcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln E[exp(theta D)] by log-sum-exp.
double log_mgf_slots(const IncrementModel& m, double theta) {
  double top = -kInf;
  for (const auto& a : m.other_slots) {
    if (a.probability > 0.0) top = std::max(top, theta * a.value_us);
  }
  if (!std::isfinite(top)) return 0.0;
  double s = 0.0;
  for (const auto& a : m.other_slots) {
    if (a.probability > 0.0) s += a.probability * std::exp(theta * a.value_us - top);
  }
  return top + std::log(s);
}

}  // namespace

void IncrementModel::validate() const {
  require(p_tag > 0.0 && p_tag <= 1.0, fmt::format("p_tag must be in (0, 1] (got {})", p_tag));
  require(d_succ > 0.0, "d_succ must be > 0");
  if (p_tag < 1.0) {
    require(!other_slots.empty(), "a non-tagged slot distribution is required when p_tag < 1");
    stats::CompensatedSum total;
    for (const auto& a : other_slots) {
      require(a.probability >= 0.0 && a.value_us > 0.0,
              "slot atoms need probability >= 0 and duration > 0");
      total.add(a.probability);
    }
    require(std::abs(total.value() - 1.0) <= 1e-12,
            fmt::format("conditional slot probabilities sum to {:.17g}", total.value()));
  }
}

IncrementModel increment_model(const SlotDistribution& dist, int tagged) {
  require(tagged >= 0 && static_cast<std::size_t>(tagged) < dist.stations(),
          fmt::format("tagged station {} outside [0, {})", tagged, dist.stations()));
  IncrementModel m;
  m.p_tag = dist.p_succ[static_cast<std::size_t>(tagged)];
  m.d_succ = static_cast<double>(dist.d_succ);
  const double rest = 1.0 - m.p_tag;
  if (rest > 0.0) {
    const double other_succ = dist.p_any_success() - m.p_tag;
    const std::pair<double, Micros> atoms[] = {
        {dist.p_idle, dist.d_idle}, {other_succ, dist.d_succ}, {dist.p_coll, dist.d_coll}};
    stats::CompensatedSum total;
    for (const auto& [p, d] : atoms) total.add(std::max(0.0, p));
    for (const auto& [p, d] : atoms) {
      if (p > 0.0) m.other_slots.push_back({static_cast<double>(d), p / total.value()});
    }
  }
  m.validate();
  return m;
}

IncrementMoments increment_moments(const IncrementModel& model) {
  model.validate();
  const double p = model.p_tag;
  double ed = 0.0;
  double ed2 = 0.0;
  for (const auto& a : model.other_slots) {
    ed += a.probability * a.value_us;
    ed2 += a.probability * a.value_us * a.value_us;
  }
  const double var_d = std::max(0.0, ed2 - ed * ed);
  // N = G - 1 non-tagged slots before the success: E[N] = (1-p)/p,
  // Var[N] = (1-p)/p^2.
  const double en = (1.0 - p) / p;
  const double vn = (1.0 - p) / (p * p);
  return {en * ed + model.d_succ, en * var_d + vn * ed * ed};
}

double theta_max(const IncrementModel& model) {
  model.validate();
  if (model.p_tag >= 1.0) return kInf;
  const double log_rest = std::log1p(-model.p_tag);
  auto g = [&](double theta) { return log_rest + log_mgf_slots(model, theta); };
  double lo = 0.0;
  double hi = 1e-6;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return lo;
}

double log_mgf(const IncrementModel& model, double theta) {
  model.validate();
  if (theta == 0.0) return 0.0;
  if (model.p_tag >= 1.0) return theta * model.d_succ;
  // With y = (1-p)/p * (M_D - 1), Lambda = theta d_succ - ln(1 - y). M_D - 1
  // is summed through expm1 so small theta keeps full relative precision.
  double md_minus_one = 0.0;
  for (const auto& a : model.other_slots) md_minus_one += a.probability * std::expm1(theta * a.value_us);
  const double y = (1.0 - model.p_tag) / model.p_tag * md_minus_one;
  if (!(y < 1.0)) {
    fail(ErrorCode::divergence,
         fmt::format("theta={:.6g} /us outside the convergent range (theta_max={:.6g} /us)",
                     theta, theta_max(model)));
  }
  return theta * model.d_succ - std::log1p(-y);
}

StochasticServiceCurve service_curve(const IncrementModel& model, double theta, double eps) {
  require(theta > 0.0, "theta must be > 0");
  require(eps > 0.0 && eps < 1.0, "eps must be in (0, 1)");
  const double lambda = log_mgf(model, theta);
  StochasticServiceCurve sc;
  sc.theta = theta;
  sc.eps = eps;
  sc.rate_pps = theta / lambda * 1e6;
  sc.latency_s = std::log(1.0 / eps) / theta * 1e-6;
  return sc;
}

double envelope_time(const IncrementModel& model, double theta, double eps, double j) {
  require(theta > 0.0, "theta must be > 0");
  require(eps > 0.0 && eps <= 1.0, "eps must be in (0, 1]");
  return (j * log_mgf(model, theta) + std::log(1.0 / eps)) / theta;
}

ThetaOptimum optimize_theta(const IncrementModel& model, double eps, int horizon_j,
                            double theta_cap) {
  require(horizon_j >= 1, "horizon_j must be >= 1");
  require(eps > 0.0 && eps <= 1.0, "eps must be in (0, 1]");
  require(theta_cap > 0.0, "theta cap must be > 0");
  ThetaOptimum opt;
  opt.upper = std::min(0.999 * theta_max(model), theta_cap);
  const double lower = opt.upper * 1e-9;
  auto objective_log = [&](double log_theta) {
    return envelope_time(model, std::exp(log_theta), eps, horizon_j);
  };

  // Log-spaced pre-scan over (upper * 1e-9, upper].
  constexpr int kGrid = 64;
  const double a = std::log(lower);
  const double b = std::log(opt.upper);
  std::vector<double> xs(kGrid);
  std::vector<double> fs(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    xs[i] = a + (b - a) * i / (kGrid - 1);
    fs[i] = objective_log(xs[i]);
  }
  const auto best = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  // Unimodal: non-increasing up to the argmin, non-decreasing after it.
  const double slack = 1e-12;
  for (int i = 1; i < kGrid; ++i) {
    const double d = fs[i] - fs[i - 1];
    const double tol = slack * std::max(std::abs(fs[i]), 1.0);
    if ((i <= best && d > tol) || (i > best && d < -tol)) opt.unimodal = false;
  }
  if (!opt.unimodal) {
    fmt::print(stderr, "warning: envelope objective is not unimodal on the theta grid; "
                       "returning the grid argmin\n");
    opt.theta = std::exp(xs[best]);
    opt.envelope_us = fs[best];
    return opt;
  }

  double lo = xs[std::max(best - 1, 0)];
  double hi = xs[std::min(best + 1, kGrid - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective_log(x1);
  double f2 = objective_log(x2);
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective_log(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective_log(x2);
    }
  }
  double x = 0.5 * (lo + hi);
  double fx = objective_log(x);
  if (fs[best] < fx) {
    x = xs[best];
    fx = fs[best];
  }
  opt.theta = std::exp(x);
  opt.envelope_us = fx;
  return opt;
}

namespace {

void check_stability(const ArrivalEnvelope& arr, const StochasticServiceCurve& sc) {
  require(arr.sigma_b >= 0.0 && arr.rho_pps >= 0.0, "arrival envelope needs sigma, rho >= 0");
  require(sc.rate_pps > 0.0 && sc.latency_s >= 0.0, "service curve needs rate > 0, latency >= 0");
  if (!(arr.rho_pps < sc.rate_pps)) {
    fail(ErrorCode::instability,
         fmt::format("instability: arrival rate {:.6g} pkt/s is not below service rate {:.6g} pkt/s",
                     arr.rho_pps, sc.rate_pps));
  }
}

}  // namespace

double delay_bound(const ArrivalEnvelope& arrivals, const StochasticServiceCurve& sc) {
  check_stability(arrivals, sc);
  return sc.latency_s + arrivals.sigma_b / sc.rate_pps;
}

double backlog_bound(const ArrivalEnvelope& arrivals, const StochasticServiceCurve& sc) {
  check_stability(arrivals, sc);
  return arrivals.sigma_b + arrivals.rho_pps * sc.latency_s;
}

}  // namespace dcf
