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

#include "simulator.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <exception>
#include <fmt/format.h>
#include <limits>
#include <mutex>
#include <thread>

#include "error.hpp"
#include "rng.hpp"

namespace dcf {

SimConfig SimConfig::homogeneous(const MacParams& params, int n, Horizon horizon,
                                 std::uint64_t seed) {
  SimConfig c;
  c.stations.assign(static_cast<std::size_t>(std::max(n, 0)), params);
  c.horizon = horizon;
  c.seed = seed;
  return c;
}

void SimConfig::validate() const {
  require(!stations.empty(), "simulation needs at least one station");
  require(stations.size() < 65536, "station count must be < 65536");
  for (const auto& s : stations) s.validate();
  for (const auto& s : stations) {
    require(s.slot_sigma == stations.front().slot_sigma && s.difs == stations.front().difs,
            "all stations must share slot_sigma and difs");
  }
  require(horizon.value > 0, "horizon must be > 0");
  if (mode == TrafficMode::poisson) {
    require(lambda_pps.size() == stations.size(),
            fmt::format("poisson mode needs one rate per station ({} given, {} stations)",
                        lambda_pps.size(), stations.size()));
    for (double l : lambda_pps) require(l >= 0.0, "arrival rates must be >= 0");
  }
  require(payload_bits > 0.0, "payload_bits must be > 0");
}

void SlotTrace::add_idle(Micros start, Micros duration) {
  records_.push_back(SlotRecord{start, static_cast<std::int32_t>(duration), -1, 0, 0,
                                SlotOutcome::idle});
}

void SlotTrace::add_success(Micros start, Micros duration, int owner) {
  records_.push_back(SlotRecord{start, static_cast<std::int32_t>(duration), owner, 0, 0,
                                SlotOutcome::success});
}

void SlotTrace::add_collision(Micros start, Micros duration, std::span<const int> colliders) {
  require(colliders.size() >= 2, "a collision needs at least two members");
  SlotRecord r{start,
               static_cast<std::int32_t>(duration),
               -1,
               static_cast<std::uint32_t>(collider_pool_.size()),
               static_cast<std::uint16_t>(colliders.size()),
               SlotOutcome::collision};
  collider_pool_.insert(collider_pool_.end(), colliders.begin(), colliders.end());
  records_.push_back(r);
}

bool operator==(const SlotRecord& a, const SlotRecord& b) {
  return a.wallclock_start == b.wallclock_start && a.duration == b.duration &&
         a.owner == b.owner && a.colliders_count == b.colliders_count && a.outcome == b.outcome;
}

bool SlotTrace::operator==(const SlotTrace& other) const {
  if (records_.size() != other.records_.size()) return false;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!(records_[i] == other.records_[i])) return false;
    auto a = colliders(records_[i]);
    auto b = other.colliders(other.records_[i]);
    if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) return false;
  }
  return true;
}

double SimResult::attempt_frequency(int station) const {
  return total_slots ? static_cast<double>(stations.at(station).attempts) / total_slots : 0.0;
}

double SimResult::collision_probability(int station) const {
  const auto& s = stations.at(station);
  return s.attempts ? static_cast<double>(s.collisions) / s.attempts : 0.0;
}

double SimResult::aggregate_collision_probability() const {
  std::int64_t a = 0, c = 0;
  for (const auto& s : stations) {
    a += s.attempts;
    c += s.collisions;
  }
  return a ? static_cast<double>(c) / a : 0.0;
}

double SimResult::throughput_bps(int station) const {
  if (total_time_us <= 0) return 0.0;
  return static_cast<double>(stations.at(station).successes) * payload_bits /
         static_cast<double>(total_time_us) * 1e6;
}

double SimResult::total_throughput_bps() const {
  double s = 0.0;
  for (int i = 0; i < static_cast<int>(stations.size()); ++i) s += throughput_bps(i);
  return s;
}

namespace {

struct QueuedPacket {
  std::int64_t id;
  double arrival_us;
};

struct StationState {
  CounterRng backoff_rng;
  CounterRng arrival_rng;
  std::deque<QueuedPacket> queue;
  std::int64_t next_packet_id = 0;
  double next_arrival_us = 0.0;
  int stage = 0;
  int attempts_this_packet = 0;
  std::int64_t counter = 0;
};

class Engine {
 public:
  explicit Engine(const SimConfig& config) : cfg_(config), n_(config.n()) {
    states_.reserve(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      states_.push_back(StationState{
          CounterRng::for_station(cfg_.seed, static_cast<std::uint64_t>(i),
                                  StreamPurpose::backoff),
          CounterRng::for_station(cfg_.seed, static_cast<std::uint64_t>(i),
                                  StreamPurpose::arrivals),
          {}});
    }
    result_.stations.resize(static_cast<std::size_t>(n_));
    result_.payload_bits = cfg_.payload_bits;
    transmitters_.reserve(static_cast<std::size_t>(n_));
  }

  SimResult run() {
    for (int i = 0; i < n_; ++i) {
      if (cfg_.mode == TrafficMode::saturated) {
        enqueue(i, 0.0);
      } else {
        schedule_next_arrival(i, 0.0);
      }
    }
    if (cfg_.record_slots && cfg_.horizon.kind == Horizon::Kind::slots) {
      result_.slots.reserve(static_cast<std::size_t>(cfg_.horizon.value));
    }

    Micros now = 0;
    std::int64_t slot = 0;
    const Micros sigma = cfg_.stations.front().slot_sigma;
    while (!done(slot, now)) {
      if (cfg_.mode == TrafficMode::poisson) admit_arrivals(now);

      transmitters_.clear();
      for (int i = 0; i < n_; ++i) {
        if (!states_[i].queue.empty() && states_[i].counter == 0) transmitters_.push_back(i);
      }

      Micros duration = 0;
      if (transmitters_.empty()) {
        duration = sigma;
        ++result_.idle_slots;
        if (cfg_.record_slots) result_.slots.add_idle(now, duration);
      } else if (transmitters_.size() == 1) {
        const int owner = transmitters_.front();
        duration = cfg_.stations[owner].success_duration();
        ++result_.success_slots;
        if (cfg_.record_slots) result_.slots.add_success(now, duration, owner);
        if (cfg_.record_success_owners) result_.success_owners.push_back(owner);
        on_success(owner, now + duration, duration);
      } else {
        for (int i : transmitters_) {
          duration = std::max(duration, cfg_.stations[i].collision_duration());
        }
        ++result_.collision_slots;
        if (cfg_.record_slots) result_.slots.add_collision(now, duration, transmitters_);
        for (int i : transmitters_) on_collision(i, now + duration);
      }

      // Every backlogged station that did not transmit takes one decrement
      // per slot. Busy slots end with DIFS; the counter frozen during the
      // busy airtime resumes with one decrement at that boundary.
      for (int i = 0; i < n_; ++i) {
        auto& s = states_[i];
        if (!s.queue.empty() && s.counter > 0 && !transmitted(i)) --s.counter;
      }

      now += duration;
      ++slot;
    }

    result_.total_slots = slot;
    result_.total_time_us = now;
    for (int i = 0; i < n_; ++i) {
      result_.stations[i].queue_remainder = static_cast<std::int64_t>(states_[i].queue.size());
    }
    return std::move(result_);
  }

 private:
  bool done(std::int64_t slot, Micros now) const {
    return cfg_.horizon.kind == Horizon::Kind::slots ? slot >= cfg_.horizon.value
                                                    : now >= cfg_.horizon.value;
  }

  bool transmitted(int i) const {
    return std::find(transmitters_.begin(), transmitters_.end(), i) != transmitters_.end();
  }

  void draw_counter(int i) {
    auto& s = states_[i];
    const int w = cfg_.stations[i].window_at_stage(s.stage);
    s.counter = static_cast<std::int64_t>(s.backoff_rng.uniform_below(static_cast<std::uint64_t>(w)));
  }

  void enqueue(int i, double arrival_us) {
    auto& s = states_[i];
    const bool was_empty = s.queue.empty();
    s.queue.push_back(QueuedPacket{s.next_packet_id++, arrival_us});
    ++result_.stations[i].arrivals;
    if (was_empty) start_head_of_line(i);
  }

  // A new head-of-line packet always backs off from stage 0.
  void start_head_of_line(int i) {
    auto& s = states_[i];
    s.stage = 0;
    s.attempts_this_packet = 0;
    draw_counter(i);
  }

  void schedule_next_arrival(int i, double from_us) {
    const double rate = cfg_.lambda_pps[i];
    auto& s = states_[i];
    s.next_arrival_us = rate > 0.0 ? from_us + s.arrival_rng.exponential(rate) * 1e6
                                   : std::numeric_limits<double>::infinity();
  }

  // Poisson arrivals are admitted at the slot boundary at or after their
  // timestamp; the timestamp itself is kept for delay statistics.
  void admit_arrivals(Micros now) {
    const auto t = static_cast<double>(now);
    for (int i = 0; i < n_; ++i) {
      while (states_[i].next_arrival_us <= t) {
        const double a = states_[i].next_arrival_us;
        enqueue(i, a);
        schedule_next_arrival(i, a);
      }
    }
  }

  void finish_head_of_line(int i, Micros end) {
    auto& s = states_[i];
    s.queue.pop_front();
    if (cfg_.mode == TrafficMode::saturated) {
      enqueue(i, static_cast<double>(end));
    } else if (!s.queue.empty()) {
      start_head_of_line(i);
    }
  }

  void on_success(int i, Micros end, Micros duration) {
    auto& s = states_[i];
    auto& c = result_.stations[i];
    ++c.attempts;
    ++c.successes;
    c.success_airtime += duration;
    if (cfg_.record_events) {
      const QueuedPacket& p = s.queue.front();
      result_.events.push_back(EventRecord{i, p.id, p.arrival_us, static_cast<double>(end)});
    }
    finish_head_of_line(i, end);
  }

  void on_collision(int i, Micros end) {
    auto& s = states_[i];
    auto& c = result_.stations[i];
    ++c.attempts;
    ++c.collisions;
    ++s.attempts_this_packet;
    const int limit = cfg_.stations[i].retry_limit;
    if (limit > 0 && s.attempts_this_packet >= limit) {
      ++c.drops;
      finish_head_of_line(i, end);
      return;
    }
    ++s.stage;
    draw_counter(i);
  }

  const SimConfig& cfg_;
  int n_;
  std::vector<StationState> states_;
  std::vector<int> transmitters_;
  SimResult result_;
};

}  // namespace

SimResult run(const SimConfig& config) {
  config.validate();
  return Engine(config).run();
}

Statistic named_statistic(std::string_view name) {
  if (name == "total_throughput_bps") {
    return [](const SimResult& r) { return r.total_throughput_bps(); };
  }
  if (name == "station0_throughput_bps") {
    return [](const SimResult& r) { return r.throughput_bps(0); };
  }
  if (name == "collision_probability") {
    return [](const SimResult& r) { return r.aggregate_collision_probability(); };
  }
  if (name == "attempt_frequency") {
    return [](const SimResult& r) {
      double s = 0.0;
      for (int i = 0; i < static_cast<int>(r.stations.size()); ++i) s += r.attempt_frequency(i);
      return r.stations.empty() ? 0.0 : s / static_cast<double>(r.stations.size());
    };
  }
  if (name == "success_fraction") {
    return [](const SimResult& r) {
      return r.total_slots ? static_cast<double>(r.success_slots) / r.total_slots : 0.0;
    };
  }
  fail(ErrorCode::invalid_argument, fmt::format("unknown statistic '{}'", name));
}

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  jobs = std::clamp(jobs, 1, std::max(count, 1));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> replicate(const SimConfig& config, int reps, const Statistic& statistic,
                              int jobs) {
  require(reps >= 1, "reps must be >= 1");
  config.validate();
  std::vector<double> out(static_cast<std::size_t>(reps));
  parallel_for(reps, jobs, [&](int r) {
    SimConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(r);
    out[static_cast<std::size_t>(r)] = statistic(run(c));
  });
  return out;
}

std::vector<SimResult> replicate_runs(const SimConfig& config, int reps, int jobs) {
  require(reps >= 1, "reps must be >= 1");
  config.validate();
  std::vector<SimResult> out(static_cast<std::size_t>(reps));
  parallel_for(reps, jobs, [&](int r) {
    SimConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(r);
    out[static_cast<std::size_t>(r)] = run(c);
  });
  return out;
}

}  // namespace dcf
