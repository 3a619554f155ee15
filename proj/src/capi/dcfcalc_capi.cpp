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

#include "dcfcalc/dcfcalc.h"

#include <fstream>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "dcf_clock.hpp"
#include "error.hpp"
#include "estimator.hpp"
#include "fairness.hpp"
#include "mac_model.hpp"
#include "netcalc.hpp"
#include "simulator.hpp"
#include "trace_io.hpp"

struct dcf_pmf {
  dcf::ConditionalPmf pmf;
};

struct dcf_slot_trace {
  dcf::SlotTrace trace;
};

struct dcf_event_trace {
  std::vector<dcf::EventRecord> events;
};

struct dcf_owner_sequence {
  std::vector<dcf::OwnedSuccess> seq;
  std::vector<std::int32_t> owners;
};

struct dcf_sim_config {
  dcf::SimConfig config;
};

struct dcf_sim_result {
  dcf::SimResult result;  // traces moved out into the members below
  dcf_slot_trace slots;
  dcf_event_trace events;
};

struct dcf_clock {
  dcf::ClockTrace clock;
};

struct dcf_gps {
  dcf::GpsReference gps;
};

struct dcf_increment_model {
  dcf::IncrementModel model;
};

namespace {

thread_local std::string g_last_error;

dcf_status record(dcf_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
dcf_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return DCF_OK;
  } catch (const dcf::Error& e) {
    return record(static_cast<dcf_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return record(DCF_E_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return record(DCF_E_INTERNAL, e.what());
  } catch (...) {
    return record(DCF_E_INTERNAL, "unknown exception");
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) dcf::fail(dcf::ErrorCode::invalid_argument, std::string(name) + " is NULL");
}

dcf::MacParams to_core(const dcf_mac_params& p) {
  dcf::MacParams m;
  m.cw_min = p.cw_min;
  m.cw_max = p.cw_max;
  m.max_backoff_stage = p.max_backoff_stage;
  m.retry_limit = p.retry_limit;
  m.slot_sigma = p.slot_sigma_us;
  m.difs = p.difs_us;
  m.sifs = p.sifs_us;
  m.ack_dur = p.ack_dur_us;
  m.header_dur = p.header_dur_us;
  m.payload_dur = p.payload_dur_us;
  return m;
}

dcf_mac_params to_c(const dcf::MacParams& m) {
  return dcf_mac_params{m.cw_min,     m.cw_max, m.max_backoff_stage, m.retry_limit,
                        m.slot_sigma, m.difs,   m.sifs,              m.ack_dur,
                        m.header_dur, m.payload_dur};
}

dcf::SlotDistribution distribution(const double* tau, size_t n, const dcf_mac_params* params) {
  need(tau, "tau");
  need(params, "params");
  return dcf::slot_distribution(std::span<const double>(tau, n), to_core(*params));
}

// Stores the required count and reports a short buffer with its own status.
template <typename Fill>
dcf_status fill_buffer(size_t needed, void* out, size_t capacity, size_t* count, Fill&& fill) {
  if (count != nullptr) *count = needed;
  if (out == nullptr && count != nullptr) return DCF_OK;
  if (out == nullptr || capacity < needed) {
    return record(DCF_E_BUFFER_TOO_SMALL,
                  "buffer holds " + std::to_string(capacity) + " entries, " +
                      std::to_string(needed) + " required");
  }
  fill();
  return DCF_OK;
}

}  // namespace

extern "C" {

const char* dcf_version(void) { return "0.1.0"; }

const char* dcf_status_name(dcf_status status) {
  switch (status) {
    case DCF_OK: return "ok";
    case DCF_E_BUFFER_TOO_SMALL: return "buffer too small";
    case DCF_E_OUT_OF_MEMORY: return "out of memory";
    case DCF_E_INTERNAL: return "internal error";
    default: break;
  }
  if (status >= DCF_E_INVALID_ARGUMENT && status <= DCF_E_PARSE) {
    return dcf::to_string(static_cast<dcf::ErrorCode>(status));
  }
  return "unknown status";
}

const char* dcf_last_error(void) { return g_last_error.c_str(); }

// MAC model

void dcf_mac_params_default(dcf_mac_params* out) {
  if (out != nullptr) *out = to_c(dcf::MacParams{});
}

dcf_status dcf_mac_params_from_json(const char* json_text, dcf_mac_params* out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = to_c(dcf::mac_params_from_json(dcf::parse_json_text(json_text), dcf::MacParams{}, "mac"));
  });
}

dcf_status dcf_solve_attempt(const dcf_mac_params* params, int32_t n, double tol,
                             dcf_attempt_solution* out) {
  return guarded([&] {
    need(params, "params");
    need(out, "out");
    const double t = tol > 0.0 ? tol : dcf::kDefaultFixedPointTol;
    const auto s = dcf::solve_attempt_fixed_point(to_core(*params), n, t);
    *out = dcf_attempt_solution{s.n, s.tau, s.p_coll, s.residual};
  });
}

dcf_status dcf_solve_attempt_heterogeneous(const dcf_mac_params* params, size_t n, double tol,
                                           double* tau_out, double* p_coll_out) {
  return guarded([&] {
    need(params, "params");
    need(tau_out, "tau_out");
    std::vector<dcf::MacParams> p;
    for (size_t i = 0; i < n; ++i) p.push_back(to_core(params[i]));
    const auto s = dcf::solve_attempt_heterogeneous(p, tol > 0.0 ? tol : 1e-12);
    for (size_t i = 0; i < n; ++i) {
      tau_out[i] = s.tau[i];
      if (p_coll_out != nullptr) p_coll_out[i] = s.p_coll[i];
    }
  });
}

dcf_status dcf_slot_distribution(const double* tau, size_t n, const dcf_mac_params* params,
                                 double* p_succ_out, double* q_out, dcf_slot_summary* out) {
  return guarded([&] {
    need(out, "out");
    const auto d = distribution(tau, n, params);
    for (size_t i = 0; i < n; ++i) {
      if (p_succ_out != nullptr) p_succ_out[i] = d.p_succ[i];
      if (q_out != nullptr) q_out[i] = d.q[i];
    }
    *out = dcf_slot_summary{d.p_idle, d.p_coll, d.d_idle, d.d_succ, d.d_coll,
                            d.mean_slot_duration()};
  });
}

dcf_status dcf_saturation_throughput(const double* tau, size_t n, const dcf_mac_params* params,
                                     double payload_bits, double* bps_out) {
  return guarded([&] {
    need(bps_out, "bps_out");
    const auto s = dcf::saturation_throughput(distribution(tau, n, params), payload_bits);
    std::copy(s.begin(), s.end(), bps_out);
  });
}

// Fairness

dcf_status dcf_pmf_create(double q_tagged, double q_contender, int32_t l, double trunc_tol,
                          dcf_pmf** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    const double tol = trunc_tol > 0.0 ? trunc_tol : dcf::kDefaultTruncTol;
    *out = new dcf_pmf{dcf::conditional_pmf(q_tagged, q_contender, l, tol)};
  });
}

void dcf_pmf_destroy(dcf_pmf* pmf) { delete pmf; }
size_t dcf_pmf_length(const dcf_pmf* pmf) { return pmf ? pmf->pmf.pmf.size() : 0; }
const double* dcf_pmf_values(const dcf_pmf* pmf) { return pmf ? pmf->pmf.pmf.data() : nullptr; }
double dcf_pmf_beta(const dcf_pmf* pmf) { return pmf ? pmf->pmf.beta : 0.0; }
double dcf_pmf_tail_mass(const dcf_pmf* pmf) { return pmf ? pmf->pmf.tail_mass : 0.0; }
int32_t dcf_pmf_l(const dcf_pmf* pmf) { return pmf ? pmf->pmf.l : 0; }

dcf_status dcf_pmf_get_moments(const dcf_pmf* pmf, dcf_pmf_moments* out) {
  return guarded([&] {
    need(pmf, "pmf");
    need(out, "out");
    const auto m = dcf::pmf_moments(pmf->pmf);
    *out = dcf_pmf_moments{m.mean, m.variance, m.mean_from_pmf, m.variance_from_pmf};
  });
}

dcf_status dcf_jain_index(const double* x, size_t n, double* out) {
  return guarded([&] {
    need(x, "x");
    need(out, "out");
    *out = dcf::jain_index(std::span<const double>(x, n));
  });
}

dcf_status dcf_windowed_fairness(const int32_t* owners, size_t len, size_t window_len,
                                 int32_t stations, dcf_jain_summary* out) {
  return guarded([&] {
    need(owners, "owners");
    need(out, "out");
    const auto st = dcf::windowed_fairness(std::span<const int32_t>(owners, len), window_len,
                                           stations);
    *out = dcf_jain_summary{st.window_len, st.windows(), st.jain_mean, st.jain_p05, st.jain_p95};
  });
}

dcf_status dcf_short_term_horizon(const double* q, size_t n, int32_t tagged, int32_t contender,
                                  double delta, double eps, int32_t* l_out) {
  return guarded([&] {
    need(q, "q");
    need(l_out, "l_out");
    *l_out = dcf::short_term_horizon(std::span<const double>(q, n), tagged, contender, delta, eps);
  });
}

dcf_status dcf_conditional_histogram(const int32_t* owners, size_t len, int32_t tagged,
                                     int32_t contender, int32_t l, int64_t* counts,
                                     size_t capacity, size_t* count) {
  std::vector<std::int64_t> hist;
  const dcf_status st = guarded([&] {
    need(owners, "owners");
    hist = dcf::conditional_histogram(std::span<const int32_t>(owners, len), tagged, contender, l);
  });
  if (st != DCF_OK) return st;
  return fill_buffer(hist.size(), counts, capacity, count,
                     [&] { std::copy(hist.begin(), hist.end(), counts); });
}

dcf_status dcf_total_variation(const int64_t* counts, size_t len, const dcf_pmf* pmf,
                               double* out) {
  return guarded([&] {
    need(counts, "counts");
    need(pmf, "pmf");
    need(out, "out");
    *out = dcf::total_variation(std::span<const std::int64_t>(counts, len), pmf->pmf);
  });
}

// Traces

dcf_status dcf_slot_trace_read_csv(const char* path, dcf_slot_trace** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    std::ifstream f(path, std::ios::binary);
    if (!f) dcf::fail(dcf::ErrorCode::io, std::string("cannot open '") + path + "'");
    *out = new dcf_slot_trace{dcf::read_slot_trace_csv(f)};
  });
}

dcf_status dcf_slot_trace_write_csv(const dcf_slot_trace* trace, const char* path) {
  return guarded([&] {
    need(trace, "trace");
    need(path, "path");
    std::ofstream f(path, std::ios::binary);
    if (!f) dcf::fail(dcf::ErrorCode::io, std::string("cannot open '") + path + "' for writing");
    dcf::write_slot_trace_csv(f, trace->trace);
    if (!f) dcf::fail(dcf::ErrorCode::io, std::string("write to '") + path + "' failed");
  });
}

size_t dcf_slot_trace_size(const dcf_slot_trace* trace) { return trace ? trace->trace.size() : 0; }
void dcf_slot_trace_destroy(dcf_slot_trace* trace) { delete trace; }

dcf_status dcf_event_trace_read_csv(const char* path, dcf_event_trace** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    std::ifstream f(path, std::ios::binary);
    if (!f) dcf::fail(dcf::ErrorCode::io, std::string("cannot open '") + path + "'");
    *out = new dcf_event_trace{dcf::read_event_trace_csv(f)};
  });
}

dcf_status dcf_event_trace_write_csv(const dcf_event_trace* trace, const char* path) {
  return guarded([&] {
    need(trace, "trace");
    need(path, "path");
    std::ofstream f(path, std::ios::binary);
    if (!f) dcf::fail(dcf::ErrorCode::io, std::string("cannot open '") + path + "' for writing");
    dcf::write_event_trace_csv(f, trace->events);
    if (!f) dcf::fail(dcf::ErrorCode::io, std::string("write to '") + path + "' failed");
  });
}

size_t dcf_event_trace_size(const dcf_event_trace* trace) {
  return trace ? trace->events.size() : 0;
}

dcf_status dcf_event_trace_get(const dcf_event_trace* trace, size_t index,
                               dcf_event_record* out) {
  return guarded([&] {
    need(trace, "trace");
    need(out, "out");
    dcf::require(index < trace->events.size(), "event index out of range");
    const auto& e = trace->events[index];
    *out = dcf_event_record{e.station, e.packet_id, e.arrival_us, e.departure_us};
  });
}

void dcf_event_trace_destroy(dcf_event_trace* trace) { delete trace; }

dcf_status dcf_owner_sequence_from_slots(const dcf_slot_trace* trace, dcf_owner_sequence** out) {
  return guarded([&] {
    need(trace, "trace");
    need(out, "out");
    *out = nullptr;
    auto* s = new dcf_owner_sequence{dcf::success_sequence(trace->trace), {}};
    s->owners = dcf::owners_only(s->seq);
    *out = s;
  });
}

dcf_status dcf_owner_sequence_read_csv(const char* path, dcf_owner_sequence** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    std::ifstream f(path, std::ios::binary);
    if (!f) dcf::fail(dcf::ErrorCode::io, std::string("cannot open '") + path + "'");
    auto* s = new dcf_owner_sequence{dcf::read_owner_csv(f), {}};
    s->owners = dcf::owners_only(s->seq);
    *out = s;
  });
}

dcf_status dcf_owner_sequence_write_csv(const dcf_owner_sequence* seq, const char* path) {
  return guarded([&] {
    need(seq, "seq");
    need(path, "path");
    std::ofstream f(path, std::ios::binary);
    if (!f) dcf::fail(dcf::ErrorCode::io, std::string("cannot open '") + path + "' for writing");
    dcf::write_owner_csv(f, seq->seq);
  });
}

size_t dcf_owner_sequence_size(const dcf_owner_sequence* seq) {
  return seq ? seq->owners.size() : 0;
}
const int32_t* dcf_owner_sequence_owners(const dcf_owner_sequence* seq) {
  return seq ? seq->owners.data() : nullptr;
}
void dcf_owner_sequence_destroy(dcf_owner_sequence* seq) { delete seq; }

// Simulator

dcf_status dcf_sim_config_from_json(const char* json_text, dcf_sim_config** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = nullptr;
    *out = new dcf_sim_config{dcf::sim_config_from_json(dcf::parse_json_text(json_text))};
  });
}

dcf_status dcf_sim_config_homogeneous(const dcf_mac_params* params, int32_t n,
                                      int64_t horizon_slots, uint64_t seed,
                                      dcf_sim_config** out) {
  return guarded([&] {
    need(params, "params");
    need(out, "out");
    *out = nullptr;
    auto cfg = dcf::SimConfig::homogeneous(to_core(*params), n, dcf::Horizon::slots(horizon_slots),
                                           seed);
    cfg.validate();
    *out = new dcf_sim_config{std::move(cfg)};
  });
}

void dcf_sim_config_destroy(dcf_sim_config* config) { delete config; }

void dcf_sim_config_set_seed(dcf_sim_config* config, uint64_t seed) {
  if (config != nullptr) config->config.seed = seed;
}

uint64_t dcf_sim_config_seed(const dcf_sim_config* config) {
  return config ? config->config.seed : 0;
}

void dcf_sim_config_set_recording(dcf_sim_config* config, int slots, int events,
                                  int success_owners) {
  if (config == nullptr) return;
  config->config.record_slots = slots != 0;
  config->config.record_events = events != 0;
  config->config.record_success_owners = success_owners != 0;
}

int32_t dcf_sim_config_stations(const dcf_sim_config* config) {
  return config ? config->config.n() : 0;
}

double dcf_sim_config_payload_bits(const dcf_sim_config* config) {
  return config ? config->config.payload_bits : 0.0;
}

int dcf_sim_config_saturated(const dcf_sim_config* config) {
  return config != nullptr && config->config.mode == dcf::TrafficMode::saturated;
}

dcf_status dcf_sim_config_station_params(const dcf_sim_config* config, int32_t station,
                                         dcf_mac_params* out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    dcf::require(station >= 0 && station < config->config.n(), "station index out of range");
    *out = to_c(config->config.stations[static_cast<size_t>(station)]);
  });
}

dcf_status dcf_sim_run(const dcf_sim_config* config, dcf_sim_result** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = nullptr;
    auto* r = new dcf_sim_result{dcf::run(config->config), {}, {}};
    r->slots.trace = std::move(r->result.slots);
    r->events.events = std::move(r->result.events);
    *out = r;
  });
}

void dcf_sim_result_destroy(dcf_sim_result* result) { delete result; }

dcf_status dcf_sim_result_totals(const dcf_sim_result* result, dcf_sim_totals* out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    const auto& r = result->result;
    *out = dcf_sim_totals{r.total_slots,         r.idle_slots,
                          r.success_slots,       r.collision_slots,
                          r.total_time_us,       r.total_throughput_bps(),
                          r.aggregate_collision_probability()};
  });
}

dcf_status dcf_sim_result_station(const dcf_sim_result* result, int32_t station,
                                  dcf_station_counters* out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    const auto& r = result->result;
    dcf::require(station >= 0 && static_cast<size_t>(station) < r.stations.size(),
                 "station index out of range");
    const auto& c = r.stations[static_cast<size_t>(station)];
    *out = dcf_station_counters{c.attempts,
                                c.successes,
                                c.collisions,
                                c.drops,
                                c.arrivals,
                                c.queue_remainder,
                                r.attempt_frequency(station),
                                r.collision_probability(station),
                                r.throughput_bps(station)};
  });
}

const dcf_slot_trace* dcf_sim_result_slot_trace(const dcf_sim_result* result) {
  return result ? &result->slots : nullptr;
}

const dcf_event_trace* dcf_sim_result_event_trace(const dcf_sim_result* result) {
  return result ? &result->events : nullptr;
}

dcf_status dcf_replicate(const dcf_sim_config* config, int32_t reps, const char* statistic,
                         int32_t jobs, double* out) {
  return guarded([&] {
    need(config, "config");
    need(statistic, "statistic");
    need(out, "out");
    const auto stat = dcf::named_statistic(statistic);
    dcf::SimConfig c = config->config;
    c.record_slots = false;
    c.record_events = false;
    c.record_success_owners = false;
    const auto v = dcf::replicate(c, reps, stat, jobs);
    std::copy(v.begin(), v.end(), out);
  });
}

// Clock and GPS

dcf_status dcf_clock_from_slots(const dcf_slot_trace* trace, int32_t tagged,
                                double fair_increment_us, dcf_clock** out) {
  return guarded([&] {
    need(trace, "trace");
    need(out, "out");
    *out = nullptr;
    *out = new dcf_clock{dcf::dcf_clock(trace->trace.records(), tagged, fair_increment_us)};
  });
}

void dcf_clock_destroy(dcf_clock* clock) { delete clock; }
size_t dcf_clock_size(const dcf_clock* clock) { return clock ? clock->clock.size() : 0; }
const int64_t* dcf_clock_departures(const dcf_clock* clock) {
  return clock ? clock->clock.departures.data() : nullptr;
}
const int64_t* dcf_clock_increments(const dcf_clock* clock) {
  return clock ? clock->clock.increments.data() : nullptr;
}
const double* dcf_clock_errors(const dcf_clock* clock) {
  return clock ? clock->clock.errors.data() : nullptr;
}

dcf_status dcf_clock_write_csv(const dcf_clock* clock, const char* path) {
  return guarded([&] {
    need(clock, "clock");
    need(path, "path");
    std::string out = "j,T_j,I_j,e_j\n";
    const auto& c = clock->clock;
    for (size_t j = 0; j < c.size(); ++j) {
      out += std::to_string(j + 1) + ',' + std::to_string(c.departures[j]) + ',' +
             std::to_string(c.increments[j]) + ',' + dcf::format_double(c.errors[j]) + '\n';
    }
    dcf::write_text_file(path, out);
  });
}

dcf_status dcf_gps_compute(size_t stations, const size_t* counts, const double* times_us,
                           const double* sizes_bits, const double* weights, double capacity_bps,
                           dcf_gps** out) {
  return guarded([&] {
    need(counts, "counts");
    need(weights, "weights");
    need(out, "out");
    *out = nullptr;
    std::vector<std::vector<dcf::PacketArrival>> arrivals(stations);
    size_t offset = 0;
    for (size_t i = 0; i < stations; ++i) {
      if (counts[i] > 0) {
        need(times_us, "times_us");
        need(sizes_bits, "sizes_bits");
      }
      for (size_t k = 0; k < counts[i]; ++k, ++offset) {
        arrivals[i].push_back({times_us[offset], sizes_bits[offset]});
      }
    }
    *out = new dcf_gps{dcf::gps_finish_times(arrivals, std::span<const double>(weights, stations),
                                             capacity_bps)};
  });
}

dcf_status dcf_gps_matched_saturated(int32_t n, size_t packets, double payload_bits,
                                     double per_station_bps, dcf_gps** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = new dcf_gps{dcf::matched_saturated_gps(n, packets, payload_bits, per_station_bps)};
  });
}

void dcf_gps_destroy(dcf_gps* gps) { delete gps; }

size_t dcf_gps_packets(const dcf_gps* gps, int32_t station) {
  if (gps == nullptr || station < 0 ||
      static_cast<size_t>(station) >= gps->gps.finish_times.size()) {
    return 0;
  }
  return gps->gps.finish_times[static_cast<size_t>(station)].size();
}

const double* dcf_gps_finish_times(const dcf_gps* gps, int32_t station) {
  if (gps == nullptr || station < 0 ||
      static_cast<size_t>(station) >= gps->gps.finish_times.size()) {
    return nullptr;
  }
  return gps->gps.finish_times[static_cast<size_t>(station)].data();
}

dcf_status dcf_clock_vs_gps(const dcf_clock* clock, const dcf_gps* gps, int32_t tagged,
                            dcf_deviation_summary* out) {
  return guarded([&] {
    need(clock, "clock");
    need(gps, "gps");
    need(out, "out");
    const auto s = dcf::clock_vs_gps(clock->clock, gps->gps, tagged);
    *out = dcf_deviation_summary{s.packets, s.mean, s.p05, s.p50, s.p95, s.max_abs};
  });
}

// Service curve

dcf_status dcf_increment_model_create(double p_tag, const double* values_us,
                                      const double* probabilities, size_t count,
                                      double d_succ_us, dcf_increment_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    dcf::IncrementModel m;
    m.p_tag = p_tag;
    m.d_succ = d_succ_us;
    if (count > 0) {
      need(values_us, "values_us");
      need(probabilities, "probabilities");
    }
    for (size_t i = 0; i < count; ++i) m.other_slots.push_back({values_us[i], probabilities[i]});
    m.validate();
    *out = new dcf_increment_model{std::move(m)};
  });
}

dcf_status dcf_increment_model_from_tau(const double* tau, size_t n, const dcf_mac_params* params,
                                        int32_t tagged, dcf_increment_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = new dcf_increment_model{dcf::increment_model(distribution(tau, n, params), tagged)};
  });
}

void dcf_increment_model_destroy(dcf_increment_model* model) { delete model; }

double dcf_increment_model_p_tag(const dcf_increment_model* model) {
  return model ? model->model.p_tag : 0.0;
}

dcf_status dcf_increment_moments(const dcf_increment_model* model, double* mean_us,
                                 double* variance_us2) {
  return guarded([&] {
    need(model, "model");
    const auto m = dcf::increment_moments(model->model);
    if (mean_us != nullptr) *mean_us = m.mean;
    if (variance_us2 != nullptr) *variance_us2 = m.variance;
  });
}

dcf_status dcf_theta_max(const dcf_increment_model* model, double* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = dcf::theta_max(model->model);
  });
}

dcf_status dcf_log_mgf(const dcf_increment_model* model, double theta, double* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = dcf::log_mgf(model->model, theta);
  });
}

dcf_status dcf_service_curve_compute(const dcf_increment_model* model, double theta, double eps,
                                     dcf_service_curve* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const auto sc = dcf::service_curve(model->model, theta, eps);
    *out = dcf_service_curve{sc.rate_pps, sc.latency_s, sc.eps, sc.theta};
  });
}

dcf_status dcf_envelope_time(const dcf_increment_model* model, double theta, double eps,
                             double j, double* out_us) {
  return guarded([&] {
    need(model, "model");
    need(out_us, "out_us");
    *out_us = dcf::envelope_time(model->model, theta, eps, j);
  });
}

dcf_status dcf_optimize_theta(const dcf_increment_model* model, double eps, int32_t horizon_j,
                              double theta_cap, dcf_theta_optimum* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const auto o = dcf::optimize_theta(model->model, eps, horizon_j,
                                       theta_cap > 0.0 ? theta_cap : dcf::kDefaultThetaCap);
    *out = dcf_theta_optimum{o.theta, o.envelope_us, o.upper, o.unimodal ? 1 : 0};
  });
}

namespace {

dcf::StochasticServiceCurve to_core(const dcf_service_curve& c) {
  return {c.rate_pps, c.latency_s, c.eps, c.theta};
}

}  // namespace

dcf_status dcf_delay_bound(const dcf_arrival_envelope* arrivals, const dcf_service_curve* curve,
                           double* out_s) {
  return guarded([&] {
    need(arrivals, "arrivals");
    need(curve, "curve");
    need(out_s, "out_s");
    *out_s = dcf::delay_bound({arrivals->sigma_b, arrivals->rho_pps}, to_core(*curve));
  });
}

dcf_status dcf_backlog_bound(const dcf_arrival_envelope* arrivals, const dcf_service_curve* curve,
                             double* out_packets) {
  return guarded([&] {
    need(arrivals, "arrivals");
    need(curve, "curve");
    need(out_packets, "out_packets");
    *out_packets = dcf::backlog_bound({arrivals->sigma_b, arrivals->rho_pps}, to_core(*curve));
  });
}

// Estimator

dcf_status dcf_detect_busy_periods(const dcf_event_trace* trace, int32_t station,
                                   dcf_busy_period* out, size_t capacity, size_t* count) {
  std::vector<dcf::BusyPeriod> periods;
  const dcf_status st = guarded([&] {
    need(trace, "trace");
    periods = dcf::detect_busy_periods(dcf::station_events(trace->events, station));
  });
  if (st != DCF_OK) return st;
  return fill_buffer(periods.size(), out, capacity, count, [&] {
    for (size_t i = 0; i < periods.size(); ++i) {
      out[i] = dcf_busy_period{periods[i].start_us, periods[i].end_us, periods[i].departures};
    }
  });
}

dcf_status dcf_estimate_fair_rate(const dcf_event_trace* trace, int32_t station,
                                  size_t min_period_departures, dcf_rate_estimate* out) {
  return guarded([&] {
    need(trace, "trace");
    need(out, "out");
    const auto e = dcf::estimate_fair_rate(
        dcf::station_events(trace->events, station),
        min_period_departures > 0 ? min_period_departures : dcf::kDefaultMinPeriodDepartures);
    *out = dcf_rate_estimate{e.rate_pps,      e.stderr_pps,           e.ci95_low,
                             e.ci95_high,     e.samples,              e.busy_fraction,
                             e.lag1_autocorrelation, e.ratio_rate_pps};
  });
}

dcf_status dcf_convergence_report(const dcf_event_trace* trace, int32_t station,
                                  const size_t* sample_counts, size_t n,
                                  size_t min_period_departures, dcf_convergence_row* out) {
  return guarded([&] {
    need(trace, "trace");
    need(sample_counts, "sample_counts");
    need(out, "out");
    const auto rows = dcf::convergence_report(
        dcf::station_events(trace->events, station), std::span<const size_t>(sample_counts, n),
        min_period_departures > 0 ? min_period_departures : dcf::kDefaultMinPeriodDepartures);
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out[i] = dcf_convergence_row{r.requested, r.used, r.truncated ? 1 : 0,
                                   r.rate_pps,  r.ci_width_pps, r.ratio_rate_pps};
    }
  });
}

}  // extern "C"
