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

/*
 * dcfcalc C API: fair-share calculus for the IEEE 802.11 DCF.
 *
 * Conventions
 *   - Every fallible call returns dcf_status; DCF_OK is 0. The message of the
 *     last failing call on the calling thread is available from
 *     dcf_last_error() until the next failing call on that thread.
 *   - Objects are opaque handles created by *_create / *_read_* / *_run and
 *     released by the matching *_destroy. Destroy functions accept NULL.
 *   - Handles returned by dcf_sim_result_*_trace() are borrowed: they stay
 *     valid while the owning result lives and must not be destroyed.
 *   - Durations are microseconds, rates are per second unless a name says
 *     otherwise, theta is in 1/us.
 *   - Buffers: functions that fill a caller array take (out, capacity,
 *     count). The required count is always stored; passing out = NULL or a
 *     short capacity returns DCF_E_BUFFER_TOO_SMALL except for pure queries
 *     with out = NULL, which return DCF_OK.
 */

#ifndef DCFCALC_DCFCALC_H
#define DCFCALC_DCFCALC_H

#include <stddef.h>
#include <stdint.h>

#if defined(DCF_BUILDING_LIBRARY)
#define DCF_API __attribute__((visibility("default")))
#else
#define DCF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dcf_status {
  DCF_OK = 0,
  DCF_E_INVALID_ARGUMENT = 1,
  DCF_E_SOLVER_FAILURE = 2,
  DCF_E_UNDEFINED_CONDITIONING = 3,
  DCF_E_TRUNCATION = 4,
  DCF_E_HORIZON_NOT_FOUND = 5,
  DCF_E_EMPTY_CLOCK = 6,
  DCF_E_ALIGNMENT = 7,
  DCF_E_DIVERGENCE = 8,
  DCF_E_INSTABILITY = 9,
  DCF_E_MALFORMED_TRACE = 10,
  DCF_E_NOT_ENOUGH_BACKLOG = 11,
  DCF_E_UNDEFINED_INDEX = 12,
  DCF_E_INTERNAL_CONSISTENCY = 13,
  DCF_E_IO = 14,
  DCF_E_PARSE = 15,
  DCF_E_BUFFER_TOO_SMALL = 16,
  DCF_E_OUT_OF_MEMORY = 17,
  DCF_E_INTERNAL = 99
} dcf_status;

DCF_API const char* dcf_version(void);
DCF_API const char* dcf_status_name(dcf_status status);
DCF_API const char* dcf_last_error(void);

/* ---- MAC model ---------------------------------------------------------- */

typedef struct dcf_mac_params {
  int32_t cw_min;
  int32_t cw_max;
  int32_t max_backoff_stage;
  int32_t retry_limit; /* 0 = never drop */
  int64_t slot_sigma_us;
  int64_t difs_us;
  int64_t sifs_us;
  int64_t ack_dur_us;
  int64_t header_dur_us;
  int64_t payload_dur_us;
} dcf_mac_params;

typedef struct dcf_attempt_solution {
  int32_t n;
  double tau;
  double p_coll;
  double residual;
} dcf_attempt_solution;

typedef struct dcf_slot_summary {
  double p_idle;
  double p_coll;
  int64_t d_idle_us;
  int64_t d_succ_us;
  int64_t d_coll_us;
  double mean_slot_us;
} dcf_slot_summary;

DCF_API void dcf_mac_params_default(dcf_mac_params* out);
/* Parses a JSON object with MacParams field names on top of the defaults. */
DCF_API dcf_status dcf_mac_params_from_json(const char* json_text, dcf_mac_params* out);

/* tol <= 0 selects the default 1e-12 (both solvers). */
DCF_API dcf_status dcf_solve_attempt(const dcf_mac_params* params, int32_t n, double tol,
                                     dcf_attempt_solution* out);
/* params, tau_out and p_coll_out have n entries. */
DCF_API dcf_status dcf_solve_attempt_heterogeneous(const dcf_mac_params* params, size_t n,
                                                   double tol, double* tau_out,
                                                   double* p_coll_out);
/* p_succ_out and q_out (either may be NULL) have n entries. */
DCF_API dcf_status dcf_slot_distribution(const double* tau, size_t n,
                                         const dcf_mac_params* params, double* p_succ_out,
                                         double* q_out, dcf_slot_summary* out);
/* Per-station throughput in bits/s for the given attempt probabilities. */
DCF_API dcf_status dcf_saturation_throughput(const double* tau, size_t n,
                                             const dcf_mac_params* params, double payload_bits,
                                             double* bps_out);

/* ---- Fairness ----------------------------------------------------------- */

typedef struct dcf_pmf dcf_pmf;

typedef struct dcf_pmf_moments {
  double mean;
  double variance;
  double mean_from_pmf;
  double variance_from_pmf;
} dcf_pmf_moments;

typedef struct dcf_jain_summary {
  size_t window_len;
  size_t windows;
  double mean;
  double p05;
  double p95;
} dcf_jain_summary;

/* P[K = k | l]; trunc_tol <= 0 selects the default 1e-9. */
DCF_API dcf_status dcf_pmf_create(double q_tagged, double q_contender, int32_t l,
                                  double trunc_tol, dcf_pmf** out);
DCF_API void dcf_pmf_destroy(dcf_pmf* pmf);
DCF_API size_t dcf_pmf_length(const dcf_pmf* pmf); /* k_max + 1 */
DCF_API const double* dcf_pmf_values(const dcf_pmf* pmf);
DCF_API double dcf_pmf_beta(const dcf_pmf* pmf);
DCF_API double dcf_pmf_tail_mass(const dcf_pmf* pmf);
DCF_API int32_t dcf_pmf_l(const dcf_pmf* pmf);
DCF_API dcf_status dcf_pmf_get_moments(const dcf_pmf* pmf, dcf_pmf_moments* out);

DCF_API dcf_status dcf_jain_index(const double* x, size_t n, double* out);
/* stations <= 0 infers max(owner) + 1. */
DCF_API dcf_status dcf_windowed_fairness(const int32_t* owners, size_t len, size_t window_len,
                                         int32_t stations, dcf_jain_summary* out);
DCF_API dcf_status dcf_short_term_horizon(const double* q, size_t n, int32_t tagged,
                                          int32_t contender, double delta, double eps,
                                          int32_t* l_out);
DCF_API dcf_status dcf_conditional_histogram(const int32_t* owners, size_t len, int32_t tagged,
                                             int32_t contender, int32_t l, int64_t* counts,
                                             size_t capacity, size_t* count);
DCF_API dcf_status dcf_total_variation(const int64_t* counts, size_t len, const dcf_pmf* pmf,
                                       double* out);

/* ---- Traces ------------------------------------------------------------- */

typedef struct dcf_slot_trace dcf_slot_trace;
typedef struct dcf_event_trace dcf_event_trace;
typedef struct dcf_owner_sequence dcf_owner_sequence;

typedef struct dcf_event_record {
  int32_t station;
  int64_t packet_id;
  double arrival_us;
  double departure_us;
} dcf_event_record;

DCF_API dcf_status dcf_slot_trace_read_csv(const char* path, dcf_slot_trace** out);
DCF_API dcf_status dcf_slot_trace_write_csv(const dcf_slot_trace* trace, const char* path);
DCF_API size_t dcf_slot_trace_size(const dcf_slot_trace* trace);
DCF_API void dcf_slot_trace_destroy(dcf_slot_trace* trace);

DCF_API dcf_status dcf_event_trace_read_csv(const char* path, dcf_event_trace** out);
DCF_API dcf_status dcf_event_trace_write_csv(const dcf_event_trace* trace, const char* path);
DCF_API size_t dcf_event_trace_size(const dcf_event_trace* trace);
DCF_API dcf_status dcf_event_trace_get(const dcf_event_trace* trace, size_t index,
                                       dcf_event_record* out);
DCF_API void dcf_event_trace_destroy(dcf_event_trace* trace);

/* Success-ownership sequence (CSV: slot_index,owner_id). */
DCF_API dcf_status dcf_owner_sequence_from_slots(const dcf_slot_trace* trace,
                                                 dcf_owner_sequence** out);
DCF_API dcf_status dcf_owner_sequence_read_csv(const char* path, dcf_owner_sequence** out);
DCF_API dcf_status dcf_owner_sequence_write_csv(const dcf_owner_sequence* seq, const char* path);
DCF_API size_t dcf_owner_sequence_size(const dcf_owner_sequence* seq);
DCF_API const int32_t* dcf_owner_sequence_owners(const dcf_owner_sequence* seq);
DCF_API void dcf_owner_sequence_destroy(dcf_owner_sequence* seq);

/* ---- Simulator ---------------------------------------------------------- */

typedef struct dcf_sim_config dcf_sim_config;
typedef struct dcf_sim_result dcf_sim_result;

typedef struct dcf_sim_totals {
  int64_t slots;
  int64_t idle_slots;
  int64_t success_slots;
  int64_t collision_slots;
  int64_t total_time_us;
  double total_throughput_bps;
  double collision_probability;
} dcf_sim_totals;

typedef struct dcf_station_counters {
  int64_t attempts;
  int64_t successes;
  int64_t collisions;
  int64_t drops;
  int64_t arrivals;
  int64_t queue_remainder;
  double attempt_frequency;
  double collision_probability;
  double throughput_bps;
} dcf_station_counters;

/* JSON document with SimConfig field names (see README for the schema). */
DCF_API dcf_status dcf_sim_config_from_json(const char* json_text, dcf_sim_config** out);
DCF_API dcf_status dcf_sim_config_homogeneous(const dcf_mac_params* params, int32_t n,
                                              int64_t horizon_slots, uint64_t seed,
                                              dcf_sim_config** out);
DCF_API void dcf_sim_config_destroy(dcf_sim_config* config);
DCF_API void dcf_sim_config_set_seed(dcf_sim_config* config, uint64_t seed);
DCF_API uint64_t dcf_sim_config_seed(const dcf_sim_config* config);
DCF_API void dcf_sim_config_set_recording(dcf_sim_config* config, int slots, int events,
                                          int success_owners);
DCF_API int32_t dcf_sim_config_stations(const dcf_sim_config* config);
DCF_API double dcf_sim_config_payload_bits(const dcf_sim_config* config);
/* Nonzero when every station runs saturated traffic. */
DCF_API int dcf_sim_config_saturated(const dcf_sim_config* config);
DCF_API dcf_status dcf_sim_config_station_params(const dcf_sim_config* config, int32_t station,
                                                 dcf_mac_params* out);

DCF_API dcf_status dcf_sim_run(const dcf_sim_config* config, dcf_sim_result** out);
DCF_API void dcf_sim_result_destroy(dcf_sim_result* result);
DCF_API dcf_status dcf_sim_result_totals(const dcf_sim_result* result, dcf_sim_totals* out);
DCF_API dcf_status dcf_sim_result_station(const dcf_sim_result* result, int32_t station,
                                          dcf_station_counters* out);
DCF_API const dcf_slot_trace* dcf_sim_result_slot_trace(const dcf_sim_result* result);
DCF_API const dcf_event_trace* dcf_sim_result_event_trace(const dcf_sim_result* result);

/* statistic: total_throughput_bps, station0_throughput_bps,
   collision_probability, attempt_frequency, success_fraction.
   out has reps entries, indexed by replication. */
DCF_API dcf_status dcf_replicate(const dcf_sim_config* config, int32_t reps,
                                 const char* statistic, int32_t jobs, double* out);

/* ---- DCF clock and GPS reference -------------------------------------- */

typedef struct dcf_clock dcf_clock;
typedef struct dcf_gps dcf_gps;

typedef struct dcf_deviation_summary {
  size_t packets;
  double mean;
  double p05;
  double p50;
  double p95;
  double max_abs;
} dcf_deviation_summary;

DCF_API dcf_status dcf_clock_from_slots(const dcf_slot_trace* trace, int32_t tagged,
                                        double fair_increment_us, dcf_clock** out);
DCF_API void dcf_clock_destroy(dcf_clock* clock);
DCF_API size_t dcf_clock_size(const dcf_clock* clock);
DCF_API const int64_t* dcf_clock_departures(const dcf_clock* clock);
DCF_API const int64_t* dcf_clock_increments(const dcf_clock* clock);
DCF_API const double* dcf_clock_errors(const dcf_clock* clock);
/* CSV: j,T_j,I_j,e_j */
DCF_API dcf_status dcf_clock_write_csv(const dcf_clock* clock, const char* path);

/* Arrivals are flattened station by station: counts[i] packets for station i,
   with times_us / sizes_bits holding sum(counts) entries. */
DCF_API dcf_status dcf_gps_compute(size_t stations, const size_t* counts, const double* times_us,
                                   const double* sizes_bits, const double* weights,
                                   double capacity_bps, dcf_gps** out);
DCF_API dcf_status dcf_gps_matched_saturated(int32_t n, size_t packets, double payload_bits,
                                             double per_station_bps, dcf_gps** out);
DCF_API void dcf_gps_destroy(dcf_gps* gps);
DCF_API size_t dcf_gps_packets(const dcf_gps* gps, int32_t station);
DCF_API const double* dcf_gps_finish_times(const dcf_gps* gps, int32_t station);
DCF_API dcf_status dcf_clock_vs_gps(const dcf_clock* clock, const dcf_gps* gps, int32_t tagged,
                                    dcf_deviation_summary* out);

/* ---- Stochastic service curve ----------------------------------------- */

typedef struct dcf_increment_model dcf_increment_model;

typedef struct dcf_service_curve {
  double rate_pps;
  double latency_s;
  double eps;
  double theta;
} dcf_service_curve;

typedef struct dcf_theta_optimum {
  double theta;
  double envelope_us;
  double upper;
  int32_t unimodal;
} dcf_theta_optimum;

typedef struct dcf_arrival_envelope {
  double sigma_b; /* packets */
  double rho_pps;
} dcf_arrival_envelope;

DCF_API dcf_status dcf_increment_model_create(double p_tag, const double* values_us,
                                              const double* probabilities, size_t count,
                                              double d_succ_us, dcf_increment_model** out);
/* Tagged station's increment model at the attempt probabilities tau. */
DCF_API dcf_status dcf_increment_model_from_tau(const double* tau, size_t n,
                                                const dcf_mac_params* params, int32_t tagged,
                                                dcf_increment_model** out);
DCF_API void dcf_increment_model_destroy(dcf_increment_model* model);
DCF_API double dcf_increment_model_p_tag(const dcf_increment_model* model);
DCF_API dcf_status dcf_increment_moments(const dcf_increment_model* model, double* mean_us,
                                         double* variance_us2);
DCF_API dcf_status dcf_theta_max(const dcf_increment_model* model, double* out);
DCF_API dcf_status dcf_log_mgf(const dcf_increment_model* model, double theta, double* out);
DCF_API dcf_status dcf_service_curve_compute(const dcf_increment_model* model, double theta,
                                             double eps, dcf_service_curve* out);
DCF_API dcf_status dcf_envelope_time(const dcf_increment_model* model, double theta,
                                     double eps, double j, double* out_us);
/* theta_cap <= 0 selects the default cap of 1 /us. */
DCF_API dcf_status dcf_optimize_theta(const dcf_increment_model* model, double eps,
                                      int32_t horizon_j, double theta_cap,
                                      dcf_theta_optimum* out);
DCF_API dcf_status dcf_delay_bound(const dcf_arrival_envelope* arrivals,
                                   const dcf_service_curve* curve, double* out_s);
DCF_API dcf_status dcf_backlog_bound(const dcf_arrival_envelope* arrivals,
                                     const dcf_service_curve* curve, double* out_packets);

/* ---- Passive estimator ------------------------------------------------ */

typedef struct dcf_busy_period {
  double start_us;
  double end_us;
  size_t departures;
} dcf_busy_period;

typedef struct dcf_rate_estimate {
  double rate_pps;
  double stderr_pps;
  double ci95_low;
  double ci95_high;
  size_t samples;
  double busy_fraction;
  double lag1_autocorrelation;
  double ratio_rate_pps;
} dcf_rate_estimate;

typedef struct dcf_convergence_row {
  size_t requested;
  size_t used;
  int32_t truncated;
  double rate_pps;
  double ci_width_pps;
  double ratio_rate_pps;
} dcf_convergence_row;

DCF_API dcf_status dcf_detect_busy_periods(const dcf_event_trace* trace, int32_t station,
                                           dcf_busy_period* out, size_t capacity,
                                           size_t* count);
/* min_period_departures = 0 selects the default of 2. */
DCF_API dcf_status dcf_estimate_fair_rate(const dcf_event_trace* trace, int32_t station,
                                          size_t min_period_departures, dcf_rate_estimate* out);
/* out has n entries, one per sample_counts entry. */
DCF_API dcf_status dcf_convergence_report(const dcf_event_trace* trace, int32_t station,
                                          const size_t* sample_counts, size_t n,
                                          size_t min_period_departures,
                                          dcf_convergence_row* out);

#ifdef __cplusplus
}
#endif

#endif /* DCFCALC_DCFCALC_H */
