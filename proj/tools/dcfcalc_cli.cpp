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

// dcfcalc command-line front end. Talks to the library only through the C
// API in <dcfcalc/dcfcalc.h>.

#include <dcfcalc/dcfcalc.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

extern char** environ;

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;

constexpr const char* kEnvPrefix = "DCFCALC_";

// Carries an exit code up to main.
struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void input_error(const std::string& msg) { throw CliError{kExitInput, msg}; }

int exit_code_for(dcf_status s) {
  switch (s) {
    case DCF_OK:
      return kExitOk;
    case DCF_E_INVALID_ARGUMENT:
    case DCF_E_PARSE:
    case DCF_E_IO:
    case DCF_E_MALFORMED_TRACE:
      return kExitInput;
    case DCF_E_BUFFER_TOO_SMALL:
    case DCF_E_OUT_OF_MEMORY:
    case DCF_E_INTERNAL:
      return kExitInternal;
    default:
      return kExitDomain;
  }
}

void check(dcf_status s) {
  if (s != DCF_OK) throw CliError{exit_code_for(s), dcf_last_error()};
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using SimConfigPtr = std::unique_ptr<dcf_sim_config, Deleter<dcf_sim_config, dcf_sim_config_destroy>>;
using SimResultPtr = std::unique_ptr<dcf_sim_result, Deleter<dcf_sim_result, dcf_sim_result_destroy>>;
using SlotTracePtr = std::unique_ptr<dcf_slot_trace, Deleter<dcf_slot_trace, dcf_slot_trace_destroy>>;
using EventTracePtr =
    std::unique_ptr<dcf_event_trace, Deleter<dcf_event_trace, dcf_event_trace_destroy>>;
using OwnersPtr =
    std::unique_ptr<dcf_owner_sequence, Deleter<dcf_owner_sequence, dcf_owner_sequence_destroy>>;
using PmfPtr = std::unique_ptr<dcf_pmf, Deleter<dcf_pmf, dcf_pmf_destroy>>;
using ClockPtr = std::unique_ptr<dcf_clock, Deleter<dcf_clock, dcf_clock_destroy>>;
using GpsPtr = std::unique_ptr<dcf_gps, Deleter<dcf_gps, dcf_gps_destroy>>;
using IncrementPtr =
    std::unique_ptr<dcf_increment_model, Deleter<dcf_increment_model, dcf_increment_model_destroy>>;

struct Options {
  std::string config;
  std::string out;
  std::string input;
  long long seed = -1;
  int jobs = 1;
  int reps = 1;
  bool plot_data = false;
};

// ---- configuration -------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) input_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) input_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) input_error("write failed for '" + path.string() + "'");
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// DCFCALC_SEED=7 sets "seed"; DCFCALC_MAC__CW_MIN=16 sets mac.cw_min.
// Values are read as JSON when they parse, as strings otherwise.
void apply_env_overrides(json& doc) {
  const std::string prefix = kEnvPrefix;
  std::vector<std::pair<std::string, std::string>> vars;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry = *e;
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    vars.emplace_back(entry.substr(prefix.size(), eq - prefix.size()), entry.substr(eq + 1));
  }
  std::sort(vars.begin(), vars.end());
  for (const auto& [name, value] : vars) {
    if (name.empty()) continue;
    std::vector<std::string> keys;
    std::size_t start = 0;
    while (true) {
      const auto pos = name.find("__", start);
      keys.push_back(lower(name.substr(start, pos - start)));
      if (pos == std::string::npos) break;
      start = pos + 2;
    }
    json* node = &doc;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
      if (!node->is_object()) input_error("environment " + prefix + name + ": path is not an object");
      node = &(*node)[keys[i]];
      if (node->is_null()) *node = json::object();
    }
    if (!node->is_object()) input_error("environment " + prefix + name + ": path is not an object");
    json parsed = json::parse(value, nullptr, false);
    (*node)[keys.back()] = parsed.is_discarded() ? json(value) : parsed;
  }
}

struct RunContext {
  Options opt;
  json doc;          // config after env and flag overrides
  json analysis;     // doc["analysis"] or {}
  SimConfigPtr sim;  // validated simulator config
  fs::path out_dir;
};

json default_demo_config() {
  return json{{"scenario", "demo"},
              {"n", 10},
              {"mode", "saturated"},
              {"horizon", {{"slots", 500000}}},
              {"seed", 1},
              {"record", {{"slots", true}, {"events", true}, {"success_owners", false}}}};
}

RunContext load_context(const Options& opt, bool config_required, const json* fallback = nullptr) {
  RunContext ctx;
  ctx.opt = opt;
  if (!opt.config.empty()) {
    const std::string text = read_file(opt.config);
    dcf_sim_config* probe = nullptr;
    // Syntax errors are reported with line and column by the library parser.
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) {
      check(dcf_sim_config_from_json(text.c_str(), &probe));
      input_error("invalid JSON in '" + opt.config + "'");
    }
    ctx.doc = std::move(parsed);
  } else if (fallback) {
    ctx.doc = *fallback;
  } else if (config_required) {
    input_error("--config is required");
  } else {
    ctx.doc = json::object();
  }
  if (!ctx.doc.is_object()) input_error("field '<root>': expected an object");
  apply_env_overrides(ctx.doc);
  if (opt.seed >= 0) ctx.doc["seed"] = static_cast<std::uint64_t>(opt.seed);
  ctx.analysis = ctx.doc.value("analysis", json::object());
  if (!ctx.analysis.is_object()) input_error("field 'analysis': expected an object");

  dcf_sim_config* cfg = nullptr;
  check(dcf_sim_config_from_json(ctx.doc.dump().c_str(), &cfg));
  ctx.sim.reset(cfg);

  std::string out = opt.out;
  if (out.empty()) out = ctx.doc.value("output_dir", std::string("."));
  ctx.out_dir = out;
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec || !fs::is_directory(ctx.out_dir)) {
    input_error("output directory '" + out + "' is not writable");
  }
  return ctx;
}

json section(const RunContext& ctx, const char* name, std::initializer_list<const char*> known) {
  json s = ctx.analysis.value(name, json::object());
  if (!s.is_object()) input_error(std::string("field 'analysis.") + name + "': expected an object");
  for (const auto& [key, value] : s.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) ==
        known.end()) {
      input_error(std::string("field 'analysis.") + name + "." + key + "': unknown field");
    }
  }
  return s;
}

template <typename T>
T field(const json& s, const char* section_name, const char* key, T fallback) {
  if (!s.contains(key)) return fallback;
  try {
    return s.at(key).get<T>();
  } catch (const json::exception&) {
    input_error(std::string("field 'analysis.") + section_name + "." + key + "': wrong type");
  }
}

int station_field(const RunContext& ctx, const json& s, const char* section_name, const char* key,
                  int fallback) {
  const int v = field<int>(s, section_name, key, fallback);
  const int n = dcf_sim_config_stations(ctx.sim.get());
  if (v < 0 || v >= n) {
    input_error(std::string("field 'analysis.") + section_name + "." + key + "': station " +
                std::to_string(v) + " does not exist (n = " + std::to_string(n) + ")");
  }
  return v;
}

fs::path input_file(const RunContext& ctx, const char* name) {
  if (ctx.opt.input.empty()) input_error(std::string("--input directory with ") + name + " is required");
  const fs::path p = fs::path(ctx.opt.input) / name;
  if (!fs::exists(p)) input_error("missing input '" + p.string() + "'");
  return p;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

std::string num(double v) {
  // Shortest round-trip text, shared with the JSON writer.
  return json(v).dump();
}

// ---- analytical model ----------------------------------------------------

struct Model {
  std::vector<dcf_mac_params> params;
  std::vector<double> tau;
  std::vector<double> p_coll;
  std::vector<double> p_succ;
  std::vector<double> q;
  std::vector<double> throughput_bps;
  dcf_slot_summary slots{};
  double payload_bits = 0.0;
  bool homogeneous = true;
};

bool same_params(const dcf_mac_params& a, const dcf_mac_params& b) {
  return a.cw_min == b.cw_min && a.cw_max == b.cw_max &&
         a.max_backoff_stage == b.max_backoff_stage && a.retry_limit == b.retry_limit &&
         a.slot_sigma_us == b.slot_sigma_us && a.difs_us == b.difs_us && a.sifs_us == b.sifs_us &&
         a.ack_dur_us == b.ack_dur_us && a.header_dur_us == b.header_dur_us &&
         a.payload_dur_us == b.payload_dur_us;
}

Model solve_model(const dcf_sim_config* sim) {
  Model m;
  const int n = dcf_sim_config_stations(sim);
  m.params.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) check(dcf_sim_config_station_params(sim, i, &m.params[i]));
  for (const auto& p : m.params) m.homogeneous = m.homogeneous && same_params(p, m.params.front());
  m.tau.resize(m.params.size());
  m.p_coll.resize(m.params.size());
  if (m.homogeneous) {
    dcf_attempt_solution s{};
    check(dcf_solve_attempt(&m.params.front(), n, 0.0, &s));
    std::fill(m.tau.begin(), m.tau.end(), s.tau);
    std::fill(m.p_coll.begin(), m.p_coll.end(), s.p_coll);
  } else {
    check(dcf_solve_attempt_heterogeneous(m.params.data(), m.params.size(), 0.0, m.tau.data(),
                                          m.p_coll.data()));
  }
  m.p_succ.resize(m.tau.size());
  m.q.resize(m.tau.size());
  m.throughput_bps.resize(m.tau.size());
  m.payload_bits = dcf_sim_config_payload_bits(sim);
  check(dcf_slot_distribution(m.tau.data(), m.tau.size(), &m.params.front(), m.p_succ.data(),
                              m.q.data(), &m.slots));
  check(dcf_saturation_throughput(m.tau.data(), m.tau.size(), &m.params.front(), m.payload_bits,
                                  m.throughput_bps.data()));
  return m;
}

IncrementPtr increment_for(const Model& m, int tagged) {
  dcf_increment_model* im = nullptr;
  check(dcf_increment_model_from_tau(m.tau.data(), m.tau.size(), &m.params.front(), tagged, &im));
  return IncrementPtr(im);
}

json model_json(const Model& m) {
  json stations = json::array();
  for (std::size_t i = 0; i < m.tau.size(); ++i) {
    auto im = increment_for(m, static_cast<int>(i));
    double mean = 0.0, var = 0.0;
    check(dcf_increment_moments(im.get(), &mean, &var));
    stations.push_back({{"station", i},
                        {"tau", m.tau[i]},
                        {"p_coll", m.p_coll[i]},
                        {"p_succ", m.p_succ[i]},
                        {"q", m.q[i]},
                        {"throughput_bps", m.throughput_bps[i]},
                        {"increment_mean_us", mean},
                        {"increment_variance_us2", var}});
  }
  double total = 0.0;
  for (double s : m.throughput_bps) total += s;
  return json{{"homogeneous", m.homogeneous},
              {"payload_bits", m.payload_bits},
              {"p_idle", m.slots.p_idle},
              {"p_coll", m.slots.p_coll},
              {"mean_slot_us", m.slots.mean_slot_us},
              {"d_idle_us", m.slots.d_idle_us},
              {"d_succ_us", m.slots.d_succ_us},
              {"d_coll_us", m.slots.d_coll_us},
              {"total_throughput_bps", total},
              {"stations", stations}};
}

// ---- commands ------------------------------------------------------------

json totals_json(const dcf_sim_result* res, int n) {
  dcf_sim_totals t{};
  check(dcf_sim_result_totals(res, &t));
  json stations = json::array();
  for (int i = 0; i < n; ++i) {
    dcf_station_counters c{};
    check(dcf_sim_result_station(res, i, &c));
    stations.push_back({{"station", i},
                        {"attempts", c.attempts},
                        {"successes", c.successes},
                        {"collisions", c.collisions},
                        {"drops", c.drops},
                        {"arrivals", c.arrivals},
                        {"queue_remainder", c.queue_remainder},
                        {"attempt_frequency", c.attempt_frequency},
                        {"collision_probability", c.collision_probability},
                        {"throughput_bps", c.throughput_bps}});
  }
  return json{{"slots", t.slots},
              {"idle_slots", t.idle_slots},
              {"success_slots", t.success_slots},
              {"collision_slots", t.collision_slots},
              {"total_time_us", t.total_time_us},
              {"total_throughput_bps", t.total_throughput_bps},
              {"collision_probability", t.collision_probability},
              {"stations", stations}};
}

json replication_summary(const dcf_sim_config* sim, int reps, int jobs) {
  json out = json::object();
  for (const char* stat : {"total_throughput_bps", "collision_probability"}) {
    std::vector<double> xs(static_cast<std::size_t>(reps));
    check(dcf_replicate(sim, reps, stat, jobs, xs.data()));
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= reps;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double se = reps > 1 ? std::sqrt(ss / (reps - 1) / reps) : 0.0;
    out[stat] = {{"mean", mean}, {"stderr", se}, {"values", xs}};
  }
  out["replications"] = reps;
  out["base_seed"] = dcf_sim_config_seed(sim);
  return out;
}

int cmd_simulate(RunContext& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  dcf_sim_result* raw = nullptr;
  check(dcf_sim_run(ctx.sim.get(), &raw));
  SimResultPtr res(raw);
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const json rec = ctx.doc.value("record", json::object());
  const int n = dcf_sim_config_stations(ctx.sim.get());
  json files = json::array();
  if (rec.value("slots", true)) {
    const auto* slots = dcf_sim_result_slot_trace(res.get());
    check(dcf_slot_trace_write_csv(slots, (ctx.out_dir / "slots.csv").string().c_str()));
    files.push_back("slots.csv");
    dcf_owner_sequence* seq = nullptr;
    check(dcf_owner_sequence_from_slots(slots, &seq));
    OwnersPtr owners(seq);
    check(dcf_owner_sequence_write_csv(owners.get(), (ctx.out_dir / "owners.csv").string().c_str()));
    files.push_back("owners.csv");
  }
  if (rec.value("events", true)) {
    check(dcf_event_trace_write_csv(dcf_sim_result_event_trace(res.get()),
                                    (ctx.out_dir / "events.csv").string().c_str()));
    files.push_back("events.csv");
  }

  json summary{{"scenario", ctx.doc.value("scenario", std::string())},
               {"seed", dcf_sim_config_seed(ctx.sim.get())},
               {"stations", n},
               {"saturated", dcf_sim_config_saturated(ctx.sim.get()) != 0},
               {"payload_bits", dcf_sim_config_payload_bits(ctx.sim.get())},
               {"files", files},
               {"totals", totals_json(res.get(), n)}};
  if (ctx.opt.reps > 1) summary["replicate"] = replication_summary(ctx.sim.get(), ctx.opt.reps, ctx.opt.jobs);
  write_json(ctx.out_dir / "summary.json", summary);
  // Wall-clock time changes run to run, so it lives apart from the summary.
  write_json(ctx.out_dir / "timing.json", json{{"runtime_s", runtime}});
  std::cout << "simulated " << summary["totals"]["slots"] << " slots, total throughput "
            << num(summary["totals"]["total_throughput_bps"].get<double>()) << " bit/s in "
            << runtime << " s\n";
  return kExitOk;
}

int cmd_model(RunContext& ctx) {
  const Model m = solve_model(ctx.sim.get());
  json report = model_json(m);
  report["scenario"] = ctx.doc.value("scenario", std::string());
  write_json(ctx.out_dir / "model.json", report);
  std::cout << "tau = " << num(m.tau.front()) << ", total throughput "
            << num(report["total_throughput_bps"].get<double>()) << " bit/s\n";
  return kExitOk;
}

std::vector<int> int_list(const json& s, const char* sec, const char* key, std::vector<int> fallback) {
  if (s.contains(key) && s.at(key).is_number_integer()) return {field<int>(s, sec, key, 0)};
  return field<std::vector<int>>(s, sec, key, std::move(fallback));
}

int cmd_fairness(RunContext& ctx) {
  const json s = section(ctx, "fairness",
                         {"tagged", "contender", "l", "trunc_tol", "window_lens", "delta", "eps"});
  const int n = dcf_sim_config_stations(ctx.sim.get());
  if (n < 2) input_error("field 'n': fairness analysis needs at least two stations");
  const int tagged = station_field(ctx, s, "fairness", "tagged", 0);
  const int contender = station_field(ctx, s, "fairness", "contender", tagged == 0 ? 1 : 0);
  if (tagged == contender) input_error("field 'analysis.fairness.contender': must differ from tagged");
  const auto ls = int_list(s, "fairness", "l", {1});
  const double tol = field<double>(s, "fairness", "trunc_tol", 0.0);
  const Model m = solve_model(ctx.sim.get());

  // Empirical side, when an owner trace is supplied.
  OwnersPtr owners;
  if (!ctx.opt.input.empty()) {
    const fs::path p = fs::path(ctx.opt.input) / "owners.csv";
    dcf_owner_sequence* seq = nullptr;
    if (fs::exists(p)) {
      check(dcf_owner_sequence_read_csv(p.string().c_str(), &seq));
    } else {
      dcf_slot_trace* st = nullptr;
      check(dcf_slot_trace_read_csv(input_file(ctx, "slots.csv").string().c_str(), &st));
      SlotTracePtr slots(st);
      check(dcf_owner_sequence_from_slots(slots.get(), &seq));
    }
    owners.reset(seq);
  }

  json report{{"tagged", tagged},
              {"contender", contender},
              {"q_tagged", m.q[tagged]},
              {"q_contender", m.q[contender]}};
  json pmfs = json::array();
  for (int l : ls) {
    dcf_pmf* raw = nullptr;
    check(dcf_pmf_create(m.q[tagged], m.q[contender], l, tol, &raw));
    PmfPtr pmf(raw);
    dcf_pmf_moments mo{};
    check(dcf_pmf_get_moments(pmf.get(), &mo));
    const double* v = dcf_pmf_values(pmf.get());
    const std::size_t len = dcf_pmf_length(pmf.get());
    std::string csv = "k,probability\n";
    for (std::size_t k = 0; k < len; ++k) csv += std::to_string(k) + "," + num(v[k]) + "\n";
    const std::string name = "pmf_l" + std::to_string(l) + ".csv";
    write_file(ctx.out_dir / name, csv);
    if (ctx.opt.plot_data) {
      fs::create_directories(ctx.out_dir / "plot");
      write_file(ctx.out_dir / "plot" / name, csv);
    }
    json entry{{"l", l},
               {"beta", dcf_pmf_beta(pmf.get())},
               {"k_max", len - 1},
               {"tail_mass", dcf_pmf_tail_mass(pmf.get())},
               {"mean", mo.mean},
               {"variance", mo.variance},
               {"file", name}};
    if (owners) {
      const std::size_t count = dcf_owner_sequence_size(owners.get());
      std::size_t hl = 0;
      dcf_status st = dcf_conditional_histogram(dcf_owner_sequence_owners(owners.get()), count,
                                                tagged, contender, l, nullptr, 0, &hl);
      if (st != DCF_E_BUFFER_TOO_SMALL) check(st);
      std::vector<std::int64_t> hist(hl);
      check(dcf_conditional_histogram(dcf_owner_sequence_owners(owners.get()), count, tagged,
                                      contender, l, hist.data(), hist.size(), &hl));
      std::int64_t blocks = 0;
      for (auto c : hist) blocks += c;
      if (blocks > 0) {
        double tv = 0.0;
        check(dcf_total_variation(hist.data(), hist.size(), pmf.get(), &tv));
        entry["empirical"] = {{"blocks", blocks}, {"total_variation", tv}, {"histogram", hist}};
      }
    }
    pmfs.push_back(entry);
  }
  report["pmf"] = pmfs;

  if (s.contains("delta") || s.contains("eps")) {
    const double delta = field<double>(s, "fairness", "delta", 0.5);
    const double eps = field<double>(s, "fairness", "eps", 0.05);
    std::int32_t l = 0;
    check(dcf_short_term_horizon(m.q.data(), m.q.size(), tagged, contender, delta, eps, &l));
    report["short_term_horizon"] = {{"delta", delta}, {"eps", eps}, {"l", l}};
  }

  if (owners) {
    const auto windows = int_list(s, "fairness", "window_lens", {10, 100, 1000, 10000});
    std::string table = "window_len,jain_mean,jain_p05,jain_p95\n";
    std::string plot = "window_len,jain_mean\n";
    json rows = json::array();
    for (int w : windows) {
      if (w < 1) input_error("field 'analysis.fairness.window_lens': entries must be >= 1");
      dcf_jain_summary js{};
      const dcf_status st = dcf_windowed_fairness(dcf_owner_sequence_owners(owners.get()),
                                                  dcf_owner_sequence_size(owners.get()),
                                                  static_cast<std::size_t>(w), n, &js);
      if (st != DCF_OK) {
        std::cerr << "dcfcalc: window_len " << w << " skipped: " << dcf_last_error() << "\n";
        continue;
      }
      table += std::to_string(w) + "," + num(js.mean) + "," + num(js.p05) + "," + num(js.p95) + "\n";
      plot += std::to_string(w) + "," + num(js.mean) + "\n";
      rows.push_back({{"window_len", w}, {"windows", js.windows}, {"jain_mean", js.mean},
                      {"jain_p05", js.p05}, {"jain_p95", js.p95}});
    }
    write_file(ctx.out_dir / "fairness_windows.csv", table);
    if (ctx.opt.plot_data) {
      fs::create_directories(ctx.out_dir / "plot");
      write_file(ctx.out_dir / "plot" / "jain_vs_window.csv", plot);
    }
    report["windows"] = rows;
  }
  write_json(ctx.out_dir / "fairness.json", report);
  std::cout << "fairness: beta = " << num(pmfs.front()["beta"].get<double>()) << "\n";
  return kExitOk;
}

int cmd_clock(RunContext& ctx) {
  const json s = section(ctx, "clock", {"tagged", "fair_increment_us"});
  const int tagged = station_field(ctx, s, "clock", "tagged", 0);
  const Model m = solve_model(ctx.sim.get());
  auto im = increment_for(m, tagged);
  double ei = 0.0, vi = 0.0;
  check(dcf_increment_moments(im.get(), &ei, &vi));
  const double fair = field<double>(s, "clock", "fair_increment_us", ei);

  dcf_slot_trace* st = nullptr;
  check(dcf_slot_trace_read_csv(input_file(ctx, "slots.csv").string().c_str(), &st));
  SlotTracePtr slots(st);
  dcf_clock* raw = nullptr;
  check(dcf_clock_from_slots(slots.get(), tagged, fair, &raw));
  ClockPtr clock(raw);
  check(dcf_clock_write_csv(clock.get(), (ctx.out_dir / "clock.csv").string().c_str()));

  const std::size_t J = dcf_clock_size(clock.get());
  const double* e = dcf_clock_errors(clock.get());
  double mean = 0.0;
  for (std::size_t j = 0; j < J; ++j) mean += e[j];
  mean /= static_cast<double>(J);
  double ss = 0.0;
  for (std::size_t j = 0; j < J; ++j) ss += (e[j] - mean) * (e[j] - mean);
  const double se = J > 1 ? std::sqrt(ss / static_cast<double>(J - 1) / static_cast<double>(J)) : 0.0;

  json report{{"tagged", tagged},
              {"packets", J},
              {"fair_increment_us", fair},
              {"model_increment_mean_us", ei},
              {"model_increment_variance_us2", vi},
              {"error_mean_us", mean},
              {"error_stderr_us", se},
              {"last_departure_us", dcf_clock_departures(clock.get())[J - 1]}};

  if (m.homogeneous && dcf_sim_config_saturated(ctx.sim.get())) {
    GpsPtr gps;
    dcf_gps* g = nullptr;
    check(dcf_gps_matched_saturated(static_cast<int>(m.tau.size()), J, m.payload_bits,
                                    m.throughput_bps[tagged], &g));
    gps.reset(g);
    dcf_deviation_summary d{};
    check(dcf_clock_vs_gps(clock.get(), gps.get(), tagged, &d));
    report["gps_deviation_us"] = {{"capacity_bps", m.throughput_bps[tagged] * m.tau.size()},
                                  {"mean", d.mean}, {"p05", d.p05}, {"p50", d.p50},
                                  {"p95", d.p95}, {"max_abs", d.max_abs}};
  }
  write_json(ctx.out_dir / "clock.json", report);
  std::cout << "clock: " << J << " packets, mean error " << num(mean) << " us\n";
  return kExitOk;
}

int cmd_servicecurve(RunContext& ctx) {
  const json s = section(ctx, "servicecurve", {"tagged", "eps", "j", "thetas", "arrival"});
  const int tagged = station_field(ctx, s, "servicecurve", "tagged", 0);
  const auto eps_list = field<std::vector<double>>(s, "servicecurve", "eps", {0.1, 0.01});
  const auto j_list = int_list(s, "servicecurve", "j", {10, 100});
  if (eps_list.empty() || j_list.empty()) {
    input_error("field 'analysis.servicecurve': eps and j must be non-empty");
  }
  const Model m = solve_model(ctx.sim.get());
  auto im = increment_for(m, tagged);
  double ei = 0.0, vi = 0.0, tmax = 0.0;
  check(dcf_increment_moments(im.get(), &ei, &vi));
  check(dcf_theta_max(im.get(), &tmax));

  std::vector<double> thetas = field<std::vector<double>>(s, "servicecurve", "thetas", {});
  if (thetas.empty()) {
    const double hi = std::isfinite(tmax) ? 0.999 * tmax : 1.0;
    constexpr int kPoints = 16;
    for (int i = 0; i < kPoints; ++i) thetas.push_back(hi * std::pow(1e-4, 1.0 - i / (kPoints - 1.0)));
  }

  std::string table = "theta,rate_pps,latency_s,eps\n";
  for (double eps : eps_list) {
    for (double th : thetas) {
      dcf_service_curve sc{};
      check(dcf_service_curve_compute(im.get(), th, eps, &sc));
      table += num(th) + "," + num(sc.rate_pps) + "," + num(sc.latency_s) + "," + num(eps) + "\n";
    }
  }
  write_file(ctx.out_dir / "servicecurve.csv", table);

  json optima = json::array();
  for (double eps : eps_list) {
    for (int j : j_list) {
      dcf_theta_optimum o{};
      check(dcf_optimize_theta(im.get(), eps, j, 0.0, &o));
      dcf_service_curve sc{};
      check(dcf_service_curve_compute(im.get(), o.theta, eps, &sc));
      optima.push_back({{"eps", eps}, {"j", j}, {"theta", o.theta}, {"envelope_us", o.envelope_us},
                        {"unimodal", o.unimodal != 0}, {"rate_pps", sc.rate_pps},
                        {"latency_s", sc.latency_s}});
    }
  }
  if (ctx.opt.plot_data) {
    fs::create_directories(ctx.out_dir / "plot");
    const int jmax = *std::max_element(j_list.begin(), j_list.end());
    const double eps = eps_list.front();
    std::string plot = "j,t_eps_us\n";
    for (int j = 1; j <= jmax; ++j) {
      dcf_theta_optimum o{};
      check(dcf_optimize_theta(im.get(), eps, j, 0.0, &o));
      plot += std::to_string(j) + "," + num(o.envelope_us) + "\n";
    }
    write_file(ctx.out_dir / "plot" / "envelope.csv", plot);
  }

  json report{{"tagged", tagged},
              {"increment_mean_us", ei},
              {"increment_variance_us2", vi},
              {"long_run_rate_pps", 1e6 / ei},
              {"theta_max", std::isfinite(tmax) ? json(tmax) : json("inf")},
              {"optima", optima}};

  if (s.contains("arrival")) {
    const json& a = s.at("arrival");
    if (!a.is_object() || !a.contains("sigma_b") || !a.contains("rho_pps")) {
      input_error("field 'analysis.servicecurve.arrival': expected {\"sigma_b\", \"rho_pps\"}");
    }
    dcf_arrival_envelope env{field<double>(a, "servicecurve.arrival", "sigma_b", 0.0),
                             field<double>(a, "servicecurve.arrival", "rho_pps", 0.0)};
    json bounds = json::array();
    for (const auto& o : optima) {
      dcf_service_curve sc{o["rate_pps"].get<double>(), o["latency_s"].get<double>(),
                           o["eps"].get<double>(), o["theta"].get<double>()};
      double d = 0.0, b = 0.0;
      check(dcf_delay_bound(&env, &sc, &d));
      check(dcf_backlog_bound(&env, &sc, &b));
      bounds.push_back({{"eps", sc.eps}, {"j", o["j"]}, {"delay_s", d}, {"backlog_packets", b}});
    }
    report["arrival"] = {{"sigma_b", env.sigma_b}, {"rho_pps", env.rho_pps}};
    report["bounds"] = bounds;
  }
  write_json(ctx.out_dir / "servicecurve.json", report);
  std::cout << "service curve: long-run rate " << num(1e6 / ei) << " pkt/s\n";
  return kExitOk;
}

int cmd_estimate(RunContext& ctx) {
  const json s = section(ctx, "estimate", {"station", "min_period_departures", "sample_counts"});
  const int station = station_field(ctx, s, "estimate", "station", 0);
  const int min_dep = field<int>(s, "estimate", "min_period_departures", 2);
  if (min_dep < 2) input_error("field 'analysis.estimate.min_period_departures': must be >= 2");
  const auto counts = field<std::vector<std::size_t>>(s, "estimate", "sample_counts",
                                                      {100, 1000, 10000, 100000});
  dcf_event_trace* raw = nullptr;
  check(dcf_event_trace_read_csv(input_file(ctx, "events.csv").string().c_str(), &raw));
  EventTracePtr events(raw);
  dcf_rate_estimate est{};
  check(dcf_estimate_fair_rate(events.get(), station, static_cast<std::size_t>(min_dep), &est));
  std::vector<dcf_convergence_row> rows(counts.size());
  if (!counts.empty()) {
    check(dcf_convergence_report(events.get(), station, counts.data(), counts.size(),
                                 static_cast<std::size_t>(min_dep), rows.data()));
  }
  json conv = json::array();
  std::string plot = "samples,ci_width_pps\n";
  for (const auto& r : rows) {
    conv.push_back({{"requested", r.requested}, {"used", r.used}, {"truncated", r.truncated != 0},
                    {"rate_pps", r.rate_pps}, {"ci_width_pps", r.ci_width_pps},
                    {"ratio_rate_pps", r.ratio_rate_pps}});
    plot += std::to_string(r.used) + "," + num(r.ci_width_pps) + "\n";
  }
  json report{{"station", station},
              {"rate_pps", est.rate_pps},
              {"stderr_pps", est.stderr_pps},
              {"ci95", {est.ci95_low, est.ci95_high}},
              {"samples", est.samples},
              {"busy_fraction", est.busy_fraction},
              {"lag1_autocorrelation", est.lag1_autocorrelation},
              {"ratio_rate_pps", est.ratio_rate_pps},
              {"convergence", conv}};
  if (dcf_sim_config_saturated(ctx.sim.get())) {
    const Model m = solve_model(ctx.sim.get());
    const double model_rate = m.throughput_bps[station] / m.payload_bits;
    report["model_rate_pps"] = model_rate;
    report["ci95_covers_model"] = est.ci95_low <= model_rate && model_rate <= est.ci95_high;
  }
  write_json(ctx.out_dir / "estimate.json", report);
  if (ctx.opt.plot_data) {
    fs::create_directories(ctx.out_dir / "plot");
    write_file(ctx.out_dir / "plot" / "ci_vs_samples.csv", plot);
  }
  std::cout << "estimate: " << num(est.rate_pps) << " pkt/s, ci95 [" << num(est.ci95_low) << ", "
            << num(est.ci95_high) << "]\n";
  return kExitOk;
}

int cmd_demo(const Options& opt) {
  const json base = default_demo_config();
  Options o = opt;
  if (o.out.empty()) o.out = "dcfcalc-demo";
  RunContext ctx = load_context(o, false, &base);
  const auto t0 = std::chrono::steady_clock::now();
  cmd_simulate(ctx);
  ctx.opt.input = ctx.out_dir.string();
  cmd_model(ctx);
  cmd_fairness(ctx);
  cmd_clock(ctx);
  cmd_servicecurve(ctx);
  cmd_estimate(ctx);
  std::cout << "demo finished in "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
            << " s, outputs in " << ctx.out_dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcfcalc: 802.11 DCF fairness, service-curve and estimation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dcf_version()));

  Options opt;
  auto common = [&](CLI::App* sub, bool needs_input) {
    sub->add_option("--config", opt.config, "JSON run configuration");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "override the configured seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--jobs", opt.jobs, "worker threads for replications")->check(CLI::PositiveNumber);
    sub->add_flag("--plot-data", opt.plot_data, "also write two-column CSVs for plotting");
    if (needs_input) sub->add_option("--input", opt.input, "directory holding simulator traces");
  };

  auto* simulate = app.add_subcommand("simulate", "run the slot-level simulator");
  common(simulate, false);
  simulate->add_option("--reps", opt.reps, "replications for summary statistics")
      ->check(CLI::PositiveNumber);
  auto* model = app.add_subcommand("model", "solve the analytical saturation model");
  common(model, false);
  auto* fairness = app.add_subcommand("fairness", "conditional fairness distribution and Jain index");
  common(fairness, true);
  auto* clock = app.add_subcommand("clock", "DCF clock and GPS comparison from a slot trace");
  common(clock, true);
  auto* servicecurve = app.add_subcommand("servicecurve", "stochastic service curve and bounds");
  common(servicecurve, false);
  auto* estimate = app.add_subcommand("estimate", "passive fair-rate estimate from an event trace");
  common(estimate, true);
  auto* demo = app.add_subcommand("demo", "small end-to-end pipeline");
  common(demo, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (demo->parsed()) return cmd_demo(opt);
    RunContext ctx = load_context(opt, true);
    if (simulate->parsed()) return cmd_simulate(ctx);
    if (model->parsed()) return cmd_model(ctx);
    if (fairness->parsed()) return cmd_fairness(ctx);
    if (clock->parsed()) return cmd_clock(ctx);
    if (servicecurve->parsed()) return cmd_servicecurve(ctx);
    if (estimate->parsed()) return cmd_estimate(ctx);
  } catch (const CliError& e) {
    std::cerr << "dcfcalc: error: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "dcfcalc: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
