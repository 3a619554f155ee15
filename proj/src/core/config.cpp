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

#include "config.hpp"

#include <fmt/format.h>
#include <set>

#include "error.hpp"

namespace dcf {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  fail(ErrorCode::parse, fmt::format("field '{}': {}", path, what));
}

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

template <typename T>
T get_integer(const json& j, const std::string& path, T min_value) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < static_cast<std::int64_t>(min_value)) {
    field_error(path, fmt::format("must be >= {} (got {})", min_value, v));
  }
  return static_cast<T>(v);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  return j.get<double>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) field_error(path, "expected true or false");
  return j.get<bool>();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) field_error(join_path(path, key), "unknown field");
  }
}

}  // namespace

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    fail(ErrorCode::parse, fmt::format("JSON syntax error at line {}, column {}: {}", line,
                                       column, e.what()));
  }
}

MacParams mac_params_from_json(const json& j, const MacParams& base, const std::string& path) {
  if (!j.is_object()) field_error(path, "expected an object");
  reject_unknown(j,
                 {"cw_min", "cw_max", "max_backoff_stage", "retry_limit", "slot_sigma", "difs",
                  "sifs", "ack_dur", "header_dur", "payload_dur"},
                 path);
  MacParams p = base;
  auto int_field = [&](const char* key, int& dst, int min_value) {
    if (j.contains(key)) dst = get_integer<int>(j.at(key), join_path(path, key), min_value);
  };
  auto dur_field = [&](const char* key, Micros& dst) {
    if (j.contains(key)) dst = get_integer<Micros>(j.at(key), join_path(path, key), 1);
  };
  int_field("cw_min", p.cw_min, 1);
  int_field("cw_max", p.cw_max, 1);
  int_field("max_backoff_stage", p.max_backoff_stage, 0);
  int_field("retry_limit", p.retry_limit, 0);
  dur_field("slot_sigma", p.slot_sigma);
  dur_field("difs", p.difs);
  dur_field("sifs", p.sifs);
  dur_field("ack_dur", p.ack_dur);
  dur_field("header_dur", p.header_dur);
  dur_field("payload_dur", p.payload_dur);
  try {
    p.validate();
  } catch (const Error& e) {
    field_error(path, e.what());
  }
  return p;
}

json to_json(const MacParams& p) {
  return json{{"cw_min", p.cw_min},         {"cw_max", p.cw_max},
              {"max_backoff_stage", p.max_backoff_stage},
              {"retry_limit", p.retry_limit}, {"slot_sigma", p.slot_sigma},
              {"difs", p.difs},             {"sifs", p.sifs},
              {"ack_dur", p.ack_dur},       {"header_dur", p.header_dur},
              {"payload_dur", p.payload_dur}};
}

SimConfig sim_config_from_json(const json& doc) {
  if (!doc.is_object()) field_error("<root>", "expected an object");
  reject_unknown(doc,
                 {"scenario", "n", "mac", "stations", "mode", "lambda_pps", "horizon", "seed",
                  "payload_bits", "record", "analysis", "output_dir"},
                 "");

  SimConfig cfg;
  MacParams shared;
  if (doc.contains("mac")) shared = mac_params_from_json(doc.at("mac"), MacParams{}, "mac");

  int n = -1;
  if (doc.contains("n")) n = get_integer<int>(doc.at("n"), "n", 1);
  if (doc.contains("stations")) {
    const json& st = doc.at("stations");
    if (!st.is_array() || st.empty()) field_error("stations", "expected a non-empty array");
    if (n >= 0 && static_cast<std::size_t>(n) != st.size()) {
      field_error("stations", fmt::format("has {} entries but n = {}", st.size(), n));
    }
    for (std::size_t i = 0; i < st.size(); ++i) {
      cfg.stations.push_back(
          mac_params_from_json(st[i], shared, fmt::format("stations[{}]", i)));
    }
  } else {
    if (n < 0) field_error("n", "required when 'stations' is absent");
    cfg.stations.assign(static_cast<std::size_t>(n), shared);
  }

  if (doc.contains("mode")) {
    const json& m = doc.at("mode");
    if (m == "saturated") {
      cfg.mode = TrafficMode::saturated;
    } else if (m == "poisson") {
      cfg.mode = TrafficMode::poisson;
    } else {
      field_error("mode", "expected \"saturated\" or \"poisson\"");
    }
  }
  if (doc.contains("lambda_pps")) {
    const json& l = doc.at("lambda_pps");
    if (l.is_number()) {
      cfg.lambda_pps.assign(cfg.stations.size(), get_number(l, "lambda_pps"));
    } else if (l.is_array()) {
      for (std::size_t i = 0; i < l.size(); ++i) {
        cfg.lambda_pps.push_back(get_number(l[i], fmt::format("lambda_pps[{}]", i)));
      }
    } else {
      field_error("lambda_pps", "expected a number or an array of numbers");
    }
    for (std::size_t i = 0; i < cfg.lambda_pps.size(); ++i) {
      if (cfg.lambda_pps[i] < 0.0) field_error(fmt::format("lambda_pps[{}]", i), "must be >= 0");
    }
  }
  if (cfg.mode == TrafficMode::poisson && cfg.lambda_pps.size() != cfg.stations.size()) {
    field_error("lambda_pps", fmt::format("poisson mode needs {} rates, got {}",
                                          cfg.stations.size(), cfg.lambda_pps.size()));
  }

  if (doc.contains("horizon")) {
    const json& h = doc.at("horizon");
    if (!h.is_object() || h.size() != 1) {
      field_error("horizon", "expected {\"slots\": N} or {\"duration_us\": T}");
    }
    if (h.contains("slots")) {
      cfg.horizon = Horizon::slots(get_integer<std::int64_t>(h.at("slots"), "horizon.slots", 1));
    } else if (h.contains("duration_us")) {
      const double d = get_number(h.at("duration_us"), "horizon.duration_us");
      if (!(d > 0.0)) field_error("horizon.duration_us", "must be > 0");
      cfg.horizon = Horizon::duration(static_cast<Micros>(d));
    } else {
      field_error("horizon", "expected {\"slots\": N} or {\"duration_us\": T}");
    }
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      field_error("seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("payload_bits")) {
    cfg.payload_bits = get_number(doc.at("payload_bits"), "payload_bits");
    if (!(cfg.payload_bits > 0.0)) field_error("payload_bits", "must be > 0");
  }
  if (doc.contains("record")) {
    const json& r = doc.at("record");
    if (!r.is_object()) field_error("record", "expected an object");
    reject_unknown(r, {"slots", "events", "success_owners"}, "record");
    if (r.contains("slots")) cfg.record_slots = get_bool(r.at("slots"), "record.slots");
    if (r.contains("events")) cfg.record_events = get_bool(r.at("events"), "record.events");
    if (r.contains("success_owners")) {
      cfg.record_success_owners = get_bool(r.at("success_owners"), "record.success_owners");
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(ErrorCode::parse, fmt::format("config: {}", e.what()));
  }
  return cfg;
}

}  // namespace dcf
