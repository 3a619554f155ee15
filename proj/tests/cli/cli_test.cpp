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

// End-to-end checks that drive the dcfcalc executable.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("dcfcalc_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const json& j) {
  const fs::path p = work_dir() / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

struct Outcome {
  int code;
  std::string err;
};

Outcome cli(const std::string& args, const std::string& env = "") {
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" DCFCALC_CLI "\" " + args + " >" +
                          (work_dir() / "stdout.txt").string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(err)};
}

std::string dir(const std::string& name) { return (work_dir() / name).string(); }

}  // namespace

TEST_CASE("single station run has no collisions") {
  const auto cfg = write_config("n1.json", {{"n", 1}, {"horizon", {{"slots", 20000}}}});
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + dir("n1")).code == 0);
  const json s = json::parse(slurp(work_dir() / "n1" / "summary.json"));
  CHECK(s["totals"]["collision_slots"] == 0);
  CHECK(slurp(work_dir() / "n1" / "slots.csv").find("collision") == std::string::npos);
}

TEST_CASE("reruns are byte identical") {
  const auto cfg = write_config("det.json", {{"n", 5}, {"horizon", {{"slots", 50000}}}, {"seed", 3}});
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + dir("a")).code == 0);
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + dir("b")).code == 0);
  for (const char* f : {"slots.csv", "events.csv", "owners.csv", "summary.json"}) {
    CAPTURE(f);
    const std::string a = slurp(work_dir() / "a" / f);
    CHECK(!a.empty());
    CHECK(a == slurp(work_dir() / "b" / f));
  }
  REQUIRE(cli("simulate --config " + cfg.string() + " --seed 4 --out " + dir("c")).code == 0);
  CHECK(slurp(work_dir() / "a" / "slots.csv") != slurp(work_dir() / "c" / "slots.csv"));
}

TEST_CASE("environment overrides and flag precedence") {
  const auto cfg = write_config("env.json", {{"n", 3}, {"horizon", {{"slots", 10000}}}, {"seed", 1}});
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + dir("e1"), "DCFCALC_SEED=9").code == 0);
  CHECK(json::parse(slurp(work_dir() / "e1" / "summary.json"))["seed"] == 9);
  REQUIRE(cli("simulate --config " + cfg.string() + " --seed 5 --out " + dir("e2"), "DCFCALC_SEED=9")
              .code == 0);
  CHECK(json::parse(slurp(work_dir() / "e2" / "summary.json"))["seed"] == 5);
  REQUIRE(cli("model --config " + cfg.string() + " --out " + dir("e3"), "DCFCALC_MAC__CW_MIN=16")
              .code == 0);
  REQUIRE(cli("model --config " + cfg.string() + " --out " + dir("e4")).code == 0);
  const double t16 = json::parse(slurp(work_dir() / "e3" / "model.json"))["stations"][0]["tau"];
  const double t32 = json::parse(slurp(work_dir() / "e4" / "model.json"))["stations"][0]["tau"];
  CHECK(t16 > t32);
}

TEST_CASE("replications are independent of the job count") {
  const auto cfg = write_config("reps.json", {{"n", 4}, {"horizon", {{"slots", 20000}}},
                                              {"record", {{"slots", false}, {"events", false}}}});
  REQUIRE(cli("simulate --config " + cfg.string() + " --reps 6 --jobs 1 --out " + dir("r1")).code == 0);
  REQUIRE(cli("simulate --config " + cfg.string() + " --reps 6 --jobs 3 --out " + dir("r3")).code == 0);
  CHECK(slurp(work_dir() / "r1" / "summary.json") == slurp(work_dir() / "r3" / "summary.json"));
}

TEST_CASE("simulated throughput agrees with the model command") {
  const auto cfg = write_config("n10.json", {{"n", 10}, {"horizon", {{"slots", 2000000}}},
                                             {"record", {{"slots", false}, {"events", false}}}});
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + dir("n10")).code == 0);
  REQUIRE(cli("model --config " + cfg.string() + " --out " + dir("n10")).code == 0);
  const double sim =
      json::parse(slurp(work_dir() / "n10" / "summary.json"))["totals"]["total_throughput_bps"];
  const double model = json::parse(slurp(work_dir() / "n10" / "model.json"))["total_throughput_bps"];
  CHECK(std::abs(sim / model - 1.0) < 0.03);
}

TEST_CASE("fairness pmf starts at one half for symmetric stations") {
  const auto cfg = write_config("fair.json", {{"n", 10}, {"analysis", {{"fairness", {{"l", {1, 2}}}}}}});
  REQUIRE(cli("fairness --config " + cfg.string() + " --out " + dir("fair")).code == 0);
  std::istringstream pmf(slurp(work_dir() / "fair" / "pmf_l1.csv"));
  std::string header, first;
  std::getline(pmf, header);
  std::getline(pmf, first);
  CHECK(header == "k,probability");
  CHECK(first == "0,0.5");
  CHECK(fs::exists(work_dir() / "fair" / "pmf_l2.csv"));
}

TEST_CASE("fairness on a trace writes the window table") {
  const auto cfg = write_config("fair_trace.json", {{"n", 5}, {"horizon", {{"slots", 200000}}}});
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + dir("ft")).code == 0);
  REQUIRE(cli("fairness --config " + cfg.string() + " --input " + dir("ft") + " --out " + dir("ft") +
              " --plot-data")
              .code == 0);
  std::istringstream table(slurp(work_dir() / "ft" / "fairness_windows.csv"));
  std::string line;
  std::getline(table, line);
  CHECK(line == "window_len,jain_mean,jain_p05,jain_p95");
  double prev = 0.0;
  int rows = 0;
  while (std::getline(table, line)) {
    const double mean = std::stod(line.substr(line.find(',') + 1));
    CHECK(mean >= prev);
    prev = mean;
    ++rows;
  }
  CHECK(rows >= 3);
  CHECK(fs::exists(work_dir() / "ft" / "plot" / "jain_vs_window.csv"));
}

TEST_CASE("unstable arrivals exit with a domain error") {
  const auto cfg = write_config(
      "unstable.json",
      {{"n", 10}, {"analysis", {{"servicecurve", {{"arrival", {{"sigma_b", 1}, {"rho_pps", 500}}}}}}}});
  const auto r = cli("servicecurve --config " + cfg.string() + " --out " + dir("sc"));
  CHECK(r.code == 3);
  CHECK(r.err.find("instability") != std::string::npos);
}

TEST_CASE("service curve report") {
  const auto cfg = write_config(
      "stable.json",
      {{"n", 10}, {"analysis", {{"servicecurve", {{"arrival", {{"sigma_b", 1}, {"rho_pps", 10}}}}}}}});
  REQUIRE(cli("servicecurve --config " + cfg.string() + " --out " + dir("sc2") + " --plot-data").code ==
          0);
  const json r = json::parse(slurp(work_dir() / "sc2" / "servicecurve.json"));
  CHECK(r["optima"].size() == 4);
  CHECK(r["bounds"].size() == 4);
  CHECK(slurp(work_dir() / "sc2" / "servicecurve.csv").rfind("theta,rate_pps,latency_s,eps\n", 0) == 0);
  CHECK(fs::exists(work_dir() / "sc2" / "plot" / "envelope.csv"));
}

TEST_CASE("estimate brackets the model rate") {
  const auto cfg = write_config("est.json", {{"n", 10}, {"horizon", {{"slots", 3900000}}}, {"seed", 2},
                                             {"record", {{"slots", false}}}});
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + dir("est")).code == 0);
  REQUIRE(cli("estimate --config " + cfg.string() + " --input " + dir("est") + " --out " + dir("est"))
              .code == 0);
  const json r = json::parse(slurp(work_dir() / "est" / "estimate.json"));
  const double model = r["model_rate_pps"];
  CHECK(r["ci95"][0].get<double>() <= model);
  CHECK(model <= r["ci95"][1].get<double>());
}

TEST_CASE("clock command") {
  const auto cfg = write_config("clock.json", {{"n", 2}, {"horizon", {{"slots", 100000}}}});
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + dir("clk")).code == 0);
  REQUIRE(cli("clock --config " + cfg.string() + " --input " + dir("clk") + " --out " + dir("clk"))
              .code == 0);
  std::istringstream csv(slurp(work_dir() / "clk" / "clock.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "j,T_j,I_j,e_j");
  const json r = json::parse(slurp(work_dir() / "clk" / "clock.json"));
  CHECK(r["packets"].get<int>() > 1000);
  CHECK(r.contains("gps_deviation_us"));
}

TEST_CASE("input errors exit with code 2") {
  std::ofstream(work_dir() / "syntax.json") << "{\n  \"n\": 3,\n  oops\n}";
  auto r = cli("model --config " + (work_dir() / "syntax.json").string() + " --out " + dir("x"));
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);
  const auto cfg = write_config("field.json", {{"n", 3}, {"mac", {{"cw_min", "wide"}}}});
  r = cli("model --config " + cfg.string() + " --out " + dir("x"));
  CHECK(r.code == 2);
  CHECK(r.err.find("mac.cw_min") != std::string::npos);
  const auto ok = write_config("ok.json", {{"n", 3}});
  CHECK(cli("clock --config " + ok.string() + " --out " + dir("x")).code == 2);
  CHECK(cli("estimate --config " + ok.string() + " --input " + dir("nowhere") + " --out " + dir("x"))
            .code == 2);
  CHECK(cli("model --config " + (work_dir() / "missing.json").string()).code == 2);
  CHECK(cli("model --no-such-flag").code == 2);
  const auto bad_station = write_config("bs.json", {{"n", 2}, {"analysis", {{"clock", {{"tagged", 7}}}}}});
  r = cli("clock --config " + bad_station.string() + " --input " + dir("clk") + " --out " + dir("x"));
  CHECK(r.code == 2);
  CHECK(r.err.find("analysis.clock.tagged") != std::string::npos);
}

TEST_CASE("demo pipeline") {
  REQUIRE(cli("demo --out " + dir("demo")).code == 0);
  for (const char* f : {"summary.json", "model.json", "fairness.json", "clock.json",
                        "servicecurve.json", "estimate.json"}) {
    CAPTURE(f);
    CHECK(fs::exists(work_dir() / "demo" / f));
  }
}
