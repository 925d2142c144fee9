// Copyright 2026 The collapse-lab Authors
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

#include "catch_amalgamated.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "clab/cli/options.hpp"
#include "clab/cli/output.hpp"

using namespace clab;
using namespace clab::cli;

namespace {

CommandLine parse(std::vector<std::string> args) {
  args.insert(args.begin(), "clab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_command_line(static_cast<int>(argv.size()), argv.data());
}

std::string report(const RunSpec& spec, int* code = nullptr) {
  std::ostringstream os;
  const int c = run(spec, os);
  if (code) *code = c;
  return os.str();
}

std::vector<nlohmann::json> lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

// exit status of the built tool
int tool(const std::string& args) {
  const std::string cmd = std::string(CLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct EnvGuard {
  std::string name;
  EnvGuard(std::string n, const char* value) : name(std::move(n)) { setenv(name.c_str(), value, 1); }
  ~EnvGuard() { unsetenv(name.c_str()); }
};

}  // namespace

TEST_CASE("command line parsing") {
  const auto cl = parse({"--scenario", "hepp", "--n-max", "5", "--tol", "1e-10", "--backend", "statevector",
                         "--format", "csv", "--out", "r.csv"});
  CHECK(cl.spec.scenario == Scenario::hepp);
  CHECK(cl.spec.n_max == 5u);
  CHECK(cl.spec.tol == 1e-10);
  CHECK(cl.spec.backend == models::Backend::statevector);
  CHECK(cl.spec.format == OutputFormat::csv);
  CHECK(cl.out_path == "r.csv");

  CHECK_THROWS_AS(parse({"--scenario", "nope"}), CLI::ParseError);
  CHECK_THROWS_AS(parse({"--n", "3"}), CLI::ParseError);
  CHECK_THROWS_AS(parse({"--scenario", "cat", "--format", "xml"}), CLI::ParseError);
  CHECK_THROWS_AS(parse({"--scenario", "theorem2-random"}), UsageError);
  CHECK_THROWS_AS(parse({"--scenario", "collapse-random"}), UsageError);
  CHECK_THROWS_AS(parse({"--scenario", "cnot", "--tol", "0"}), UsageError);
  CHECK_THROWS_AS(parse({"--scenario", "cnot", "--trials", "0"}), UsageError);
  CHECK_THROWS_AS(parse({"--scenario", "leakage", "--sigma", "-1"}), UsageError);
  CHECK_NOTHROW(parse({"--scenario", "theorem2-random", "--seed", "42"}));
  CHECK_NOTHROW(parse({"--scenario", "hepp"}));
}

TEST_CASE("environment variables supply defaults") {
  const EnvGuard seed("CLAB_SEED", "42");
  const EnvGuard trials("CLAB_TRIALS", "7");
  auto cl = parse({"--scenario", "theorem2-random"});
  CHECK(cl.spec.seed == 42u);
  CHECK(cl.spec.trials == 7u);
  cl = parse({"--scenario", "theorem2-random", "--seed", "9"});
  CHECK(cl.spec.seed == 9u);
}

TEST_CASE("cat scenario is a single closed-form record") {
  RunSpec spec;
  spec.scenario = Scenario::cat;
  spec.n = 1e23;
  const auto records = run_scenario(spec);
  REQUIRE(records.size() == 1);
  CHECK(records[0].rhs == 2e-22);
  CHECK(records[0].lhs == 2e-22);
  CHECK(records[0].pass);
  const auto j = lines(report(spec));
  REQUIRE(j.size() == 1);
  CHECK(j[0]["rhs"].get<double>() == 2e-22);
  CHECK(j[0]["scenario"] == "cat");
}

TEST_CASE("hepp sweep passes for every observable") {
  RunSpec spec;
  spec.scenario = Scenario::hepp;
  spec.n_max = 8;
  spec.tol = 1e-10;
  int code = -1;
  const auto j = lines(report(spec, &code));
  CHECK(code == kExitPass);
  std::map<std::int64_t, std::size_t> per_n;
  for (const auto& r : j) {
    CHECK(r["pass"].get<bool>());
    ++per_n[r["params"]["n"].get<std::int64_t>()];
  }
  REQUIRE(per_n.size() == 8);
  for (const auto& [n, count] : per_n) {
    // sigma_{x,y,z} on each of n + 1 sites, two averages per axis, one stray
    CHECK(count == static_cast<std::size_t>(3 * (n + 1) + 6 + 1));
  }
  for (const auto& r : j) {
    if (r["params"]["observable"] == "stray_all_x") continue;
    CHECK(r["rhs"].get<double>() == 1.0 / r["params"]["n"].get<double>());
  }
}

TEST_CASE("statevector hepp agrees with the dense sweep") {
  RunSpec spec;
  spec.scenario = Scenario::hepp;
  spec.n_max = 4;
  const auto dense = run_scenario(spec);
  spec.backend = models::Backend::statevector;
  const auto sv = run_scenario(spec);
  REQUIRE(dense.size() == sv.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    CHECK(std::abs(dense[i].lhs - sv[i].lhs) <= 1e-10);
    CHECK(dense[i].rhs == sv[i].rhs);
    CHECK(sv[i].pass);
  }
}

TEST_CASE("theorem2-random reports one passing bound per trial") {
  RunSpec spec;
  spec.scenario = Scenario::theorem2_random;
  spec.trials = 500;
  spec.seed = 42;
  const auto records = run_scenario(spec);
  std::size_t bound = 0;
  std::size_t purification = 0;
  for (const auto& r : records) {
    CHECK(r.pass);
    const auto* check = r.param("check");
    REQUIRE(check != nullptr);
    if (std::get<std::string>(*check) == "theorem2") ++bound;
    if (std::get<std::string>(*check) == "purification") ++purification;
  }
  CHECK(bound == 500);
  CHECK(purification == 500);
}

TEST_CASE("reports are byte-identical for a fixed seed") {
  RunSpec spec;
  spec.scenario = Scenario::collapse_random;
  spec.trials = 5;
  spec.seed = 7;
  CHECK(report(spec) == report(spec));
  spec.format = OutputFormat::csv;
  CHECK(report(spec) == report(spec));
  RunSpec other = spec;
  other.seed = 8;
  CHECK(report(spec) != report(other));
}

TEST_CASE("csv and json share the column order") {
  RunSpec spec;
  spec.scenario = Scenario::energy;
  spec.format = OutputFormat::csv;
  const std::string csv = report(spec);
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header == "scenario,params,lhs,rhs,delta,normA,normB,b0,b1,sigma0,sigma1,pass,tol");

  spec.format = OutputFormat::json;
  const auto j = lines(report(spec));
  REQUIRE(!j.empty());
  std::vector<std::string> keys;
  // ordered parse to keep key order
  std::istringstream is(report(spec));
  std::string first;
  std::getline(is, first);
  const auto parsed = nlohmann::ordered_json::parse(first);
  for (const auto& item : parsed.items()) keys.push_back(item.key());
  CHECK(keys == record_columns());
  // quantities that do not apply are null
  CHECK(j[0]["delta"].is_null());
  CHECK(j[0]["normA"].is_null());
}

TEST_CASE("every pass flag follows from lhs, rhs and tol") {
  for (auto scenario : {Scenario::cnot, Scenario::repeated, Scenario::thermal, Scenario::collapse_random,
                        Scenario::cat, Scenario::energy, Scenario::leakage}) {
    RunSpec spec;
    spec.scenario = scenario;
    spec.seed = 3;
    spec.trials = 3;
    spec.n_max = 3;
    for (const auto& r : lines(report(spec))) {
      const bool expected = r["lhs"].get<double>() <= r["rhs"].get<double>() + r["tol"].get<double>();
      CHECK(r["pass"].get<bool>() == expected);
    }
  }
}

TEST_CASE("thermal beyond the simulated sizes reports closed forms only") {
  RunSpec spec;
  spec.scenario = Scenario::thermal;
  spec.n = 40;
  spec.beta = 1.0;
  const auto records = run_scenario(spec);
  REQUIRE(records.size() == 1);
  CHECK(std::get<std::string>(*records[0].param("stats")) == "closed-form");
  CHECK(records[0].pass);
}

TEST_CASE("exit codes") {
  RunSpec spec;
  spec.scenario = Scenario::leakage;
  int code = -1;
  report(spec, &code);
  CHECK(code == kExitPass);
  spec.sigma = 5.0;  // macroscopic readout too blurry: the bound exceeds 2
  report(spec, &code);
  CHECK(code == kExitCheckFailure);

  RunSpec thermal;
  thermal.scenario = Scenario::thermal;
  thermal.beta = 0.0;
  CHECK_THROWS_AS(run_scenario(thermal), UsageError);
  RunSpec big;
  big.scenario = Scenario::hepp;
  big.n = 30;
  CHECK_THROWS_AS(run_scenario(big), UsageError);

  CHECK(tool("--scenario cat --n 1e23") == kExitPass);
  CHECK(tool("--scenario leakage --sigma 5") == kExitCheckFailure);
  CHECK(tool("--scenario nope") == kExitUsage);
  CHECK(tool("--scenario theorem2-random") == kExitUsage);
  CHECK(tool("--scenario thermal --beta 0") == kExitUsage);
  CHECK(tool("--scenario hepp --n 12") == kExitUsage);
  CHECK(tool("--help") == kExitPass);
}

TEST_CASE("--out writes the report to a file") {
  const std::string path = "clab_test_out.jsonl";
  REQUIRE(tool("--scenario cat --n 1e23 --out " + path) == kExitPass);
  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(nlohmann::json::parse(line)["rhs"].get<double>() == 2e-22);
  in.close();
  std::remove(path.c_str());
}
