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

// Command-line flags. Every flag falls back to CLAB_<NAME> from the
// environment, e.g. CLAB_SEED or CLAB_N_MAX.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clab/cli/runner.hpp"

namespace clab::cli {

struct CommandLine {
  RunSpec spec;
  std::optional<std::string> out_path;
};

inline void add_options(CLI::App& app, CommandLine& cl, std::string& scenario, std::string& backend,
                        std::string& format) {
  std::vector<std::string> names;
  for (const auto& [name, value] : scenario_names()) names.push_back(name);
  app.add_option("--scenario", scenario, "Scenario to run")
      ->required()
      ->check(CLI::IsMember(names))
      ->envname("CLAB_SCENARIO");
  app.add_option("--n", cl.spec.n, "System size; real-valued for cat, energy and leakage")->envname("CLAB_N");
  app.add_option("--n-max", cl.spec.n_max, "Sweep chain sizes 1..n-max")->envname("CLAB_N_MAX");
  app.add_option("--beta", cl.spec.beta, "Inverse temperature (thermal)")->envname("CLAB_BETA");
  app.add_option("--trials", cl.spec.trials, "Random trials")->envname("CLAB_TRIALS");
  app.add_option("--seed", cl.spec.seed, "Root seed; trial i uses derive_seed(seed, i)")->envname("CLAB_SEED");
  app.add_option("--tol", cl.spec.tol, "Tolerance of the primary check")->envname("CLAB_TOL");
  app.add_option("--sigma", cl.spec.sigma, "Measurement spread (leakage)")->envname("CLAB_SIGMA");
  app.add_option("--backend", backend, "dense or statevector")
      ->check(CLI::IsMember({"dense", "statevector"}))
      ->envname("CLAB_BACKEND");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->envname("CLAB_FORMAT");
  app.add_option("--out", cl.out_path, "Write the report here instead of stdout")->envname("CLAB_OUT");
}

/// Parses argv; throws CLI::ParseError (including help requests) or UsageError.
inline CommandLine parse_command_line(int argc, const char* const* argv) {
  CommandLine cl;
  std::string scenario;
  std::string backend = "dense";
  std::string format = "json";
  CLI::App app("Verification scenarios for information-transfer maps", "clab");
  add_options(app, cl, scenario, backend, format);
  app.parse(argc, argv);
  cl.spec.scenario = parse_scenario(scenario);
  cl.spec.backend = backend == "dense" ? models::Backend::dense : models::Backend::statevector;
  cl.spec.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
  cl.spec.validate();
  return cl;
}

}  // namespace clab::cli
