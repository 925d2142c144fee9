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

#include <fstream>
#include <iostream>

#include "clab/cli/options.hpp"
#include "clab/cli/output.hpp"

int main(int argc, char** argv) {
  namespace cli = clab::cli;
  cli::CommandLine cl;
  try {
    cl = cli::parse_command_line(argc, argv);
  } catch (const CLI::CallForHelp&) {
    CLI::App app("Verification scenarios for information-transfer maps", "clab");
    std::string a, b, c;
    cli::add_options(app, cl, a, b, c);
    std::cout << app.help();
    return cli::kExitPass;
  } catch (const CLI::ParseError& e) {
    std::cerr << "clab: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const clab::Error& e) {
    std::cerr << "clab: " << e.what() << '\n';
    return cli::kExitUsage;
  }

  try {
    std::vector<clab::VerificationRecord> records = cli::run_scenario(cl.spec);
    if (cl.out_path) {
      std::ofstream out(*cl.out_path, std::ios::binary);
      if (!out) {
        std::cerr << "clab: cannot open " << *cl.out_path << '\n';
        return cli::kExitUsage;
      }
      cli::write_records(out, records, cl.spec.format);
    } else {
      cli::write_records(std::cout, records, cl.spec.format);
    }
    return cli::all_pass(records) ? cli::kExitPass : cli::kExitCheckFailure;
  } catch (const cli::UsageError& e) {
    std::cerr << "clab: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const clab::HypothesisError& e) {
    std::cerr << "clab: " << e.what() << '\n';
    return cli::kExitUsage;
  }
}
