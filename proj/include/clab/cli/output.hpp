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

// Record serialization: newline-delimited JSON or CSV with a header row.

#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "clab/cli/runner.hpp"
#include "clab/transfer.hpp"

namespace clab::cli {

inline const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols{"scenario", "params", "lhs",    "rhs",    "delta", "normA", "normB",
                                             "b0",       "b1",     "sigma0", "sigma1", "pass",  "tol"};
  return cols;
}

inline nlohmann::ordered_json to_json(const VerificationRecord& r) {
  const auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) {
    std::visit(
        [&](const auto& x) {
          if constexpr (std::is_same_v<std::decay_t<decltype(x)>, double>) {
            params[k] = num(x);
          } else {
            params[k] = x;
          }
        },
        v);
  }
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["params"] = std::move(params);
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["delta"] = num(r.delta);
  j["normA"] = num(r.norm_a);
  j["normB"] = num(r.norm_b);
  j["b0"] = num(r.b0);
  j["b1"] = num(r.b1);
  j["sigma0"] = num(r.sigma0);
  j["sigma1"] = num(r.sigma1);
  j["pass"] = r.pass;
  j["tol"] = num(r.tol);
  return j;
}

/// Shortest round-trip decimal form; empty for NaN.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// params as "k=v;k=v" in insertion order.
inline std::string params_field(const Params& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += ';';
    out += k + "=";
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, double>) {
            out += format_double(x);
          } else if constexpr (std::is_same_v<T, std::string>) {
            out += x;
          } else {
            out += std::to_string(x);
          }
        },
        v);
  }
  return out;
}

inline void write_csv_header(std::ostream& os) {
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

inline void write_csv_row(std::ostream& os, const VerificationRecord& r) {
  os << csv_escape(r.scenario) << ',' << csv_escape(params_field(r.params));
  for (double v : {r.lhs, r.rhs, r.delta, r.norm_a, r.norm_b, r.b0, r.b1, r.sigma0, r.sigma1}) {
    os << ',' << format_double(v);
  }
  os << ',' << (r.pass ? "true" : "false") << ',' << format_double(r.tol) << '\n';
}

inline void write_records(std::ostream& os, const std::vector<VerificationRecord>& records, OutputFormat format) {
  if (format == OutputFormat::csv) {
    write_csv_header(os);
    for (const auto& r : records) write_csv_row(os, r);
    return;
  }
  for (const auto& r : records) os << to_json(r).dump() << '\n';
}

/// Runs the scenario and writes its report; returns the process exit code.
inline int run(const RunSpec& spec, std::ostream& os) {
  const auto records = run_scenario(spec);
  write_records(os, records, spec.format);
  return all_pass(records) ? kExitPass : kExitCheckFailure;
}

}  // namespace clab::cli
