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

// Batch scenario runner: turns a RunSpec into verification records.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clab/instances.hpp"
#include "clab/models.hpp"
#include "clab/observables.hpp"
#include "clab/transfer.hpp"

namespace clab::cli {

/// Bad flags or a configuration under which the requested check is undefined.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class Scenario { cnot, repeated, hepp, thermal, theorem2_random, collapse_random, cat, energy, leakage };
enum class OutputFormat { json, csv };

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;

inline const std::vector<std::pair<std::string, Scenario>>& scenario_names() {
  static const std::vector<std::pair<std::string, Scenario>> names{
      {"cnot", Scenario::cnot},
      {"repeated", Scenario::repeated},
      {"hepp", Scenario::hepp},
      {"thermal", Scenario::thermal},
      {"theorem2-random", Scenario::theorem2_random},
      {"collapse-random", Scenario::collapse_random},
      {"cat", Scenario::cat},
      {"energy", Scenario::energy},
      {"leakage", Scenario::leakage},
  };
  return names;
}

inline std::string to_string(Scenario s) {
  for (const auto& [name, value] : scenario_names()) {
    if (value == s) return name;
  }
  return "unknown";
}

inline Scenario parse_scenario(const std::string& name) {
  for (const auto& [n, value] : scenario_names()) {
    if (n == name) return value;
  }
  throw UsageError("unknown scenario '" + name + "'");
}

struct RunSpec {
  Scenario scenario = Scenario::cnot;
  std::optional<double> n;
  std::optional<std::size_t> n_max;
  std::optional<double> beta;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<double> sigma;
  models::Backend backend = models::Backend::dense;
  OutputFormat format = OutputFormat::json;

  bool randomized() const {
    return scenario == Scenario::theorem2_random || scenario == Scenario::collapse_random;
  }

  void validate() const {
    if (tol && !(*tol > 0.0)) throw UsageError("--tol must be positive");
    if (trials && *trials < 1) throw UsageError("--trials must be at least 1");
    if (randomized() && !seed) throw UsageError("scenario " + to_string(scenario) + " requires --seed");
    if (n && !(*n >= 1.0)) throw UsageError("--n must be at least 1");
    if (n_max && *n_max < 1) throw UsageError("--n-max must be at least 1");
    if (sigma && !(*sigma >= 0.0)) throw UsageError("--sigma must be nonnegative");
  }
};

/// Purified and direct routes must agree to this.
inline constexpr double kPurificationTolerance = 1e-9;
/// Conditional states of perfect instruments, in trace distance.
inline constexpr double kConditionalStateTolerance = 1e-9;
inline constexpr double kProbabilityTolerance = 1e-10;

namespace detail {

inline std::size_t chain_n(double n) {
  if (n != std::floor(n) || n > 64) throw UsageError("--n must be a small integer for chain scenarios");
  return static_cast<std::size_t>(n);
}

inline std::vector<std::size_t> chain_sizes(const RunSpec& spec, std::size_t default_max) {
  if (spec.n) return {chain_n(*spec.n)};
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= spec.n_max.value_or(default_max); ++n) out.push_back(n);
  return out;
}

inline VerificationRecord equality_record(std::string scenario, Params params, double error, double tol) {
  VerificationRecord r;
  r.scenario = std::move(scenario);
  r.params = std::move(params);
  r.lhs = error;
  r.rhs = 0.0;
  r.tol = tol;
  r.settle();
  return r;
}

inline std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

inline std::vector<VerificationRecord> run_cnot(const RunSpec& spec) {
  const double tol = spec.tol.value_or(1e-12);
  const std::uint64_t seed = spec.seed.value_or(0);
  const auto model = models::cnot_model();
  const Theorem2Checker checker(model.transfer, model.pointer, model.psi0, model.psi1);
  const Observable system_x = site_local(pauli::x(), 1, model.sys);
  std::vector<VerificationRecord> out;
  for (std::size_t trial = 0; trial < spec.trials.value_or(100); ++trial) {
    Rng rng(derive_seed(seed, trial));
    const auto alpha = SuperpositionSpec::random(rng);
    const DensityMatrix expected =
        DensityMatrix::unchecked(ComplexMatrix::diagonal({alpha.weight0(), alpha.weight1()}));
    const auto psi = alpha.superpose(model.psi0, model.psi1);
    const double coherent = trace_distance(reduced_system_state(model.transfer, density_from_pure(psi)), expected);
    const double mixed = trace_distance(
        reduced_system_state(model.transfer, collapsed_mixture(alpha, model.psi0, model.psi1)), expected);
    out.push_back(equality_record("cnot", {{"check", "reduced-coherent"}, {"trial", as_int(trial)}}, coherent, tol));
    out.push_back(equality_record("cnot", {{"check", "reduced-mixture"}, {"trial", as_int(trial)}}, mixed, tol));
    out.push_back(checker.check(alpha, system_x, tol, "cnot",
                                {{"check", "theorem2"}, {"observable", "system-x"}, {"trial", as_int(trial)}}));
  }
  return out;
}

inline std::vector<VerificationRecord> run_repeated(const RunSpec& spec) {
  const double tol = spec.tol.value_or(1e-12);
  const std::uint64_t seed = spec.seed.value_or(0);
  std::vector<VerificationRecord> out;
  for (std::size_t trial = 0; trial < spec.trials.value_or(100); ++trial) {
    Rng rng(derive_seed(seed, trial));
    const auto alpha = SuperpositionSpec::random(rng);
    const JointTable table = models::repeated_measurement_joint(alpha);
    const double expected[2][2] = {{alpha.weight0(), 0.0}, {0.0, alpha.weight1()}};
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) err = std::max(err, std::abs(table[i][j] - expected[i][j]));
    }
    out.push_back(equality_record("repeated",
                                  {{"trial", as_int(trial)},
                                   {"p_down_down", table[0][0]},
                                   {"p_down_up", table[0][1]},
                                   {"p_up_down", table[1][0]},
                                   {"p_up_up", table[1][1]}},
                                  err, tol));
  }
  return out;
}

/// Micro and macro Pauli observables on the chain plus system, with names.
struct NamedObservable {
  std::string name;
  std::string kind;
  models::Axis axis;
  std::optional<std::size_t> site;  ///< set for single-site observables
  bool chain_only = false;          ///< macro average over the chain sites only
};

inline std::vector<NamedObservable> pauli_family(std::size_t n) {
  std::vector<NamedObservable> out;
  for (auto axis : {models::Axis::x, models::Axis::y, models::Axis::z}) {
    for (std::size_t s = 0; s <= n; ++s) {
      out.push_back({std::string("sigma_") + models::to_string(axis) + "@" + std::to_string(s), "micro", axis, s});
    }
    out.push_back({std::string("avg_sigma_") + models::to_string(axis), "macro", axis, std::nullopt});
    out.push_back({std::string("chain_avg_sigma_") + models::to_string(axis), "macro", axis, std::nullopt, true});
  }
  return out;
}

inline Observable dense_observable(const NamedObservable& o, const SiteSystem& sys) {
  const ComplexMatrix p = models::pauli_matrix(o.axis);
  if (o.site) return site_local(p, *o.site, sys);
  if (!o.chain_only) return site_average(std::vector<ComplexMatrix>(sys.size(), p), sys);
  const SiteSystem chain(std::vector<std::size_t>(sys.dims().begin(), sys.dims().end() - 1));
  return tensor_identity(site_average(std::vector<ComplexMatrix>(chain.size(), p), chain), sys.dims().back());
}

inline double statevector_expectation(const models::ChainStatevector& chain, const NamedObservable& o,
                                      const DenseVector& v) {
  if (o.site) return chain.expect_pauli(v, *o.site, o.axis);
  const std::size_t sites = o.chain_only ? chain.n() : chain.n() + 1;
  double acc = 0.0;
  for (std::size_t s = 0; s < sites; ++s) acc += chain.expect_pauli(v, s, o.axis);
  return acc / static_cast<double>(sites);
}

inline Observable all_x(std::size_t qubits) {
  ComplexMatrix m = pauli::x();
  for (std::size_t i = 1; i < qubits; ++i) m = tensor(m, pauli::x());
  return Observable::general(std::move(m));
}

inline std::vector<VerificationRecord> run_hepp(const RunSpec& spec) {
  const double tol = spec.tol.value_or(1e-12);
  const std::uint64_t seed = spec.seed.value_or(0);
  std::vector<VerificationRecord> out;
  for (std::size_t n : chain_sizes(spec, 8)) {
    Rng rng(derive_seed(seed, n));
    const auto alpha = SuperpositionSpec::random(rng);
    const double bound = models::corollary3_bound(static_cast<double>(n), 1.0, 0.0, 0.0, -1.0, 1.0, 1.0);
    const double stray_expected = 2.0 * std::abs((std::conj(alpha.alpha0()) * alpha.alpha1()).real());
    const std::string backend = models::to_string(spec.backend);
    PointerStats stats;

    // delta is the measured commutator ratio on the dense backend and its
    // 2/n estimate on the statevector backend.
    const auto record = [&](const NamedObservable& o, double lhs, double delta) {
      VerificationRecord r;
      r.scenario = "hepp";
      r.params = {{"n", as_int(n)}, {"backend", backend}, {"observable", o.name}, {"kind", o.kind}};
      r.lhs = lhs;
      r.rhs = bound;
      r.delta = delta;
      r.norm_a = 1.0;
      r.norm_b = 1.0;
      r.b0 = stats.b0;
      r.b1 = stats.b1;
      r.sigma0 = stats.sigma0;
      r.sigma1 = stats.sigma1;
      r.tol = tol;
      r.settle();
      return r;
    };
    const auto stray_record = [&](double stray) {
      return equality_record("hepp",
                             {{"n", as_int(n)},
                              {"backend", backend},
                              {"observable", "stray_all_x"},
                              {"kind", "general"},
                              {"discrepancy", stray},
                              {"expected", stray_expected}},
                             std::abs(stray - stray_expected), std::max(tol, 1e-10));
    };

    models::ChainConfig cfg{n, std::nullopt, spec.backend, std::nullopt};
    cfg.validate();
    if (spec.backend == models::Backend::statevector) {
      const models::ChainStatevector chain(cfg);
      const DenseVector theta0 = chain.transfer(1.0, 0.0);
      const DenseVector theta1 = chain.transfer(0.0, 1.0);
      const DenseVector theta = chain.transfer(alpha.alpha0(), alpha.alpha1());
      const auto [b0, var0] = chain.pointer_moments(theta0);
      const auto [b1, var1] = chain.pointer_moments(theta1);
      stats = {b0, b1, std::sqrt(var0), std::sqrt(var1)};
      for (const auto& o : pauli_family(n)) {
        const double coherent = statevector_expectation(chain, o, theta);
        const double mixed = alpha.weight0() * statevector_expectation(chain, o, theta0) +
                             alpha.weight1() * statevector_expectation(chain, o, theta1);
        out.push_back(record(o, std::abs(coherent - mixed), 2.0 / static_cast<double>(n)));
      }
      out.push_back(stray_record(std::abs(chain.expect_all_x(theta) - alpha.weight0() * chain.expect_all_x(theta0) -
                                          alpha.weight1() * chain.expect_all_x(theta1))));
      continue;
    }

    const auto model = models::hepp_chain(cfg);
    const Theorem2Checker checker(model.transfer, model.pointer, model.psi0, model.psi1);
    stats = checker.stats();
    // The transferred coherent and collapsed states are shared by every observable.
    const DensityMatrix coherent =
        apply_transfer(model.transfer, density_from_pure(alpha.superpose(model.psi0, model.psi1)));
    const DensityMatrix collapsed = apply_transfer(model.transfer, collapsed_mixture(alpha, model.psi0, model.psi1));
    const auto discrepancy = [&](const Observable& a) {
      return std::abs(expectation(coherent, a) - expectation(collapsed, a));
    };
    for (const auto& o : pauli_family(n)) {
      const Observable a = dense_observable(o, model.sys);
      out.push_back(record(o, discrepancy(a), commutator_delta(a, model.pointer)));
    }
    out.push_back(stray_record(discrepancy(all_x(n + 1))));
  }
  return out;
}

/// Random Hermitian site operator of unit norm, or a random site average.
inline Observable random_micro_or_macro(Rng& rng, const SiteSystem& sys) {
  if (rng.uniform() < 0.5) {
    const std::size_t site = rng.index(sys.size());
    return site_local(random_hermitian(rng, sys.site_dim(site)), site, sys);
  }
  std::vector<ComplexMatrix> ops;
  for (std::size_t s = 0; s < sys.size(); ++s) ops.push_back(random_hermitian(rng, sys.site_dim(s)));
  return site_average(ops, sys);
}

inline std::vector<VerificationRecord> run_thermal(const RunSpec& spec) {
  const double tol = spec.tol.value_or(1e-8);
  const std::uint64_t seed = spec.seed.value_or(0);
  const std::vector<double> betas = spec.beta ? std::vector<double>{*spec.beta} : std::vector<double>{0.5, 1.0, 2.0};
  std::vector<VerificationRecord> out;
  for (std::size_t n : chain_sizes(spec, 6)) {
    for (double beta : betas) {
      if (!(std::abs(models::thermal_epsilon(beta)) > kDegeneratePointerGap)) {
        throw UsageError("thermal: beta = 0 gives coinciding pointer means; the bound is undefined");
      }
      const auto closed = models::thermal_closed_form(n, beta);
      const std::string backend = models::to_string(spec.backend);
      const Params cell{{"n", as_int(n)}, {"beta", beta}, {"backend", backend}};
      const auto with = [&](Params extra) {
        Params p = cell;
        p.insert(p.end(), extra.begin(), extra.end());
        return p;
      };
      models::ChainConfig cfg{n, beta, spec.backend, std::nullopt};
      bool numeric = true;
      try {
        cfg.validate();
      } catch (const DimensionError&) {
        numeric = false;
      }
      const double corollary = models::corollary3_bound(static_cast<double>(n), 1.0, closed.sigma0, closed.sigma1,
                                                        closed.b0, closed.b1, 1.0);
      const double displayed = models::thermal_bound(static_cast<double>(n), beta);
      if (!numeric) {
        // too large to simulate: only the closed forms, labeled as such
        out.push_back(equality_record("thermal",
                                      with({{"check", "bound-formula"}, {"stats", "closed-form"},
                                            {"corollary", corollary}, {"displayed", displayed}}),
                                      std::abs(corollary - displayed), 1e-12));
        continue;
      }

      PointerStats measured;
      if (spec.backend == models::Backend::statevector) {
        const models::ChainStatevector chain(cfg);
        const auto [m0, v0] = chain.pointer_moments(chain.transfer(1.0, 0.0));
        const auto [m1, v1] = chain.pointer_moments(chain.transfer(0.0, 1.0));
        measured = {m0, m1, std::sqrt(v0), std::sqrt(v1)};
      }
      std::optional<models::Model> model;
      std::optional<Theorem2Checker> checker;
      if (spec.backend == models::Backend::dense) {
        model = models::thermal_chain(cfg);
        checker.emplace(model->transfer, model->pointer, model->psi0, model->psi1);
        measured = checker->stats();
      }
      const double closed_var = (1.0 - closed.b0 * closed.b0) / static_cast<double>(n);
      out.push_back(equality_record(
          "thermal", with({{"check", "pointer-variance"}, {"expected", closed_var}}),
          std::max(std::abs(measured.sigma0 * measured.sigma0 - closed_var),
                   std::abs(measured.sigma1 * measured.sigma1 - closed_var)),
          1e-10));
      out.push_back(equality_record("thermal", with({{"check", "pointer-mean"}, {"epsilon", closed.b0}}),
                                    std::max(std::abs(measured.b0 - closed.b0), std::abs(measured.b1 - closed.b1)),
                                    1e-10));
      out.push_back(equality_record("thermal",
                                    with({{"check", "bound-formula"}, {"stats", "measured"}, {"corollary", corollary}, {"displayed", displayed}}),
                                    std::abs(corollary - displayed), 1e-12));
      if (!checker) continue;
      Rng rng(derive_seed(seed, n * 1000 + static_cast<std::size_t>(std::llround(beta * 100))));
      for (std::size_t trial = 0; trial < spec.trials.value_or(50); ++trial) {
        const Observable a = random_micro_or_macro(rng, model->sys);
        const auto alpha = SuperpositionSpec::random(rng);
        auto rec = checker->check(alpha, a, tol, "thermal",
                                  with({{"check", "theorem2"}, {"trial", as_int(trial)}, {"kind", to_string(a.kind())}}));
        rec.params.emplace_back("corollary_bound",
                                models::corollary3_bound(static_cast<double>(n), rec.norm_b, rec.sigma0, rec.sigma1,
                                                         rec.b0, rec.b1, rec.norm_a));
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

/// max over X in {a, b, b^2} of |tr(T(rho) X) - tr(T'(rho) (1 (x) X))| with T'
/// the purified transfer, together with the same gap for the discrepancy.
inline double purification_gap(const Theorem2Instance& inst) {
  const auto pt = purified_transfer(inst.transfer);
  const PureState psi = inst.spec.superpose(inst.psi0, inst.psi1);
  const DensityMatrix direct = apply_transfer(inst.transfer, density_from_pure(psi));
  const DensityMatrix purified = apply_transfer(pt.transfer, density_from_pure(psi));
  const Observable b2 = Observable::general(inst.pointer.matrix() * inst.pointer.matrix());
  double gap = 0.0;
  for (const Observable* x : {&inst.observable, &inst.pointer, &b2}) {
    gap = std::max(gap, std::abs(expectation(direct, *x) - expectation(purified, identity_tensor(pt.aux_dim, *x))));
  }
  const double d_direct = decoherence_discrepancy(inst.transfer, inst.psi0, inst.psi1, inst.spec, inst.observable);
  const double d_purified = decoherence_discrepancy(pt.transfer, inst.psi0, inst.psi1, inst.spec,
                                                    identity_tensor(pt.aux_dim, inst.observable));
  return std::max(gap, std::abs(d_direct - d_purified));
}

inline std::vector<VerificationRecord> run_theorem2_random(const RunSpec& spec) {
  const double tol = spec.tol.value_or(1e-8);
  std::vector<VerificationRecord> out;
  for (std::size_t trial = 0; trial < spec.trials.value_or(500); ++trial) {
    const std::uint64_t trial_seed = derive_seed(*spec.seed, trial);
    const auto inst = random_theorem2_instance(trial_seed);
    const Params p{{"trial", as_int(trial)},
                   {"dim_k", as_int(inst.transfer.dim_k())},
                   {"dim_h", as_int(inst.transfer.dim_h())},
                   {"tau", inst.mixed_tau ? "mixed" : "pure"}};
    const Theorem2Checker checker(inst.transfer, inst.pointer, inst.psi0, inst.psi1);
    Params b = p;
    b.emplace_back("check", "theorem2");
    out.push_back(checker.check(inst.spec, inst.observable, tol, "theorem2-random", std::move(b)));
    Params q = p;
    q.emplace_back("check", "purification");
    out.push_back(equality_record("theorem2-random", std::move(q), purification_gap(inst), kPurificationTolerance));
  }
  return out;
}

inline void collapse_records(const std::string& label, const Instrument& inst, const PureState& psi0,
                             const PureState& psi1, Rng& rng, double tol, std::size_t trial,
                             std::vector<VerificationRecord>& out) {
  const Params base{{"trial", as_int(trial)}, {"instrument", label}};
  const auto with = [&](const std::string& check) {
    Params p = base;
    p.emplace_back("check", check);
    return p;
  };
  AbstractCollapseOptions opts;
  opts.tol = tol;
  opts.seed = rng.engine()();
  const auto rep = check_abstract_collapse(inst.branch_superoperator(0), inst.branch_superoperator(1), psi0, psi1, opts);
  Params p = with("off-diagonal");
  p.emplace_back("verdict", to_string(rep.verdict));
  p.emplace_back("collapse_residual", rep.collapse_residual);
  auto r = equality_record("collapse-random", std::move(p), rep.max_off_diagonal(), tol);
  if (rep.verdict != CollapseVerdict::confirmed) r.pass = false, r.lhs = std::max(r.lhs, rep.collapse_residual + 2 * tol);
  out.push_back(std::move(r));

  const DensityMatrix ref0 = reduced_system_state(inst.transfer(), density_from_pure(psi0));
  const DensityMatrix ref1 = reduced_system_state(inst.transfer(), density_from_pure(psi1));
  const auto alpha = SuperpositionSpec::random(rng);
  const auto cond = condition(inst, density_from_pure(alpha.superpose(psi0, psi1)));
  double dist = 0.0;
  dist = std::max(dist, cond.rho0 ? trace_distance(*cond.rho0, ref0) : 1.0);
  dist = std::max(dist, cond.rho1 ? trace_distance(*cond.rho1, ref1) : 1.0);
  out.push_back(equality_record("collapse-random", with("conditional-states"), dist, kConditionalStateTolerance));
  const double perr = std::max(std::abs(cond.p0 - alpha.weight0()), std::abs(cond.p1 - alpha.weight1()));
  out.push_back(equality_record("collapse-random", with("probabilities"), perr, kProbabilityTolerance));
}

inline std::vector<VerificationRecord> run_collapse_random(const RunSpec& spec) {
  const double tol = spec.tol.value_or(1e-10);
  std::vector<VerificationRecord> out;
  {
    Rng rng(derive_seed(*spec.seed, 0));
    const auto m = models::cnot_model();
    const Instrument inst(m.transfer, ComplexMatrix{{0.0, 0.0}, {0.0, 1.0}});
    collapse_records("cnot", inst, m.psi0, m.psi1, rng, tol, 0, out);
  }
  for (std::size_t trial = 1; trial <= spec.trials.value_or(20); ++trial) {
    const std::uint64_t s = derive_seed(*spec.seed, trial);
    Rng rng(s);
    const std::size_t half_k = 1 + rng.index(2);
    const std::size_t dim_h = 2 + rng.index(2);
    const std::size_t rank = 1 + rng.index(half_k);
    const auto perfect = random_perfect_instrument(s, half_k, dim_h, rank);
    collapse_records("random-block", perfect.instrument, perfect.psi0, perfect.psi1, rng, tol, trial, out);

    const auto kraus = random_kraus_splitting(s ^ 0x5A5A5A5AULL, dim_h, 1 + rng.index(3));
    AbstractCollapseOptions opts;
    opts.tol = tol;
    opts.seed = s;
    const auto rep = check_abstract_collapse(kraus.m0, kraus.m1, kraus.psi0, kraus.psi1, opts);
    auto r = equality_record("collapse-random",
                             {{"trial", as_int(trial)},
                              {"instrument", "kraus-splitting"},
                              {"check", "off-diagonal"},
                              {"verdict", to_string(rep.verdict)},
                              {"collapse_residual", rep.collapse_residual}},
                             rep.max_off_diagonal(), tol);
    if (rep.verdict != CollapseVerdict::confirmed) r.pass = false, r.lhs = std::max(r.lhs, rep.collapse_residual + 2 * tol);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<VerificationRecord> run_cat(const RunSpec& spec) {
  const double n = spec.n.value_or(1e23);
  VerificationRecord r;
  r.scenario = "cat";
  r.params = {{"n", n}, {"dz", 0.1}, {"norm_z", 1.0}, {"displayed", 20.0 / n}};
  r.delta = 2.0 / n;
  r.norm_a = 1.0;
  r.norm_b = 1.0;
  r.b0 = 0.0;
  r.b1 = 0.1;
  r.sigma0 = 0.0;
  r.sigma1 = 0.0;
  r.rhs = models::cat_bound(n);
  r.lhs = 20.0 / n;
  r.tol = spec.tol.value_or(4.0 * std::numeric_limits<double>::epsilon() * r.rhs);
  r.settle();
  return {r};
}

inline std::vector<VerificationRecord> run_energy(const RunSpec& spec) {
  // SI units: hbar in J s, c in m/s, a 1 m box. Gap and spread per particle
  // are 1e-19 J, so |E - E'| ~ n and sigma + sigma' ~ sqrt(n).
  const double hbar = 1.054571817e-34;
  const double c = 299792458.0;
  const double n = spec.n.value_or(1e20);
  const auto bound_at = [&](double size) {
    models::BoundInputs in;
    in.hbar = hbar;
    in.sigma = 0.5e-19 * std::sqrt(size);
    in.sigma_prime = 0.5e-19 * std::sqrt(size);
    in.delta_e = 1e-19 * size;
    in.box = models::BoxConstraint{1.0, c};
    return models::energy_pointer_bound(in);
  };
  const double ratio = bound_at(n) / bound_at(4.0 * n);
  std::vector<VerificationRecord> out;
  out.push_back(equality_record("energy",
                                {{"n", n}, {"check", "sqrt-decay"}, {"bound_n", bound_at(n)},
                                 {"bound_4n", bound_at(4.0 * n)}, {"ratio", ratio}},
                                std::abs(ratio - 2.0), spec.tol.value_or(1e-6)));
  models::BoundInputs box;
  box.hbar = 1.0;
  box.sigma = 1.0;
  box.sigma_prime = 2.0;
  box.delta_e = 10.0;
  box.box = models::BoxConstraint{1.0, 1.0};
  out.push_back(equality_record("energy", {{"check", "box-example"}, {"bound", models::energy_pointer_bound(box)}},
                                std::abs(models::energy_pointer_bound(box) - 0.4), 1e-15));
  return out;
}

inline std::vector<VerificationRecord> run_leakage(const RunSpec& spec) {
  const double n = spec.n.value_or(1e6);
  const double sigma = spec.sigma.value_or(std::pow(n, -0.25));
  std::vector<VerificationRecord> out;
  const auto rec = [&](const std::string& regime, double gap, bool expect_vacuous) {
    const double bound = models::leakage_bound(sigma, 0.0, gap);
    VerificationRecord r;
    r.scenario = "leakage";
    r.params = {{"n", n}, {"sigma", sigma}, {"regime", regime}, {"gap", gap}, {"bound", bound}};
    r.delta = 0.0;
    r.norm_a = 1.0;
    r.b0 = 0.0;
    r.b1 = gap;
    r.sigma0 = sigma;
    r.sigma1 = sigma;
    // Macroscopic gaps must give a non-vacuous bound (bound <= 2), microscopic
    // ones a vacuous bound (2 <= bound).
    r.lhs = expect_vacuous ? 2.0 : bound;
    r.rhs = expect_vacuous ? bound : 2.0;
    r.tol = 0.0;
    r.settle();
    return r;
  };
  out.push_back(rec("macroscopic", 1.0, false));
  out.push_back(rec("microscopic", 2.0 / n, true));
  return out;
}

}  // namespace detail

inline std::vector<VerificationRecord> run_scenario(const RunSpec& spec) {
  spec.validate();
  try {
    switch (spec.scenario) {
      case Scenario::cnot: return detail::run_cnot(spec);
      case Scenario::repeated: return detail::run_repeated(spec);
      case Scenario::hepp: return detail::run_hepp(spec);
      case Scenario::thermal: return detail::run_thermal(spec);
      case Scenario::theorem2_random: return detail::run_theorem2_random(spec);
      case Scenario::collapse_random: return detail::run_collapse_random(spec);
      case Scenario::cat: return detail::run_cat(spec);
      case Scenario::energy: return detail::run_energy(spec);
      case Scenario::leakage: return detail::run_leakage(spec);
    }
  } catch (const DimensionError& e) {
    throw UsageError(e.what());
  }
  return {};
}

inline bool all_pass(const std::vector<VerificationRecord>& records) {
  return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.pass; });
}

}  // namespace clab::cli
