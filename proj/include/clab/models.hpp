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

// Concrete measurement models: a controlled-not pair, a repeated
// measurement, a finite spin chain read out by sequential controlled flips
// (ground state and thermal), and closed-form bound calculators for settings
// far beyond matrix scale.
//
// Qubit basis (psi0, psi1) = (e0, e1). The per-site pointer is
// kPointerSign * sigma_z, i.e. diag(-1, +1) by default, so that an all-psi0
// chain reads b0 = -1 and an all-psi1 chain reads b1 = +1.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clab/observables.hpp"
#include "clab/qla.hpp"
#include "clab/states.hpp"
#include "clab/transfer.hpp"

namespace clab::models {

inline constexpr int kPointerSign = -1;
/// Largest chain for the statevector backend.
inline constexpr std::size_t kStatevectorMaxSites = 20;

inline ComplexMatrix spin_pointer(int sign = kPointerSign) {
  return pauli::z() * Complex(static_cast<double>(sign));
}

/// Everything needed to run a model through the transfer machinery.
struct Model {
  TransferMap transfer;
  Observable pointer;
  /// Sites of K (x) H, the system last.
  SiteSystem sys;
  PureState psi0;
  PureState psi1;
};

// ---------------------------------------------------------------------------
// Controlled flips

/// Permutation U = U_steps ... U_1 on n chain qubits (x) one system qubit,
/// where U_i flips chain site i (1-based, most significant first) when the
/// system qubit is psi1.
inline ComplexMatrix controlled_flip_chain(std::size_t n, std::size_t steps) {
  const std::size_t dim = std::size_t{1} << (n + 1);
  check_dimension_cap(dim, "controlled_flip_chain");
  std::size_t mask = 0;
  for (std::size_t i = 0; i < std::min(steps, n); ++i) mask |= std::size_t{1} << (n - i);
  const auto d = ComplexMatrix::as_index(dim);
  DenseMatrix u = DenseMatrix::Zero(d, d);
  for (std::size_t c = 0; c < dim; ++c) {
    const std::size_t r = (c & 1U) ? (c ^ mask) : c;
    u(ComplexMatrix::as_index(r), ComplexMatrix::as_index(c)) = 1.0;
  }
  return ComplexMatrix(std::move(u));
}

inline Model cnot_model() {
  const SiteSystem ancilla = SiteSystem::qubits(1);
  Observable pointer = tensor_identity(site_local(spin_pointer(), 0, ancilla), 2);
  TransferMap t(controlled_flip_chain(1, 1), density_from_pure(PureState::basis(2, 0)), 2, 2);
  return {std::move(t), std::move(pointer), SiteSystem::qubits(2), PureState::basis(2, 0), PureState::basis(2, 1)};
}

/// Two pointer qubits read the system in turn; table[i][j] is the
/// probability that the first pointer reads (2i - 1) and the second (2j - 1).
inline JointTable repeated_measurement_joint(const SuperpositionSpec& spec) {
  const SiteSystem sys = SiteSystem::qubits(3);
  const auto psi = spec.superpose(PureState::basis(2, 0), PureState::basis(2, 1));
  TransferMap t(controlled_flip_chain(2, 2), density_from_pure(PureState::basis(4, 0)), 4, 2);
  const ComplexMatrix up{{0.0, 0.0}, {0.0, 1.0}};
  return joint_distribution(t, embed(up, 0, sys), embed(up, 1, sys), density_from_pure(psi));
}

// ---------------------------------------------------------------------------
// Spin chain

enum class Backend { dense, statevector };

inline const char* to_string(Backend b) { return b == Backend::dense ? "dense" : "statevector"; }

struct ChainConfig {
  std::size_t n = 1;
  /// Inverse temperature; absent means the all-psi0 ground state.
  std::optional<double> beta;
  Backend backend = Backend::dense;
  /// Discrete time: apply U_steps ... U_1. Absent means the full chain.
  std::optional<std::size_t> steps;

  std::size_t time() const { return steps.value_or(n); }

  void validate() const {
    if (n < 1) throw InvalidArgument("ChainConfig: n must be at least 1");
    if (beta && !std::isfinite(*beta)) throw InvalidArgument("ChainConfig: beta must be finite");
    if (steps && *steps > n) throw InvalidArgument("ChainConfig: steps exceeds n");
    if (backend == Backend::dense) {
      if (n + 1 >= 63 || (std::size_t{1} << (n + 1)) > dimension_cap()) {
        throw DimensionError("ChainConfig: dense backend needs 2^(n+1) <= " + std::to_string(dimension_cap()) +
                             ", got n = " + std::to_string(n));
      }
    } else {
      const std::size_t qubits = beta ? 2 * n + 1 : n + 1;
      if ((beta ? 2 * n : n) > kStatevectorMaxSites) {
        throw DimensionError("ChainConfig: statevector backend holds at most " + std::to_string(kStatevectorMaxSites) +
                             " chain (plus purifying) qubits, got " + std::to_string(qubits - 1));
      }
    }
  }
};

/// Polarization of the Gibbs qubit: (e^-beta - e^beta) / (e^beta + e^-beta).
inline double thermal_epsilon(double beta) { return -std::tanh(beta); }

/// Per-site Gibbs state exp(-beta b) / Z of the site pointer b = diag(-1, +1):
/// weights (e^beta, e^-beta) / Z on (psi0, psi1). Its pointer mean is
/// epsilon(beta), and beta -> infinity recovers psi0.
inline std::pair<double, double> thermal_site_weights(double beta) {
  const double p1 = 1.0 / (1.0 + std::exp(2.0 * beta));
  return {1.0 - p1, p1};
}

inline Observable chain_pointer(std::size_t n) {
  const SiteSystem chain = SiteSystem::qubits(n);
  return tensor_identity(site_average(std::vector<ComplexMatrix>(n, spin_pointer()), chain), 2);
}

inline Model hepp_chain(const ChainConfig& cfg) {
  cfg.validate();
  if (cfg.beta) throw InvalidArgument("hepp_chain: ground-state chain takes no beta; use thermal_chain");
  if (cfg.backend != Backend::dense) throw InvalidArgument("hepp_chain: dense model requested with statevector config");
  const std::size_t dim_k = std::size_t{1} << cfg.n;
  TransferMap t(controlled_flip_chain(cfg.n, cfg.time()), density_from_pure(PureState::basis(dim_k, 0)), dim_k, 2);
  return {std::move(t), chain_pointer(cfg.n), SiteSystem::qubits(cfg.n + 1), PureState::basis(2, 0),
          PureState::basis(2, 1)};
}

/// N-fold product of the per-site Gibbs state, as a diagonal density matrix.
inline DensityMatrix thermal_state(std::size_t n, double beta) {
  const auto [w0, w1] = thermal_site_weights(beta);
  const std::size_t dim = std::size_t{1} << n;
  check_dimension_cap(dim, "thermal_state");
  std::vector<Complex> diag(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) p *= ((x >> i) & 1U) ? w1 : w0;
    diag[x] = p;
  }
  return DensityMatrix::unchecked(ComplexMatrix::diagonal(diag));
}

inline Model thermal_chain(const ChainConfig& cfg) {
  cfg.validate();
  if (!cfg.beta) throw InvalidArgument("thermal_chain: beta is required");
  if (cfg.backend != Backend::dense) throw InvalidArgument("thermal_chain: dense model requested with statevector config");
  const std::size_t dim_k = std::size_t{1} << cfg.n;
  TransferMap t(controlled_flip_chain(cfg.n, cfg.time()), thermal_state(cfg.n, *cfg.beta), dim_k, 2);
  return {std::move(t), chain_pointer(cfg.n), SiteSystem::qubits(cfg.n + 1), PureState::basis(2, 0),
          PureState::basis(2, 1)};
}

/// Closed-form pointer statistics of the thermal chain after the full
/// transfer: means epsilon and -epsilon, variance (1 - epsilon^2) / n.
inline PointerStats thermal_closed_form(std::size_t n, double beta) {
  const double eps = thermal_epsilon(beta);
  const double sigma = std::sqrt((1.0 - eps * eps) / static_cast<double>(n));
  return {eps, -eps, sigma, sigma};
}

// ---------------------------------------------------------------------------
// Statevector backend

/// Pauli axis for statevector observables.
enum class Axis { x, y, z };

inline const char* to_string(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "x";
}

inline ComplexMatrix pauli_matrix(Axis a) {
  switch (a) {
    case Axis::x: return pauli::x();
    case Axis::y: return pauli::y();
    case Axis::z: return pauli::z();
  }
  return pauli::x();
}

/// The chain as a global pure state over [aux] (x) chain (x) system, with
/// the controlled flips applied by index masking. A thermal chain carries
/// one purifying aux qubit per site, entangled with its chain site.
///
/// Bit layout of a basis index: bit 0 is the system, bit (n - i) is chain
/// site i (0-based), and aux qubit i sits at bit (2n - i).
class ChainStatevector {
 public:
  explicit ChainStatevector(const ChainConfig& cfg) : n_(cfg.n), steps_(cfg.time()), thermal_(cfg.beta.has_value()) {
    cfg.validate();
    if (thermal_) weights_ = thermal_site_weights(*cfg.beta);
  }

  std::size_t n() const { return n_; }
  std::size_t qubits() const { return thermal_ ? 2 * n_ + 1 : n_ + 1; }
  std::size_t dim() const { return std::size_t{1} << qubits(); }

  /// U (phi (x) (c0 psi0 + c1 psi1)).
  DenseVector transfer(Complex c0, Complex c1) const {
    DenseVector v = DenseVector::Zero(ComplexMatrix::as_index(dim()));
    const std::size_t branches = thermal_ ? (std::size_t{1} << n_) : 1;
    for (std::size_t x = 0; x < branches; ++x) {
      double amp = 1.0;
      std::size_t chain_bits = 0;
      if (thermal_) {
        for (std::size_t i = 0; i < n_; ++i) {
          const bool up = (x >> i) & 1U;
          amp *= std::sqrt(up ? weights_.second : weights_.first);
          if (up) chain_bits |= std::size_t{1} << (n_ - i);
        }
      }
      const std::size_t aux_bits = thermal_ ? (x << (n_ + 1)) : 0;
      const std::size_t base = aux_bits | chain_bits;
      v(ComplexMatrix::as_index(base)) += amp * c0;
      v(ComplexMatrix::as_index(base | 1U)) += amp * c1;
    }
    for (std::size_t i = 0; i < steps_; ++i) apply_controlled_flip(v, i);
    return v;
  }

  /// U_i: flip chain site i where the system bit is set.
  void apply_controlled_flip(DenseVector& v, std::size_t site) const {
    const std::size_t mask = std::size_t{1} << (n_ - site);
    for (std::size_t idx = 1; idx < dim(); idx += 2) {
      if (idx & mask) continue;
      std::swap(v(ComplexMatrix::as_index(idx)), v(ComplexMatrix::as_index(idx | mask)));
    }
  }

  /// <v| sigma_axis at `site` |v>; sites 0..n-1 are the chain, n the system.
  double expect_pauli(const DenseVector& v, std::size_t site, Axis axis) const {
    if (site > n_) throw InvalidArgument("expect_pauli: site out of range");
    const std::size_t mask = std::size_t{1} << (n_ - site);
    Complex acc = 0.0;
    for (std::size_t idx = 0; idx < dim(); ++idx) {
      const bool bit = idx & mask;
      const Complex amp = v(ComplexMatrix::as_index(idx));
      switch (axis) {
        case Axis::z: acc += (bit ? -1.0 : 1.0) * std::norm(amp); break;
        case Axis::x: acc += std::conj(v(ComplexMatrix::as_index(idx ^ mask))) * amp; break;
        case Axis::y:
          // sigma_y |0> = i|1>, sigma_y |1> = -i|0>
          acc += std::conj(v(ComplexMatrix::as_index(idx ^ mask))) * (bit ? Complex(0, -1) : Complex(0, 1)) * amp;
          break;
      }
    }
    return acc.real();
  }

  /// <v| sigma_x (x) ... (x) sigma_x |v> over all chain sites and the system.
  double expect_all_x(const DenseVector& v) const {
    const std::size_t mask = (std::size_t{1} << (n_ + 1)) - 1;
    Complex acc = 0.0;
    for (std::size_t idx = 0; idx < dim(); ++idx) {
      acc += std::conj(v(ComplexMatrix::as_index(idx ^ mask))) * v(ComplexMatrix::as_index(idx));
    }
    return acc.real();
  }

  /// Mean and variance of the chain pointer (1/n) sum_i b_i.
  std::pair<double, double> pointer_moments(const DenseVector& v) const {
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t idx = 0; idx < dim(); ++idx) {
      const double p = std::norm(v(ComplexMatrix::as_index(idx)));
      if (p == 0.0) continue;
      double b = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const bool up = (idx >> (n_ - i)) & 1U;
        b += kPointerSign * (up ? -1.0 : 1.0);
      }
      b /= static_cast<double>(n_);
      m1 += p * b;
      m2 += p * b * b;
    }
    return {m1, std::max(0.0, m2 - m1 * m1)};
  }

 private:
  std::size_t n_;
  std::size_t steps_;
  bool thermal_;
  std::pair<double, double> weights_{1.0, 0.0};
};

// ---------------------------------------------------------------------------
// Closed-form bounds

/// Coherence bound for micro/macro A against a macro pointer on n sites,
/// where ||[A, B]|| <= (2/n) ||A|| ||B||.
inline double corollary3_bound(double n, double norm_b, double sigma0, double sigma1, double b0, double b1,
                               double norm_a) {
  if (!(n >= 1.0)) throw InvalidArgument("corollary3_bound: n must be at least 1");
  return coherence_bound(2.0 / n, norm_b, sigma0, sigma1, b0, b1, norm_a);
}

/// The thermal-chain bound as displayed:
/// (1/(|eps| n) + sqrt(1 - eps^2)/(|eps| sqrt(n))) ||A||.
inline double thermal_bound(double n, double beta, double norm_a = 1.0) {
  const double eps = std::abs(thermal_epsilon(beta));
  if (!(eps > kDegeneratePointerGap)) throw DegeneratePointerError("thermal_bound: epsilon(beta) = 0");
  return (1.0 / (eps * n) + std::sqrt(1.0 - eps * eps) / (eps * std::sqrt(n))) * norm_a;
}

/// A cat of n atoms in a box of height 1 (||Z|| = 1), standing and fallen
/// centres of mass 0.1 apart, eigenstate pointers.
inline double cat_bound(double n, double norm_a = 1.0) {
  return corollary3_bound(n, 1.0, 0.0, 0.0, 0.0, 0.1, norm_a);
}

struct BoxConstraint {
  double length;  ///< L, bounding every characteristic position
  double speed;   ///< c, bounding the characteristic speed
};

struct BoundInputs {
  double hbar = 0.0;
  double v_n = 0.0;
  double x_n = 0.0;
  double x_n_prime = 0.0;
  double sigma = 0.0;
  double sigma_prime = 0.0;
  double delta_e = 0.0;
  std::optional<BoxConstraint> box;
};

/// Bound on |<psi| x_n psi'>| for energy pointers:
/// (hbar V_n + sigma X'_n + sigma' X_n) / |E - E'|, or with a box
/// (hbar c + L (sigma + sigma')) / |E - E'|.
inline double energy_pointer_bound(const BoundInputs& in) {
  if (!(in.delta_e > 0.0)) throw DegeneratePointerError("energy_pointer_bound: energy gap must be positive");
  for (double v : {in.hbar, in.v_n, in.x_n, in.x_n_prime, in.sigma, in.sigma_prime}) {
    if (!(v >= 0.0)) throw InvalidArgument("energy_pointer_bound: inputs must be nonnegative");
  }
  if (in.box) {
    if (!(in.box->length >= 0.0) || !(in.box->speed >= 0.0)) {
      throw InvalidArgument("energy_pointer_bound: box size and speed must be nonnegative");
    }
    return (in.hbar * in.box->speed + in.box->length * (in.sigma + in.sigma_prime)) / in.delta_e;
  }
  return (in.hbar * in.v_n + in.sigma * in.x_n_prime + in.sigma_prime * in.x_n) / in.delta_e;
}

/// Coherence bound between eigenstates s0, s1 of a monitored observable read
/// out externally with accuracy sigma (delta = 0, ||A|| = 1).
inline double leakage_bound(double sigma_meas, double s0, double s1) {
  if (!(sigma_meas >= 0.0)) throw InvalidArgument("leakage_bound: sigma must be nonnegative");
  // Microscopic gaps go far below the numerical pointer-gap threshold
  // (2/n at n ~ 1e23), so only exact coincidence is rejected here.
  const double gap = std::abs(s0 - s1);
  if (!(gap > 0.0)) throw DegeneratePointerError("leakage_bound: eigenvalues coincide");
  return 2.0 * sigma_meas / gap;
}

/// No state pair differs by more than 2 ||A|| on A, so such a bound says nothing.
inline bool is_vacuous(double bound, double norm_a = 1.0) { return bound >= 2.0 * norm_a; }

}  // namespace clab::models
