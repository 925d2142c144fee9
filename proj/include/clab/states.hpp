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

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "clab/qla.hpp"
#include "clab/random.hpp"

namespace clab {

inline constexpr double kStateTolerance = 1e-10;
/// Eigenvalues of a mixed state below this are dropped when purifying.
inline constexpr double kPurificationCutoff = 1e-12;

/// Unit vector; the global phase carries no meaning.
class PureState {
 public:
  explicit PureState(DenseVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) throw InvalidArgument("PureState: empty amplitude vector");
    if (!amplitudes_.allFinite()) throw InvalidArgument("PureState: non-finite amplitude");
    const double n2 = amplitudes_.squaredNorm();
    if (std::abs(n2 - 1.0) > kStateTolerance) {
      throw NormalizationError("PureState: squared norm " + std::to_string(n2) + " is not 1");
    }
  }

  /// Rescales v to unit norm first.
  static PureState normalized(const DenseVector& v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw NormalizationError("PureState: cannot normalize the zero vector");
    return PureState(DenseVector(v / n));
  }

  static PureState basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw InvalidArgument("PureState::basis: index out of range");
    DenseVector v = DenseVector::Zero(ComplexMatrix::as_index(dim));
    v(ComplexMatrix::as_index(index)) = 1.0;
    return PureState(std::move(v));
  }

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const DenseVector& amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_(ComplexMatrix::as_index(i)); }

 private:
  DenseVector amplitudes_;
};

inline Complex inner(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw DimensionError::mismatch("inner", a.dim(), b.dim());
  return a.amplitudes().dot(b.amplitudes());  // conjugates the left operand
}

inline PureState tensor(const PureState& a, const PureState& b) {
  return PureState(tensor(a.amplitudes(), b.amplitudes()));
}

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) { validate(m_); }

  /// Wraps a matrix already known to be a state (the image of a state under
  /// a positive trace-preserving map) without re-running the eigensolver.
  static DensityMatrix unchecked(ComplexMatrix m) { return DensityMatrix(std::move(m), Unchecked{}); }

  static DensityMatrix maximally_mixed(std::size_t dim) {
    return unchecked(ComplexMatrix::identity(dim) * Complex(1.0 / static_cast<double>(dim)));
  }

  std::size_t dim() const { return m_.dim(); }
  const ComplexMatrix& matrix() const { return m_; }
  const DenseMatrix& dense() const { return m_.dense(); }
  Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  /// Throws if m is not a valid state within kStateTolerance.
  static void validate(const ComplexMatrix& m) {
    const DenseMatrix& d = m.dense();
    if (!norm_within(DenseMatrix(d - d.adjoint()), kStateTolerance)) {
      throw InvalidArgument("DensityMatrix: not Hermitian");
    }
    const double tr = d.trace().real();
    if (std::abs(tr - 1.0) > kStateTolerance) {
      throw NormalizationError("DensityMatrix: trace " + std::to_string(tr) + " is not 1");
    }
    const DenseMatrix herm = (d + d.adjoint()) * 0.5;
    const double min_eig = eigh(herm, false).values(0);
    if (min_eig < -kStateTolerance) {
      throw InvalidArgument("DensityMatrix: negative eigenvalue " + std::to_string(min_eig));
    }
  }

 private:
  struct Unchecked {};
  DensityMatrix(ComplexMatrix m, Unchecked) : m_(std::move(m)) {}

  ComplexMatrix m_;
};

/// Coefficients of psi = alpha0 psi0 + alpha1 psi1.
class SuperpositionSpec {
 public:
  SuperpositionSpec(Complex alpha0, Complex alpha1) : alpha0_(alpha0), alpha1_(alpha1) {
    const double n = std::norm(alpha0) + std::norm(alpha1);
    if (std::abs(n - 1.0) > kStateTolerance) {
      throw NormalizationError("SuperpositionSpec: |alpha0|^2 + |alpha1|^2 = " + std::to_string(n));
    }
  }

  static SuperpositionSpec random(Rng& rng) {
    const Complex a0 = rng.complex_normal();
    const Complex a1 = rng.complex_normal();
    const double n = std::sqrt(std::norm(a0) + std::norm(a1));
    return {a0 / n, a1 / n};
  }

  Complex alpha0() const { return alpha0_; }
  Complex alpha1() const { return alpha1_; }
  double weight0() const { return std::norm(alpha0_); }
  double weight1() const { return std::norm(alpha1_); }

  PureState superpose(const PureState& psi0, const PureState& psi1) const {
    if (psi0.dim() != psi1.dim()) throw DimensionError::mismatch("superpose", psi0.dim(), psi1.dim());
    return PureState::normalized(DenseVector(alpha0_ * psi0.amplitudes() + alpha1_ * psi1.amplitudes()));
  }

 private:
  Complex alpha0_;
  Complex alpha1_;
};

inline DensityMatrix density_from_pure(const PureState& psi) {
  return DensityMatrix::unchecked(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()));
}

/// Convex combination sum_i weights[i] * states[i].
inline DensityMatrix mixture(const std::vector<double>& weights, const std::vector<DensityMatrix>& states) {
  if (weights.size() != states.size()) {
    throw DimensionError::mismatch("mixture: weight count", states.size(), weights.size());
  }
  if (states.empty()) throw InvalidArgument("mixture: no states");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("mixture: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kStateTolerance) {
    throw NormalizationError("mixture: weights sum to " + std::to_string(total));
  }
  const std::size_t dim = states.front().dim();
  DenseMatrix acc = DenseMatrix::Zero(ComplexMatrix::as_index(dim), ComplexMatrix::as_index(dim));
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != dim) throw DimensionError::mismatch("mixture", dim, states[i].dim());
    acc += weights[i] * states[i].dense();
  }
  return DensityMatrix::unchecked(ComplexMatrix(std::move(acc)));
}

/// |alpha0|^2 |psi0><psi0| + |alpha1|^2 |psi1><psi1|.
inline DensityMatrix collapsed_mixture(const SuperpositionSpec& spec, const PureState& psi0,
                                       const PureState& psi1) {
  return mixture({spec.weight0(), spec.weight1()}, {density_from_pure(psi0), density_from_pure(psi1)});
}

/// Vector state on an enlarged space whose reduced state is the input.
struct Purification {
  /// Direct sum of sqrt(p_i) phi_i; branch i occupies indices
  /// [i * dim, (i + 1) * dim).
  PureState vector;
  std::size_t aux_dim;
  /// Branch weights p_i, descending.
  std::vector<double> weights;
};

inline Purification purify(const DensityMatrix& tau) {
  const auto eig = eigh(tau.dense());
  const std::size_t dim = tau.dim();
  std::vector<std::pair<double, Eigen::Index>> kept;
  for (Eigen::Index i = eig.values.size() - 1; i >= 0; --i) {
    if (eig.values(i) >= kPurificationCutoff) kept.emplace_back(eig.values(i), i);
  }
  double total = 0.0;
  for (const auto& [w, idx] : kept) total += w;
  DenseVector v(ComplexMatrix::as_index(kept.size() * dim));
  std::vector<double> weights;
  for (std::size_t b = 0; b < kept.size(); ++b) {
    const double w = kept[b].first / total;
    weights.push_back(w);
    v.segment(ComplexMatrix::as_index(b * dim), ComplexMatrix::as_index(dim)) =
        std::sqrt(w) * eig.vectors.col(kept[b].second);
  }
  return {PureState::normalized(v), kept.size(), std::move(weights)};
}

/// Half the trace norm of rho - sigma (the singular values of a Hermitian
/// difference are the absolute eigenvalues).
inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError::mismatch("trace_distance", rho.dim(), sigma.dim());
  DenseMatrix diff = rho.dense() - sigma.dense();
  diff = (diff + diff.adjoint()).eval() * 0.5;
  const auto eig = eigh(diff, false);
  return 0.5 * eig.values.cwiseAbs().sum();
}

inline DensityMatrix random_density(Rng& rng, std::size_t dim, std::size_t rank) {
  return DensityMatrix::unchecked(ComplexMatrix(random_density_dense(rng, dim, rank)));
}

inline PureState random_pure_state(Rng& rng, std::size_t dim) {
  return PureState(random_unit_vector(rng, dim));
}

/// Two random orthonormal vectors.
inline std::pair<PureState, PureState> random_orthonormal_pair(Rng& rng, std::size_t dim) {
  if (dim < 2) throw InvalidArgument("random_orthonormal_pair: dimension must be at least 2");
  const DenseMatrix q = orthonormal_columns(random_gaussian(rng, dim, 2));
  return {PureState::normalized(q.col(0)), PureState::normalized(q.col(1))};
}

}  // namespace clab
