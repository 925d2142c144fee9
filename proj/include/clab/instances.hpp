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

// Seeded random instances for the coherence bound and for perfect
// two-outcome instruments.

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "clab/observables.hpp"
#include "clab/random.hpp"
#include "clab/states.hpp"
#include "clab/transfer.hpp"

namespace clab {

struct Theorem2Instance {
  TransferMap transfer;
  Observable pointer;
  Observable observable;
  PureState psi0;
  PureState psi1;
  SuperpositionSpec spec;
  bool mixed_tau;
};

/// Random unitary on K (x) H, random tau (pure or of random rank), random
/// orthonormal psi0, psi1, random unit-norm Hermitian A and B. B is redrawn
/// until its pointer means differ by more than min_gap.
inline Theorem2Instance random_theorem2_instance(std::uint64_t seed, double min_gap = 0.05) {
  Rng rng(seed);
  static constexpr std::array<std::size_t, 3> kDims{2, 3, 4};
  const std::size_t dim_k = kDims[rng.index(kDims.size())];
  const std::size_t dim_h = kDims[rng.index(kDims.size())];
  const bool mixed = rng.uniform() < 0.75;
  const std::size_t rank = mixed ? 2 + rng.index(dim_k - 1) : 1;
  DensityMatrix tau = random_density(rng, dim_k, rank);
  TransferMap t(random_unitary(rng, dim_k * dim_h), std::move(tau), dim_k, dim_h);
  auto [psi0, psi1] = random_orthonormal_pair(rng, dim_h);
  const DensityMatrix s0 = apply_transfer(t, density_from_pure(psi0));
  const DensityMatrix s1 = apply_transfer(t, density_from_pure(psi1));
  Observable b = Observable::general(random_hermitian(rng, t.dim()));
  for (int attempt = 0; std::abs(expectation(s0, b) - expectation(s1, b)) <= min_gap; ++attempt) {
    if (attempt > 1000) throw Error("random_theorem2_instance: no pointer with a usable gap");
    b = Observable::general(random_hermitian(rng, t.dim()));
  }
  Observable a = Observable::general(random_hermitian(rng, t.dim()));
  const auto spec = SuperpositionSpec::random(rng);
  return {std::move(t), std::move(b), std::move(a), std::move(psi0), std::move(psi1), spec, mixed};
}

struct PerfectInstrument {
  Instrument instrument;
  PureState psi0;
  PureState psi1;
};

/// Instrument whose pointer projection separates psi0 from psi1 exactly.
///
/// K = C^(2m) with Q projecting onto its upper half. tau has rank r <= m with
/// eigenvectors phi_i. U sends phi_i (x) psi0 into random orthonormal vectors
/// of ((1 - Q) (x) 1) and phi_i (x) psi1 into random orthonormal vectors of
/// (Q (x) 1), and is completed to a random unitary elsewhere. The Kraus
/// operators of each branch are therefore supported on one block.
inline PerfectInstrument random_perfect_instrument(std::uint64_t seed, std::size_t half_k, std::size_t dim_h,
                                                   std::size_t rank) {
  if (rank < 1 || rank > half_k) throw InvalidArgument("random_perfect_instrument: need 1 <= rank <= half_k");
  if (dim_h < 2) throw InvalidArgument("random_perfect_instrument: system needs dimension >= 2");
  Rng rng(seed);
  const std::size_t dim_k = 2 * half_k;
  const std::size_t dim = dim_k * dim_h;
  const auto n = ComplexMatrix::as_index(dim);

  // Random tau of the given rank with eigenbasis phi.
  const DenseMatrix phi = orthonormal_columns(random_gaussian(rng, dim_k, dim_k));
  std::vector<double> w(rank);
  double total = 0.0;
  for (auto& x : w) total += (x = 0.1 + rng.uniform());
  DenseMatrix tau = DenseMatrix::Zero(ComplexMatrix::as_index(dim_k), ComplexMatrix::as_index(dim_k));
  for (std::size_t i = 0; i < rank; ++i) {
    tau += (w[i] / total) * phi.col(ComplexMatrix::as_index(i)) * phi.col(ComplexMatrix::as_index(i)).adjoint();
  }
  auto [psi0, psi1] = random_orthonormal_pair(rng, dim_h);

  // Inputs phi_i (x) psi_j, completed to an orthonormal basis.
  DenseMatrix in(n, n);
  for (std::size_t i = 0; i < rank; ++i) {
    in.col(ComplexMatrix::as_index(i)) = tensor(DenseVector(phi.col(ComplexMatrix::as_index(i))), psi0.amplitudes());
    in.col(ComplexMatrix::as_index(rank + i)) =
        tensor(DenseVector(phi.col(ComplexMatrix::as_index(i))), psi1.amplitudes());
  }
  in.rightCols(n - ComplexMatrix::as_index(2 * rank)) = random_gaussian(rng, dim, dim - 2 * rank);
  in = orthonormal_columns(in);

  // Outputs: the first block in the lower half of K, the second in the upper.
  const auto half = ComplexMatrix::as_index(half_k * dim_h);
  DenseMatrix lower = DenseMatrix::Zero(n, ComplexMatrix::as_index(rank));
  DenseMatrix upper = DenseMatrix::Zero(n, ComplexMatrix::as_index(rank));
  lower.topRows(half) = orthonormal_columns(random_gaussian(rng, half_k * dim_h, rank));
  upper.bottomRows(n - half) = orthonormal_columns(random_gaussian(rng, dim - half_k * dim_h, rank));
  DenseMatrix out(n, n);
  out.leftCols(ComplexMatrix::as_index(rank)) = lower;
  out.middleCols(ComplexMatrix::as_index(rank), ComplexMatrix::as_index(rank)) = upper;
  out.rightCols(n - ComplexMatrix::as_index(2 * rank)) = random_gaussian(rng, dim, dim - 2 * rank);
  out = orthonormal_columns(out);

  ComplexMatrix u(DenseMatrix(out * in.adjoint()));
  DenseMatrix q = DenseMatrix::Zero(ComplexMatrix::as_index(dim_k), ComplexMatrix::as_index(dim_k));
  for (std::size_t k = half_k; k < dim_k; ++k) q(ComplexMatrix::as_index(k), ComplexMatrix::as_index(k)) = 1.0;

  TransferMap t(std::move(u), DensityMatrix::unchecked(ComplexMatrix((tau + tau.adjoint()) * 0.5)), dim_k, dim_h);
  return {Instrument(std::move(t), ComplexMatrix(std::move(q))), std::move(psi0), std::move(psi1)};
}

/// Splitting maps built directly from Kraus operators: M0 = {G_a P0'} and
/// M1 = {H_b P1} with P1 = |psi1><psi1|, P0' = 1 - P1, and {G_a}, {H_b} the
/// blocks of random isometries. M1 kills |psi0><psi0| and M0 kills
/// |psi1><psi1|; M0 + M1 is trace preserving.
struct KrausSplitting {
  Superoperator m0;
  Superoperator m1;
  PureState psi0;
  PureState psi1;
};

inline KrausSplitting random_kraus_splitting(std::uint64_t seed, std::size_t dim, std::size_t kraus_count) {
  Rng rng(seed);
  auto [psi0, psi1] = random_orthonormal_pair(rng, dim);
  const auto d = ComplexMatrix::as_index(dim);
  const DenseMatrix p1 = psi1.amplitudes() * psi1.amplitudes().adjoint();
  const DenseMatrix p0 = DenseMatrix::Identity(d, d) - p1;

  const auto blocks = [&](const DenseMatrix& support) {
    // Isometry C^dim -> C^(dim * kraus_count), split into square blocks.
    const DenseMatrix iso = orthonormal_columns(random_gaussian(rng, dim * kraus_count, dim));
    std::vector<ComplexMatrix> ops;
    for (std::size_t a = 0; a < kraus_count; ++a) {
      ops.emplace_back(DenseMatrix(iso.middleRows(ComplexMatrix::as_index(a * dim), d) * support));
    }
    return ops;
  };
  return {Superoperator::from_kraus(blocks(p0)), Superoperator::from_kraus(blocks(p1)), std::move(psi0),
          std::move(psi1)};
}

}  // namespace clab
