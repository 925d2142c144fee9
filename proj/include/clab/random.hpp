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

// Seeded random instances for property checks.
//
// Determinism: std::mt19937_64 is fully specified by the standard, but the
// standard distributions are not, so uniform and normal variates are derived
// here directly from the raw 64-bit engine output.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "clab/qla.hpp"

namespace clab {

/// SplitMix64 finalizer.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of trial `index` under root seed `root`:
/// splitmix64(root ^ splitmix64(index)). Independent of execution order.
inline constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(root ^ splitmix64(index));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  Complex complex_normal() { return {normal(), normal()}; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline DenseMatrix random_gaussian(Rng& rng, std::size_t rows, std::size_t cols) {
  DenseMatrix g(ComplexMatrix::as_index(rows), ComplexMatrix::as_index(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.complex_normal();
  }
  return g;
}

/// Orthonormal columns from the QR factorization of a Gaussian matrix, with
/// column phases fixed so that R has a positive diagonal (Haar measure for
/// square inputs).
inline DenseMatrix orthonormal_columns(const DenseMatrix& g) {
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(g.rows(), g.cols());
  const DenseMatrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline ComplexMatrix random_unitary(Rng& rng, std::size_t dim) {
  return ComplexMatrix(orthonormal_columns(random_gaussian(rng, dim, dim)));
}

inline DenseVector random_unit_vector(Rng& rng, std::size_t dim) {
  DenseVector v = random_gaussian(rng, dim, 1).col(0);
  return v / v.norm();
}

/// G G^dagger / tr(G G^dagger) with G a dim x rank Gaussian matrix.
inline DenseMatrix random_density_dense(Rng& rng, std::size_t dim, std::size_t rank) {
  const DenseMatrix g = random_gaussian(rng, dim, rank);
  DenseMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DenseMatrix((rho + rho.adjoint()) * 0.5);
}

/// Random Hermitian matrix scaled to unit spectral norm.
inline ComplexMatrix random_hermitian(Rng& rng, std::size_t dim) {
  const DenseMatrix g = random_gaussian(rng, dim, dim);
  DenseMatrix h = (g + g.adjoint()) * 0.5;
  h /= spectral_norm(h);
  return ComplexMatrix(std::move(h));
}

}  // namespace clab
