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

#include "clab/states.hpp"
#include "oracles.hpp"

using namespace clab;
using Catch::Matchers::WithinAbs;

namespace {

DensityMatrix diag_state(std::initializer_list<Complex> d) {
  return DensityMatrix(ComplexMatrix::diagonal(std::vector<Complex>(d)));
}

PureState vec(std::initializer_list<Complex> a) {
  DenseVector v(static_cast<Eigen::Index>(a.size()));
  Eigen::Index i = 0;
  for (auto x : a) v(i++) = x;
  return PureState(v);
}

}  // namespace

TEST_CASE("pure states must be normalized") {
  CHECK_THROWS_AS(vec({1.0, 1.0}), NormalizationError);
  CHECK_NOTHROW(PureState::normalized(vec({1.0, 0.0}).amplitudes() * 3.0));
  CHECK_THROWS_AS(PureState::normalized(DenseVector::Zero(2)), NormalizationError);
  CHECK_THROWS_AS(PureState::basis(2, 2), InvalidArgument);
}

TEST_CASE("density matrix invariants are enforced") {
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{0.5, 0.5}, {0.0, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{0.6, 0.0}, {0.0, 0.6}}), NormalizationError);
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{1.5, 0.0}, {0.0, -0.5}}), InvalidArgument);
  CHECK_NOTHROW(DensityMatrix::maximally_mixed(3));
}

TEST_CASE("density_from_pure examples") {
  CHECK(max_abs_entry(density_from_pure(PureState::basis(2, 0)).dense() - diag_state({1, 0}).dense()) == 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  const auto plus = density_from_pure(vec({r, r}));
  CHECK(max_abs_entry(plus.dense() - DenseMatrix::Constant(2, 2, 0.5)) <= 1e-15);

  const Complex a0(0.6, 0.0);
  const Complex a1(0.0, 0.8);
  const auto rho = density_from_pure(vec({a0, a1}));
  CHECK(std::abs(rho(0, 0) - std::norm(a0)) <= 1e-15);
  CHECK(std::abs(rho(0, 1) - a0 * std::conj(a1)) <= 1e-15);
  CHECK(std::abs(rho(1, 0) - a1 * std::conj(a0)) <= 1e-15);
}

TEST_CASE("density_from_pure has spectrum {1, 0, ...}") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = density_from_pure(random_pure_state(rng, 2 + rng.index(5)));
    const auto eig = eigh(rho.dense(), false);
    CHECK_THAT(eig.values(eig.values.size() - 1), WithinAbs(1.0, 1e-10));
    for (Eigen::Index i = 0; i + 1 < eig.values.size(); ++i) CHECK(std::abs(eig.values(i)) <= 1e-10);
  }
}

TEST_CASE("mixture examples and errors") {
  const auto rho = diag_state({0.3, 0.7});
  CHECK(max_abs_entry(mixture({1.0}, {rho}).dense() - rho.dense()) == 0.0);
  const auto half = mixture({0.5, 0.5}, {diag_state({1, 0}), diag_state({0, 1})});
  CHECK(max_abs_entry(half.dense() - DensityMatrix::maximally_mixed(2).dense()) == 0.0);

  Rng rng(2);
  const auto spec = SuperpositionSpec::random(rng);
  const auto [p0, p1] = random_orthonormal_pair(rng, 3);
  const auto m = collapsed_mixture(spec, p0, p1);
  // In the (psi0, psi1) basis the mixture is diag(|a0|^2, |a1|^2).
  CHECK_THAT(std::real(p0.amplitudes().dot(m.dense() * p0.amplitudes())), WithinAbs(spec.weight0(), 1e-12));
  CHECK_THAT(std::abs(p0.amplitudes().dot(m.dense() * p1.amplitudes())), WithinAbs(0.0, 1e-12));

  CHECK_THROWS_AS(mixture({0.5, 0.6}, {rho, rho}), NormalizationError);
  CHECK_THROWS_AS(mixture({0.5, 0.5}, {rho, DensityMatrix::maximally_mixed(3)}), DimensionError);
  CHECK_THROWS_AS(mixture({1.0}, {rho, rho}), DimensionError);
  CHECK_THROWS_AS(mixture({1.5, -0.5}, {rho, rho}), InvalidArgument);
}

TEST_CASE("mixtures of valid states are valid") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 2 + rng.index(4);
    const double w = rng.uniform();
    const auto m = mixture({w, 1.0 - w}, {random_density(rng, d, d), random_density(rng, d, 1)});
    CHECK_NOTHROW(DensityMatrix::validate(m.matrix()));
  }
}

TEST_CASE("purification examples") {
  const auto pure = purify(density_from_pure(PureState::basis(3, 1)));
  CHECK(pure.aux_dim == 1);
  CHECK_THAT(std::norm(pure.vector[1]), WithinAbs(1.0, 1e-12));

  const auto mixed = purify(DensityMatrix::maximally_mixed(2));
  CHECK(mixed.aux_dim == 2);
  CHECK_THAT(mixed.weights[0], WithinAbs(0.5, 1e-12));
  CHECK_THAT(mixed.weights[1], WithinAbs(0.5, 1e-12));
  const DenseMatrix back = oracle::trace_left(density_from_pure(mixed.vector).dense(), 2, 2);
  CHECK(max_abs_entry(back - DensityMatrix::maximally_mixed(2).dense()) <= 1e-12);

  const auto skew = purify(diag_state({0.9, 0.1}));
  REQUIRE(skew.aux_dim == 2);
  CHECK_THAT(skew.weights[0], WithinAbs(0.9, 1e-12));
  CHECK_THAT(skew.weights[1], WithinAbs(0.1, 1e-12));
}

TEST_CASE("purification round-trips random states") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + rng.index(4);
    const std::size_t rank = 1 + rng.index(d);
    const auto tau = random_density(rng, d, rank);
    const auto p = purify(tau);
    CHECK(p.aux_dim == rank);
    const auto back = DensityMatrix::unchecked(
        partial_trace_ancilla(density_from_pure(p.vector).matrix(), p.aux_dim, d));
    CHECK(trace_distance(back, tau) <= 1e-10);
  }
}

TEST_CASE("trace distance examples and SVD oracle") {
  const auto rho = diag_state({0.25, 0.75});
  CHECK(trace_distance(rho, rho) == 0.0);
  CHECK_THAT(trace_distance(diag_state({1, 0}), diag_state({0, 1})), WithinAbs(1.0, 1e-15));
  CHECK_THAT(trace_distance(DensityMatrix::maximally_mixed(2), diag_state({1, 0})), WithinAbs(0.5, 1e-15));
  CHECK_THROWS_AS(trace_distance(rho, DensityMatrix::maximally_mixed(3)), DimensionError);

  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 2 + rng.index(5);
    const auto a = random_density(rng, d, d);
    const auto b = random_density(rng, d, 1);
    CHECK_THAT(trace_distance(a, b), WithinAbs(oracle::svd_trace_distance(a.dense(), b.dense()), 1e-12));
  }
}

TEST_CASE("superposition coefficients are normalized") {
  CHECK_THROWS_AS(SuperpositionSpec(1.0, 1.0), NormalizationError);
  const SuperpositionSpec s(Complex(0.6, 0.0), Complex(0.0, 0.8));
  const auto psi = s.superpose(PureState::basis(2, 0), PureState::basis(2, 1));
  CHECK(std::abs(psi[1] - Complex(0.0, 0.8)) <= 1e-15);
}
