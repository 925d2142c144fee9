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

#include "clab/observables.hpp"
#include "oracles.hpp"

using namespace clab;
using Catch::Matchers::WithinAbs;

namespace {

const DenseMatrix I2 = DenseMatrix::Identity(2, 2);

DensityMatrix diag_state(std::initializer_list<Complex> d) {
  return DensityMatrix(ComplexMatrix::diagonal(std::vector<Complex>(d)));
}

/// Dense copy of an observable with the local structure dropped.
Observable flat(const Observable& a) { return Observable::general(ComplexMatrix(a.dense())); }

}  // namespace

TEST_CASE("site_local embeds with identities") {
  const auto sys = SiteSystem::qubits(2);
  const auto z0 = site_local(pauli::z(), 0, sys);
  CHECK(max_abs_entry(z0.dense() - oracle::kron(pauli::z().dense(), I2)) == 0.0);
  CHECK(z0.kind() == ObservableKind::micro);
  CHECK(z0.site() == 0);
  const auto x1 = site_local(pauli::x(), 1, sys);
  CHECK(max_abs_entry(x1.dense() - oracle::kron(I2, pauli::x().dense())) == 0.0);
  CHECK_THAT(spectral_norm(x1), WithinAbs(1.0, 1e-12));

  const SiteSystem mixed({3, 2, 2});
  Rng rng(1);
  const auto h = random_hermitian(rng, 2);
  const auto m = site_local(h, 1, mixed);
  CHECK(max_abs_entry(m.dense() - oracle::pauli_string({DenseMatrix::Identity(3, 3), h.dense(), I2})) <= 1e-15);
  CHECK_THAT(spectral_norm(m), WithinAbs(spectral_norm(h), 1e-12));

  CHECK_THROWS_AS(site_local(pauli::z(), 2, sys), InvalidArgument);
  CHECK_THROWS_AS(site_local(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}, 0, sys), InvalidArgument);
  CHECK_THROWS_AS(site_local(ComplexMatrix::identity(3), 0, sys), DimensionError);
}

TEST_CASE("site_average examples") {
  const auto sys = SiteSystem::qubits(2);
  const auto b = site_average({pauli::z(), pauli::z()}, sys);
  const DenseMatrix expected = 0.5 * (oracle::kron(pauli::z().dense(), I2) + oracle::kron(I2, pauli::z().dense()));
  CHECK(max_abs_entry(b.dense() - expected) <= 1e-15);
  CHECK(b.kind() == ObservableKind::macro);
  CHECK_THAT(spectral_norm(b), WithinAbs(1.0, 1e-12));

  const auto zero = site_average({ComplexMatrix::zero(2), ComplexMatrix::zero(2)}, sys);
  CHECK(max_abs_entry(zero.dense()) == 0.0);
  CHECK(spectral_norm(zero) == 0.0);

  CHECK_THROWS_AS(site_average({pauli::z()}, sys), DimensionError);
}

TEST_CASE("site_average demotes when a term outgrows the average") {
  // (z (x) 1 - 1 (x) z) / 2 has eigenvalues {0, 1, -1, 0}, norm 1 = ||z||.
  const auto sys = SiteSystem::qubits(2);
  CHECK(site_average({pauli::z(), pauli::z() * Complex(-1.0)}, sys).kind() == ObservableKind::macro);
  // A large term next to a zero term: ||Y|| = 1.5 < 3 = ||Y_0||.
  const auto y = site_average({pauli::z() * Complex(3.0), ComplexMatrix::zero(2)}, sys);
  CHECK(y.kind() == ObservableKind::general);
  CHECK_THAT(spectral_norm(y), WithinAbs(1.5, 1e-12));
}

TEST_CASE("the chain pointer is the average of sigma_z") {
  const std::size_t n = 4;
  const auto sys = SiteSystem::qubits(n);
  const auto b = site_average(std::vector<ComplexMatrix>(n, pauli::z()), sys);
  DenseMatrix expected = DenseMatrix::Zero(16, 16);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<DenseMatrix> f(n, I2);
    f[i] = pauli::z().dense();
    expected += oracle::pauli_string(f) / static_cast<double>(n);
  }
  CHECK(max_abs_entry(b.dense() - expected) <= 1e-15);
}

TEST_CASE("expectation examples") {
  CHECK_THAT(expectation(diag_state({1, 0}), Observable::general(pauli::z())), WithinAbs(1.0, 1e-15));
  CHECK_THAT(expectation(DensityMatrix::maximally_mixed(2), Observable::general(pauli::z())), WithinAbs(0.0, 1e-15));
  const double r = 1.0 / std::sqrt(2.0);
  DenseVector plus(2);
  plus << r, r;
  CHECK_THAT(expectation(density_from_pure(PureState(plus)), Observable::general(pauli::x())), WithinAbs(1.0, 1e-15));
  CHECK_THROWS_AS(expectation(DensityMatrix::maximally_mixed(3), Observable::general(pauli::x())), DimensionError);
}

TEST_CASE("expectation is linear and structure-independent") {
  Rng rng(41);
  const SiteSystem sys({2, 3, 2});
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = random_density(rng, sys.total_dim(), 3);
    std::vector<ComplexMatrix> ops;
    for (std::size_t s = 0; s < sys.size(); ++s) ops.push_back(random_hermitian(rng, sys.site_dim(s)));
    const auto avg = site_average(ops, sys);
    const auto a = Observable::general(random_hermitian(rng, sys.total_dim()));
    const auto b = Observable::general(random_hermitian(rng, sys.total_dim()));
    const double s = rng.normal();
    const auto combo = Observable::general(ComplexMatrix(DenseMatrix(a.dense() + s * b.dense())));
    CHECK_THAT(expectation(rho, combo), WithinAbs(expectation(rho, a) + s * expectation(rho, b), 1e-12));
    CHECK_THAT(expectation(rho, avg), WithinAbs(expectation(rho, flat(avg)), 1e-12));
    CHECK_THAT(variance(rho, avg), WithinAbs(variance(rho, flat(avg)), 1e-12));
  }
}

TEST_CASE("variance examples") {
  const auto z = Observable::general(pauli::z());
  CHECK(variance(diag_state({0, 1}), z) == 0.0);
  CHECK_THAT(variance(DensityMatrix::maximally_mixed(2), z), WithinAbs(1.0, 1e-15));

  // Product of per-site states diag(p, 1 - p): each site has <z> = 2p - 1.
  // The average over n sites has variance (1 - <z>^2) / n.
  for (std::size_t n : {1u, 3u, 5u}) {
    const double p = 0.8;
    const double eps = 2 * p - 1;
    ComplexMatrix tau = ComplexMatrix::diagonal({p, 1 - p});
    for (std::size_t i = 1; i < n; ++i) tau = tensor(tau, ComplexMatrix::diagonal({p, 1 - p}));
    const auto b = site_average(std::vector<ComplexMatrix>(n, pauli::z()), SiteSystem::qubits(n));
    CHECK_THAT(variance(DensityMatrix(tau), b), WithinAbs((1 - eps * eps) / static_cast<double>(n), 1e-12));
  }
}

TEST_CASE("variance is nonnegative and vanishes on eigenspaces") {
  Rng rng(43);
  const auto sys = SiteSystem::qubits(3);
  const auto b = site_average(std::vector<ComplexMatrix>(3, pauli::z()), sys);
  for (int trial = 0; trial < 10; ++trial) CHECK(variance(random_density(rng, 8, 4), b) >= 0.0);
  // Basis states 3 (011) and 5 (101) share the eigenvalue -1/3.
  DenseVector v = DenseVector::Zero(8);
  v(3) = 0.6;
  v(5) = Complex(0.0, 0.8);
  CHECK(variance(density_from_pure(PureState(v)), b) <= 1e-15);
  v(0) = 0.1;
  CHECK(variance(density_from_pure(PureState::normalized(v)), b) > 1e-3);
}

TEST_CASE("commutator_delta examples and errors") {
  const auto x = Observable::general(pauli::x());
  const auto z = Observable::general(pauli::z());
  CHECK_THAT(commutator_delta(x, z), WithinAbs(2.0, 1e-12));
  CHECK(commutator_delta(z, z) == 0.0);
  CHECK_THROWS_AS(commutator_delta(Observable::general(ComplexMatrix::zero(2)), z), UndefinedDeltaError);
}

TEST_CASE("structured norms and commutators agree with dense ones") {
  Rng rng(47);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 2 + rng.index(3);
    std::vector<std::size_t> dims(n);
    for (auto& d : dims) d = 2 + rng.index(2);
    const SiteSystem sys(dims);
    std::vector<ComplexMatrix> ops_a;
    std::vector<ComplexMatrix> ops_b;
    for (std::size_t s = 0; s < n; ++s) {
      ops_a.push_back(random_hermitian(rng, dims[s]));
      ops_b.push_back(random_hermitian(rng, dims[s]));
    }
    const auto a = site_average(ops_a, sys);
    const auto b = site_average(ops_b, sys);
    const std::size_t site = rng.index(n);
    const auto m = site_local(ops_a[site], site, sys);
    CHECK(std::abs(spectral_norm(a) - oracle::svd_norm(a.dense())) <= 1e-10);
    CHECK(std::abs(commutator_norm(a, b) - oracle::svd_norm(a.dense() * b.dense() - b.dense() * a.dense())) <= 1e-10);
    CHECK(std::abs(commutator_norm(m, b) - commutator_norm(flat(m), flat(b))) <= 1e-10);
    CHECK(std::abs(commutator_delta(m, b) - commutator_delta(flat(m), flat(b))) <= 1e-10);
  }
}

TEST_CASE("micro and macro observables commute with a macro pointer up to 2/N") {
  Rng rng(53);
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto chain = SiteSystem::qubits(n);
    const auto pointer = tensor_identity(site_average(std::vector<ComplexMatrix>(n, pauli::z()), chain), 2);
    const auto full = chain.append(2);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t site = rng.index(n + 1);
      const auto micro = site_local(random_hermitian(rng, 2), site, full);
      std::vector<ComplexMatrix> ops;
      for (std::size_t s = 0; s <= n; ++s) ops.push_back(random_hermitian(rng, 2));
      const auto macro = site_average(ops, full);
      const double bound = 2.0 / static_cast<double>(n) + 1e-9;
      CHECK(commutator_delta(micro, pointer) <= bound);
      if (macro.kind() == ObservableKind::macro) CHECK(commutator_delta(macro, pointer) <= bound);
      CHECK(commutator_delta(flat(micro), flat(pointer)) <= bound);
    }
  }
}

TEST_CASE("as_micro recognizes site-local matrices") {
  const SiteSystem sys({2, 3});
  Rng rng(59);
  const auto h = random_hermitian(rng, 3);
  const auto m = tensor(ComplexMatrix::identity(2), h);
  const auto found = as_micro(m, 1, sys);
  REQUIRE(found.has_value());
  CHECK(found->kind() == ObservableKind::micro);
  CHECK(max_abs_entry(found->dense() - m.dense()) <= 1e-12);
  CHECK_FALSE(as_micro(m, 0, sys).has_value());
  CHECK_FALSE(as_micro(tensor(pauli::z(), h), 1, sys).has_value());
}

TEST_CASE("site systems respect the dimension cap") {
  CHECK(SiteSystem::qubits(12).total_dim() == 4096);
  CHECK_THROWS_AS(SiteSystem::qubits(13), DimensionError);
  CHECK_THROWS_AS(SiteSystem({2, 0}), InvalidArgument);
}
