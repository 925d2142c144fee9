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

// Dense complex linear algebra on square matrices.
//
// Composite indices follow the ancilla-major convention: for a space
// K (x) H the pair (k, h) is stored at k * dimH + h, so the left tensor
// factor is always the ancilla.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clab/error.hpp"

namespace clab {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultDimensionCap = 4096;

namespace detail {
inline std::atomic<std::size_t>& dimension_cap_storage() {
  static std::atomic<std::size_t> cap{kDefaultDimensionCap};
  return cap;
}
}  // namespace detail

/// Largest matrix dimension any dense operation will produce.
inline std::size_t dimension_cap() { return detail::dimension_cap_storage().load(); }

inline void set_dimension_cap(std::size_t cap) {
  if (cap == 0) throw InvalidArgument("dimension cap must be positive");
  detail::dimension_cap_storage().store(cap);
}

inline void check_dimension_cap(std::size_t dim, const std::string& what) {
  if (dim > dimension_cap()) {
    throw DimensionError(what + ": dimension " + std::to_string(dim) +
                         " exceeds cap " + std::to_string(dimension_cap()));
  }
}

/// Dense square complex matrix with finite entries.
class ComplexMatrix {
 public:
  ComplexMatrix() : data_(DenseMatrix::Zero(1, 1)) {}

  explicit ComplexMatrix(std::size_t dim) : data_(DenseMatrix::Zero(as_index(dim), as_index(dim))) {
    if (dim == 0) throw InvalidArgument("ComplexMatrix: dimension must be positive");
  }

  explicit ComplexMatrix(DenseMatrix data) : data_(std::move(data)) { validate(); }

  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    data_ = DenseMatrix::Zero(n, n);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
      if (static_cast<Eigen::Index>(row.size()) != n) {
        throw InvalidArgument("ComplexMatrix: rows must all have length " + std::to_string(n));
      }
      Eigen::Index j = 0;
      for (const auto& v : row) data_(i, j++) = v;
      ++i;
    }
    validate();
  }

  static ComplexMatrix identity(std::size_t dim) {
    return ComplexMatrix(DenseMatrix::Identity(as_index(dim), as_index(dim)));
  }
  static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }
  static ComplexMatrix diagonal(const std::vector<Complex>& diag) {
    DenseMatrix m = DenseMatrix::Zero(as_index(diag.size()), as_index(diag.size()));
    for (std::size_t i = 0; i < diag.size(); ++i) m(as_index(i), as_index(i)) = diag[i];
    return ComplexMatrix(std::move(m));
  }
  /// |v><w|
  static ComplexMatrix outer(const DenseVector& v, const DenseVector& w) {
    if (v.size() != w.size()) {
      throw DimensionError::mismatch("outer", static_cast<std::size_t>(v.size()),
                                     static_cast<std::size_t>(w.size()));
    }
    return ComplexMatrix(DenseMatrix(v * w.adjoint()));
  }

  std::size_t dim() const { return static_cast<std::size_t>(data_.rows()); }
  Complex operator()(std::size_t i, std::size_t j) const { return data_(as_index(i), as_index(j)); }
  const DenseMatrix& dense() const { return data_; }

  ComplexMatrix adjoint() const { return ComplexMatrix(DenseMatrix(data_.adjoint())); }
  Complex trace() const { return data_.trace(); }

  ComplexMatrix operator+(const ComplexMatrix& o) const {
    require_same_dim(o, "operator+");
    return ComplexMatrix(DenseMatrix(data_ + o.data_));
  }
  ComplexMatrix operator-(const ComplexMatrix& o) const {
    require_same_dim(o, "operator-");
    return ComplexMatrix(DenseMatrix(data_ - o.data_));
  }
  ComplexMatrix operator*(const ComplexMatrix& o) const {
    require_same_dim(o, "operator*");
    return ComplexMatrix(DenseMatrix(data_ * o.data_));
  }
  ComplexMatrix operator*(Complex s) const { return ComplexMatrix(DenseMatrix(data_ * s)); }
  friend ComplexMatrix operator*(Complex s, const ComplexMatrix& m) { return m * s; }

  DenseVector apply(const DenseVector& v) const {
    if (static_cast<std::size_t>(v.size()) != dim()) {
      throw DimensionError::mismatch("apply", dim(), static_cast<std::size_t>(v.size()));
    }
    return data_ * v;
  }

  static Eigen::Index as_index(std::size_t n) { return static_cast<Eigen::Index>(n); }

 private:
  void validate() const {
    if (data_.rows() != data_.cols()) {
      throw InvalidArgument("ComplexMatrix: not square (" + std::to_string(data_.rows()) + "x" +
                            std::to_string(data_.cols()) + ")");
    }
    if (data_.rows() == 0) throw InvalidArgument("ComplexMatrix: dimension must be positive");
    if (!data_.allFinite()) throw InvalidArgument("ComplexMatrix: non-finite entry");
  }

  void require_same_dim(const ComplexMatrix& o, const char* what) const {
    if (o.dim() != dim()) throw DimensionError::mismatch(what, dim(), o.dim());
  }

  DenseMatrix data_;
};

/// Pauli matrices, sigma_z = diag(1, -1).
namespace pauli {
inline ComplexMatrix x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix y() { return {{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}}; }
inline ComplexMatrix z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
}  // namespace pauli

/// Kronecker product, left factor major.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t da = a.dim();
  const std::size_t db = b.dim();
  if (da > std::numeric_limits<std::size_t>::max() / db) {
    throw DimensionError("tensor: dimension product overflows");
  }
  check_dimension_cap(da * db, "tensor");
  const auto n = ComplexMatrix::as_index(db);
  DenseMatrix out(ComplexMatrix::as_index(da * db), ComplexMatrix::as_index(da * db));
  for (Eigen::Index i = 0; i < a.dense().rows(); ++i) {
    for (Eigen::Index j = 0; j < a.dense().cols(); ++j) {
      out.block(i * n, j * n, n, n) = a.dense()(i, j) * b.dense();
    }
  }
  return ComplexMatrix(std::move(out));
}

inline DenseVector tensor(const DenseVector& a, const DenseVector& b) {
  DenseVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Traces out the left (ancilla) factor of a K (x) H operator.
inline ComplexMatrix partial_trace_ancilla(const ComplexMatrix& m, std::size_t dim_k,
                                           std::size_t dim_h) {
  if (dim_k == 0 || dim_h == 0 || m.dim() != dim_k * dim_h) {
    throw DimensionError::mismatch("partial_trace_ancilla", dim_k * dim_h, m.dim());
  }
  const auto h = ComplexMatrix::as_index(dim_h);
  DenseMatrix out = DenseMatrix::Zero(h, h);
  for (Eigen::Index k = 0; k < ComplexMatrix::as_index(dim_k); ++k) {
    out += m.dense().block(k * h, k * h, h, h);
  }
  return ComplexMatrix(std::move(out));
}

/// Traces out the right (system) factor of a K (x) H operator.
inline ComplexMatrix partial_trace_system(const ComplexMatrix& m, std::size_t dim_k,
                                          std::size_t dim_h) {
  if (dim_k == 0 || dim_h == 0 || m.dim() != dim_k * dim_h) {
    throw DimensionError::mismatch("partial_trace_system", dim_k * dim_h, m.dim());
  }
  const auto h = ComplexMatrix::as_index(dim_h);
  const auto k = ComplexMatrix::as_index(dim_k);
  DenseMatrix out(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) out(i, j) = m.dense().block(i * h, j * h, h, h).trace();
  }
  return ComplexMatrix(std::move(out));
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError::mismatch("commutator", a.dim(), b.dim());
  return ComplexMatrix(DenseMatrix(a.dense() * b.dense() - b.dense() * a.dense()));
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
struct HermitianEigen {
  RealVector values;
  DenseMatrix vectors;
};

inline HermitianEigen eigh(const DenseMatrix& hermitian, bool with_vectors = true) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(
      hermitian, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eigh: eigensolver did not converge");
  HermitianEigen out;
  out.values = solver.eigenvalues();
  if (with_vectors) out.vectors = solver.eigenvectors();
  return out;
}

/// Largest singular value, as the square root of the top eigenvalue of a^dagger a.
inline double spectral_norm(const DenseMatrix& a) {
  if (a.size() == 0) return 0.0;
  const DenseMatrix gram = a.adjoint() * a;
  const auto eig = eigh(gram, false);
  return std::sqrt(std::max(0.0, eig.values(eig.values.size() - 1)));
}

inline double spectral_norm(const ComplexMatrix& a) { return spectral_norm(a.dense()); }

/// Largest absolute entry; used for entrywise comparisons.
inline double max_abs_entry(const DenseMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// A matrix with exactly one nonzero entry per column in distinct rows, e.g.
/// a permutation or a controlled-flip circuit. Column c maps to row row[c]
/// with coefficient value[c].
struct MonomialForm {
  std::vector<std::size_t> row;
  std::vector<Complex> value;
};

inline std::optional<MonomialForm> monomial_form(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  MonomialForm form;
  form.row.assign(n, 0);
  form.value.assign(n, Complex(0.0));
  std::vector<bool> taken(n, false);
  const DenseMatrix& d = m.dense();
  for (std::size_t c = 0; c < n; ++c) {
    bool found = false;
    for (std::size_t r = 0; r < n; ++r) {
      const Complex v = d(ComplexMatrix::as_index(r), ComplexMatrix::as_index(c));
      if (v == Complex(0.0)) continue;
      if (found || taken[r]) return std::nullopt;
      found = true;
      taken[r] = true;
      form.row[c] = r;
      form.value[c] = v;
    }
    if (!found) return std::nullopt;
  }
  return form;
}

/// u x u^dagger.
inline DenseMatrix conjugate(const DenseMatrix& u, const DenseMatrix& x) {
  return u * x * u.adjoint();
}

inline DenseMatrix conjugate(const MonomialForm& u, const DenseMatrix& x) {
  const auto n = x.rows();
  DenseMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto rj = ComplexMatrix::as_index(u.row[static_cast<std::size_t>(j)]);
    const Complex vj = std::conj(u.value[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < n; ++i) {
      out(ComplexMatrix::as_index(u.row[static_cast<std::size_t>(i)]), rj) =
          u.value[static_cast<std::size_t>(i)] * x(i, j) * vj;
    }
  }
  return out;
}

/// ||a|| <= tol in spectral norm. The Frobenius norm bounds the spectral norm
/// from above, so a small Frobenius norm settles the question without an
/// eigensolve.
inline bool norm_within(const DenseMatrix& a, double tol) {
  if (a.norm() <= tol) return true;
  return spectral_norm(a) <= tol;
}

inline bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("is_hermitian: tolerance must be positive");
  return norm_within(DenseMatrix(a.dense() - a.dense().adjoint()), tol);
}

inline bool is_unitary(const ComplexMatrix& u, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("is_unitary: tolerance must be positive");
  if (auto form = monomial_form(u)) {
    // u^dagger u is diagonal with entries |value|^2.
    double worst = 0.0;
    for (const auto& v : form->value) worst = std::max(worst, std::abs(std::norm(v) - 1.0));
    return worst <= tol;
  }
  const auto n = ComplexMatrix::as_index(u.dim());
  return norm_within(DenseMatrix(u.dense().adjoint() * u.dense() - DenseMatrix::Identity(n, n)), tol);
}

inline bool is_projection(const ComplexMatrix& q, double tol) {
  return is_hermitian(q, tol) && max_abs_entry(q.dense() * q.dense() - q.dense()) <= tol;
}

}  // namespace clab
