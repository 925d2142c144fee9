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

// Reference computations used by the tests. Each one takes a different route
// from the library: plain index loops, SVD instead of eigh, dense matrices
// instead of local structure.

#pragma once

#include <Eigen/SVD>

#include "clab/qla.hpp"

namespace oracle {

using clab::Complex;
using clab::DenseMatrix;

inline DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// result[h, h'] = sum_k m[(k, h), (k, h')]
inline DenseMatrix trace_left(const DenseMatrix& m, Eigen::Index dk, Eigen::Index dh) {
  DenseMatrix out = DenseMatrix::Zero(dh, dh);
  for (Eigen::Index h = 0; h < dh; ++h)
    for (Eigen::Index hp = 0; hp < dh; ++hp)
      for (Eigen::Index k = 0; k < dk; ++k) out(h, hp) += m(k * dh + h, k * dh + hp);
  return out;
}

inline double svd_norm(const DenseMatrix& a) {
  Eigen::JacobiSVD<DenseMatrix> svd(a);
  return svd.singularValues()(0);
}

/// Trace norm / 2 from singular values.
inline double svd_trace_distance(const DenseMatrix& a, const DenseMatrix& b) {
  Eigen::JacobiSVD<DenseMatrix> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

inline DenseMatrix pauli_string(const std::vector<DenseMatrix>& factors) {
  DenseMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

}  // namespace oracle
