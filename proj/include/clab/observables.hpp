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

// Observables on multi-site systems.
//
// A microscopic observable acts on a single site. A macroscopic observable is
// the site average (1/N) sum_i Y_i with every ||Y_i|| <= ||Y||. Both keep
// their site-local terms and build the dense matrix only on demand: norms,
// commutator ratios and traces of such sums reduce to per-site work, which
// is what lets the chain models run at dimension 2^11 without dense
// eigensolves.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clab/qla.hpp"
#include "clab/states.hpp"

namespace clab {

inline constexpr double kHermitianTolerance = 1e-10;

/// Tensor product of subsystems, listed left (most significant) first.
class SiteSystem {
 public:
  explicit SiteSystem(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw InvalidArgument("SiteSystem: no sites");
    total_ = 1;
    for (auto d : dims_) {
      if (d == 0) throw InvalidArgument("SiteSystem: zero site dimension");
      if (total_ > dimension_cap() / d) {
        throw DimensionError("SiteSystem: total dimension exceeds cap " + std::to_string(dimension_cap()));
      }
      total_ *= d;
    }
    check_dimension_cap(total_, "SiteSystem");
  }

  /// n identical qubits.
  static SiteSystem qubits(std::size_t n) { return SiteSystem(std::vector<std::size_t>(n, 2)); }

  std::size_t size() const { return dims_.size(); }
  std::size_t total_dim() const { return total_; }
  std::size_t site_dim(std::size_t site) const { return dims_.at(site); }
  const std::vector<std::size_t>& dims() const { return dims_; }

  /// Product of the dimensions strictly right of `site`.
  std::size_t stride(std::size_t site) const {
    std::size_t s = 1;
    for (std::size_t i = site + 1; i < dims_.size(); ++i) s *= dims_[i];
    return s;
  }

  SiteSystem append(std::size_t dim) const {
    auto d = dims_;
    d.push_back(dim);
    return SiteSystem(std::move(d));
  }

  bool operator==(const SiteSystem& o) const { return dims_ == o.dims_; }

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 1;
};

/// 1 (x) ... (x) op (x) ... (x) 1 with op at `site`.
namespace detail {
/// out += scale * embed(op, site, sys), touching only the nonzero pattern.
inline void add_embedded(DenseMatrix& out, const ComplexMatrix& op, std::size_t site, const SiteSystem& sys,
                         Complex scale = 1.0) {
  const std::size_t ds = sys.site_dim(site);
  const std::size_t right = sys.stride(site);
  const std::size_t left = sys.total_dim() / (ds * right);
  for (std::size_t l = 0; l < left; ++l) {
    for (std::size_t a = 0; a < ds; ++a) {
      for (std::size_t b = 0; b < ds; ++b) {
        const Complex v = scale * op(a, b);
        if (v == Complex(0.0)) continue;
        const std::size_t row0 = (l * ds + a) * right;
        const std::size_t col0 = (l * ds + b) * right;
        for (std::size_t r = 0; r < right; ++r) {
          out(ComplexMatrix::as_index(row0 + r), ComplexMatrix::as_index(col0 + r)) += v;
        }
      }
    }
  }
}
}  // namespace detail

inline ComplexMatrix embed(const ComplexMatrix& op, std::size_t site, const SiteSystem& sys) {
  if (site >= sys.size()) throw InvalidArgument("embed: site " + std::to_string(site) + " out of range");
  const std::size_t ds = sys.site_dim(site);
  if (op.dim() != ds) throw DimensionError::mismatch("embed: site operator", ds, op.dim());
  const auto n = ComplexMatrix::as_index(sys.total_dim());
  DenseMatrix out = DenseMatrix::Zero(n, n);
  detail::add_embedded(out, op, site, sys);
  return ComplexMatrix(std::move(out));
}

/// op applied to the `site` factor of every column of x.
inline DenseMatrix apply_at_site(const ComplexMatrix& op, std::size_t site, const SiteSystem& sys,
                                 const DenseMatrix& x) {
  const std::size_t ds = sys.site_dim(site);
  const std::size_t right = sys.stride(site);
  const std::size_t left = sys.total_dim() / (ds * right);
  const auto r = ComplexMatrix::as_index(right);
  DenseMatrix out = DenseMatrix::Zero(x.rows(), x.cols());
  for (std::size_t l = 0; l < left; ++l) {
    for (std::size_t a = 0; a < ds; ++a) {
      for (std::size_t b = 0; b < ds; ++b) {
        const Complex v = op(a, b);
        if (v == Complex(0.0)) continue;
        const auto row0 = ComplexMatrix::as_index((l * ds + a) * right);
        const auto src0 = ComplexMatrix::as_index((l * ds + b) * right);
        out.middleRows(row0, r) += v * x.middleRows(src0, r);
      }
    }
  }
  return out;
}

/// out += scale * x * embed(op, site, sys); touches contiguous column blocks.
inline void add_at_site_right(DenseMatrix& out, const DenseMatrix& x, const ComplexMatrix& op, std::size_t site,
                              const SiteSystem& sys, Complex scale = 1.0) {
  const std::size_t ds = sys.site_dim(site);
  const std::size_t right = sys.stride(site);
  const std::size_t left = sys.total_dim() / (ds * right);
  const auto r = ComplexMatrix::as_index(right);
  for (std::size_t l = 0; l < left; ++l) {
    for (std::size_t a = 0; a < ds; ++a) {
      for (std::size_t b = 0; b < ds; ++b) {
        const Complex v = scale * op(a, b);
        if (v == Complex(0.0)) continue;
        const auto row0 = ComplexMatrix::as_index((l * ds + a) * right);
        const auto col0 = ComplexMatrix::as_index((l * ds + b) * right);
        out.middleCols(col0, r) += v * x.middleCols(row0, r);
      }
    }
  }
}

struct LocalTerm {
  std::size_t site;
  ComplexMatrix op;
};

/// scale * sum_terms embed(op, site); one term per site at most.
struct LocalSum {
  SiteSystem sys;
  std::vector<LocalTerm> terms;
  double scale = 1.0;
};

enum class ObservableKind { micro, macro, general };

inline const char* to_string(ObservableKind k) {
  switch (k) {
    case ObservableKind::micro: return "micro";
    case ObservableKind::macro: return "macro";
    case ObservableKind::general: return "general";
  }
  return "general";
}

class Observable {
 public:
  /// Any Hermitian operator.
  static Observable general(ComplexMatrix m) {
    require_hermitian(m, "Observable::general");
    const std::size_t d = m.dim();
    auto dense = std::make_shared<Dense>();
    std::call_once(dense->once, [&] { dense->m.emplace(std::move(m)); });
    return Observable(d, std::move(dense), ObservableKind::general, 0, std::nullopt);
  }

  /// The dense matrix of a local sum is built on first use.
  static Observable from_local_sum(LocalSum sum, ObservableKind kind, std::size_t site = 0) {
    for (const auto& t : sum.terms) {
      require_hermitian(t.op, "Observable: local term");
      if (t.site >= sum.sys.size()) throw InvalidArgument("Observable: term site out of range");
      if (t.op.dim() != sum.sys.site_dim(t.site)) {
        throw DimensionError::mismatch("Observable: local term", sum.sys.site_dim(t.site), t.op.dim());
      }
    }
    if (!std::isfinite(sum.scale)) throw InvalidArgument("Observable: non-finite scale");
    const std::size_t d = sum.sys.total_dim();
    return Observable(d, std::make_shared<Dense>(), kind, site, std::move(sum));
  }

  std::size_t dim() const { return dim_; }
  const ComplexMatrix& matrix() const {
    std::call_once(dense_->once, [this] {
      const auto n = ComplexMatrix::as_index(dim_);
      DenseMatrix acc = DenseMatrix::Zero(n, n);
      for (const auto& t : local_->terms) detail::add_embedded(acc, t.op, t.site, local_->sys, local_->scale);
      dense_->m.emplace(std::move(acc));
    });
    return *dense_->m;
  }
  const DenseMatrix& dense() const { return matrix().dense(); }
  ObservableKind kind() const { return kind_; }
  /// Site of a micro observable.
  std::size_t site() const { return site_; }
  const std::optional<LocalSum>& local_sum() const { return local_; }

  Observable demoted() const { return Observable(dim_, dense_, ObservableKind::general, 0, local_); }

 private:
  struct Dense {
    std::once_flag once;
    std::optional<ComplexMatrix> m;
  };

  Observable(std::size_t dim, std::shared_ptr<Dense> dense, ObservableKind kind, std::size_t site,
             std::optional<LocalSum> local)
      : dim_(dim), dense_(std::move(dense)), kind_(kind), site_(site), local_(std::move(local)) {}

  static void require_hermitian(const ComplexMatrix& m, const char* what) {
    if (!is_hermitian(m, kHermitianTolerance)) throw InvalidArgument(std::string(what) + ": operator is not Hermitian");
  }

  std::size_t dim_;
  std::shared_ptr<Dense> dense_;
  ObservableKind kind_;
  std::size_t site_;
  std::optional<LocalSum> local_;
};

/// Micro observable: op at `site`, identity elsewhere.
inline Observable site_local(const ComplexMatrix& op, std::size_t site, const SiteSystem& sys) {
  if (site >= sys.size()) throw InvalidArgument("site_local: site " + std::to_string(site) + " out of range");
  return Observable::from_local_sum(LocalSum{sys, {{site, op}}, 1.0}, ObservableKind::micro, site);
}

namespace detail {

/// Per-site sum of the terms of a local sum (unscaled).
inline std::map<std::size_t, DenseMatrix> terms_by_site(const LocalSum& s) {
  std::map<std::size_t, DenseMatrix> out;
  for (const auto& t : s.terms) {
    auto [it, fresh] = out.try_emplace(t.site, t.op.dense());
    if (!fresh) it->second += t.op.dense();
  }
  return out;
}

/// Spectral norm of sum_i embed(H_i) for Hermitian H_i on distinct sites:
/// the spectrum is every sum of one eigenvalue per site.
inline double norm_of_site_sum(const std::vector<DenseMatrix>& hermitian_terms) {
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& h : hermitian_terms) {
    const auto eig = eigh(DenseMatrix((h + h.adjoint()) * 0.5), false);
    lo += eig.values(0);
    hi += eig.values(eig.values.size() - 1);
  }
  return std::max(std::abs(lo), std::abs(hi));
}

}  // namespace detail

/// Operator norm, using site-local structure when available.
inline double spectral_norm(const Observable& a) {
  if (const auto& s = a.local_sum()) {
    std::vector<DenseMatrix> terms;
    for (auto& [site, op] : detail::terms_by_site(*s)) terms.push_back(op);
    return std::abs(s->scale) * detail::norm_of_site_sum(terms);
  }
  return spectral_norm(a.matrix());
}

/// Macro observable (1/N) sum_i ops[i] over all N sites of `sys`. Demoted to
/// kind `general` when some ||ops[i]|| exceeds the norm of the average.
inline Observable site_average(const std::vector<ComplexMatrix>& ops, const SiteSystem& sys) {
  if (ops.size() != sys.size()) throw DimensionError::mismatch("site_average: operator count", sys.size(), ops.size());
  LocalSum sum{sys, {}, 1.0 / static_cast<double>(ops.size())};
  for (std::size_t i = 0; i < ops.size(); ++i) sum.terms.push_back({i, ops[i]});
  Observable y = Observable::from_local_sum(std::move(sum), ObservableKind::macro);
  const double ny = spectral_norm(y);
  for (const auto& op : ops) {
    if (spectral_norm(op) > ny + 1e-9) return y.demoted();
  }
  return y;
}

/// The same operator on the sites of `sys` followed by one extra site of
/// dimension dim_h: b (x) 1. Kind and local structure are carried over.
inline Observable tensor_identity(const Observable& b, std::size_t dim_h) {
  if (const auto& s = b.local_sum()) {
    LocalSum ext{s->sys.append(dim_h), s->terms, s->scale};
    return Observable::from_local_sum(std::move(ext), b.kind(), b.site());
  }
  return Observable::general(tensor(b.matrix(), ComplexMatrix::identity(dim_h)));
}

/// Identity tensored on the left: 1_aux (x) x.
inline Observable identity_tensor(std::size_t aux_dim, const Observable& x) {
  return Observable::general(tensor(ComplexMatrix::identity(aux_dim), x.matrix()));
}

/// Recognizes a matrix acting as the identity away from `site`: the partial
/// trace over the other sites, divided by their dimension, must re-embed to
/// the original matrix within tol.
inline std::optional<Observable> as_micro(const ComplexMatrix& m, std::size_t site, const SiteSystem& sys,
                                          double tol = kHermitianTolerance) {
  if (m.dim() != sys.total_dim()) throw DimensionError::mismatch("as_micro", sys.total_dim(), m.dim());
  if (site >= sys.size()) throw InvalidArgument("as_micro: site out of range");
  const std::size_t ds = sys.site_dim(site);
  const std::size_t right = sys.stride(site);
  const std::size_t left = sys.total_dim() / (ds * right);
  DenseMatrix reduced = DenseMatrix::Zero(ComplexMatrix::as_index(ds), ComplexMatrix::as_index(ds));
  for (std::size_t a = 0; a < ds; ++a) {
    for (std::size_t b = 0; b < ds; ++b) {
      Complex acc = 0.0;
      for (std::size_t l = 0; l < left; ++l) {
        for (std::size_t r = 0; r < right; ++r) {
          acc += m((l * ds + a) * right + r, (l * ds + b) * right + r);
        }
      }
      reduced(ComplexMatrix::as_index(a), ComplexMatrix::as_index(b)) = acc / static_cast<double>(left * right);
    }
  }
  ComplexMatrix op(std::move(reduced));
  if (!is_hermitian(op, tol)) return std::nullopt;
  if (max_abs_entry(embed(op, site, sys).dense() - m.dense()) > tol) return std::nullopt;
  return site_local(op, site, sys);
}

/// a * x, using site-local structure when available.
inline DenseMatrix apply_left(const Observable& a, const DenseMatrix& x) {
  if (static_cast<std::size_t>(x.rows()) != a.dim()) {
    throw DimensionError::mismatch("apply_left", a.dim(), static_cast<std::size_t>(x.rows()));
  }
  if (const auto& s = a.local_sum()) {
    DenseMatrix out = DenseMatrix::Zero(x.rows(), x.cols());
    for (const auto& t : s->terms) out += apply_at_site(t.op, t.site, s->sys, x);
    return out * s->scale;
  }
  return a.dense() * x;
}

/// x a, using site-local structure when available.
inline DenseMatrix apply_right(const DenseMatrix& x, const Observable& a) {
  if (static_cast<std::size_t>(x.cols()) != a.dim()) {
    throw DimensionError::mismatch("apply_right", a.dim(), static_cast<std::size_t>(x.cols()));
  }
  if (const auto& s = a.local_sum()) {
    DenseMatrix out = DenseMatrix::Zero(x.rows(), x.cols());
    for (const auto& t : s->terms) add_at_site_right(out, x, t.op, t.site, s->sys, s->scale);
    return out;
  }
  return x * a.dense();
}

namespace detail {
/// tr(x y) in O(d^2).
inline Complex trace_of_product(const DenseMatrix& x, const DenseMatrix& y) {
  return x.cwiseProduct(y.transpose()).sum();
}

/// tr(x h) for Hermitian h, reading both operands contiguously.
inline Complex trace_with_hermitian(const DenseMatrix& x, const DenseMatrix& h) {
  return x.cwiseProduct(h.conjugate()).sum();
}

/// tr(x embed(op, site, sys)) from the entries of x that embed touches.
inline Complex trace_with_embedded(const DenseMatrix& x, const ComplexMatrix& op, std::size_t site,
                                   const SiteSystem& sys) {
  const std::size_t ds = sys.site_dim(site);
  const std::size_t right = sys.stride(site);
  const std::size_t left = sys.total_dim() / (ds * right);
  Complex acc = 0.0;
  for (std::size_t l = 0; l < left; ++l) {
    for (std::size_t a = 0; a < ds; ++a) {
      for (std::size_t b = 0; b < ds; ++b) {
        const Complex v = op(a, b);
        if (v == Complex(0.0)) continue;
        const auto row0 = ComplexMatrix::as_index((l * ds + a) * right);
        const auto col0 = ComplexMatrix::as_index((l * ds + b) * right);
        const auto r = ComplexMatrix::as_index(right);
        acc += v * x.block(col0, row0, r, r).diagonal().sum();
      }
    }
  }
  return acc;
}

/// tr(x a), using site-local structure when available.
inline Complex trace_with(const DenseMatrix& x, const Observable& a) {
  if (const auto& s = a.local_sum()) {
    Complex acc = 0.0;
    for (const auto& t : s->terms) acc += trace_with_embedded(x, t.op, t.site, s->sys);
    return acc * s->scale;
  }
  return trace_with_hermitian(x, a.dense());
}
}  // namespace detail

/// Re tr(rho a); a non-negligible imaginary part means a was not Hermitian.
inline double expectation(const DensityMatrix& rho, const Observable& a) {
  if (rho.dim() != a.dim()) throw DimensionError::mismatch("expectation", a.dim(), rho.dim());
  const Complex v = detail::trace_with(rho.dense(), a);
  if (std::abs(v.imag()) > 1e-10) {
    throw InvalidArgument("expectation: imaginary residue " + std::to_string(v.imag()));
  }
  return v.real();
}

/// tr(rho b^2) - tr(rho b)^2.
inline double variance(const DensityMatrix& rho, const Observable& b) {
  if (rho.dim() != b.dim()) throw DimensionError::mismatch("variance", b.dim(), rho.dim());
  const double mean = expectation(rho, b);
  const double second = detail::trace_with(apply_right(rho.dense(), b), b).real();
  const double var = second - mean * mean;
  if (var < -1e-10) throw Error("variance: negative variance " + std::to_string(var));
  return std::max(var, 0.0);
}

/// ||[a, b]||, using site-local structure when both operands carry it.
inline double commutator_norm(const Observable& a, const Observable& b) {
  if (a.dim() != b.dim()) throw DimensionError::mismatch("commutator_norm", a.dim(), b.dim());
  const auto& sa = a.local_sum();
  const auto& sb = b.local_sum();
  if (sa && sb && sa->sys == sb->sys) {
    // Terms on different sites commute; i[A_i, B_i] is Hermitian.
    const auto ta = detail::terms_by_site(*sa);
    const auto tb = detail::terms_by_site(*sb);
    std::vector<DenseMatrix> local;
    for (const auto& [site, op_a] : ta) {
      auto it = tb.find(site);
      if (it == tb.end()) continue;
      const DenseMatrix& op_b = it->second;
      local.push_back(Complex(0, 1) * (op_a * op_b - op_b * op_a));
    }
    return std::abs(sa->scale * sb->scale) * detail::norm_of_site_sum(local);
  }
  return spectral_norm(commutator(a.matrix(), b.matrix()));
}

/// delta = ||[a, b]|| / (||a|| ||b||).
inline double commutator_delta(const Observable& a, const Observable& b) {
  const double na = spectral_norm(a);
  const double nb = spectral_norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) throw UndefinedDeltaError("commutator_delta: operand has zero norm");
  return commutator_norm(a, b) / (na * nb);
}

}  // namespace clab
