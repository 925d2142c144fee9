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

// Information transfer T(rho) = U (tau (x) rho) U^dagger from a system H to
// an ancilla K, the coherence bound it implies, and two-outcome instruments
// built from pointer projections on K.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "clab/observables.hpp"
#include "clab/qla.hpp"
#include "clab/random.hpp"
#include "clab/states.hpp"

namespace clab {

inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kOrthogonalityTolerance = 1e-10;
/// Pointer means closer than this are treated as equal.
inline constexpr double kDegeneratePointerGap = 1e-12;
/// Outcome probabilities below this have no conditional state.
inline constexpr double kNullEventProbability = 1e-12;

// ---------------------------------------------------------------------------
// Transfer map

class TransferMap {
 public:
  TransferMap(ComplexMatrix u, DensityMatrix tau, std::size_t dim_k, std::size_t dim_h)
      : u_(std::move(u)), tau_(std::move(tau)), dim_k_(dim_k), dim_h_(dim_h) {
    if (dim_k == 0 || dim_h == 0) throw InvalidArgument("TransferMap: dimensions must be positive");
    if (u_.dim() != dim_k * dim_h) throw DimensionError::mismatch("TransferMap: unitary", dim_k * dim_h, u_.dim());
    if (tau_.dim() != dim_k) throw DimensionError::mismatch("TransferMap: ancilla state", dim_k, tau_.dim());
    if (auto form = monomial_form(u_)) monomial_ = std::make_shared<const MonomialForm>(std::move(*form));
    if (!is_unitary(u_, kUnitaryTolerance)) throw InvalidArgument("TransferMap: U is not unitary");
  }

  const ComplexMatrix& u() const { return u_; }
  const DensityMatrix& tau() const { return tau_; }
  std::size_t dim_k() const { return dim_k_; }
  std::size_t dim_h() const { return dim_h_; }
  std::size_t dim() const { return dim_k_ * dim_h_; }
  /// True when U has one nonzero per column, e.g. a controlled-flip circuit.
  bool is_monomial() const { return monomial_ != nullptr; }

  /// Linear extension of T to any operator x on H.
  DenseMatrix apply_operator(const DenseMatrix& x) const {
    if (static_cast<std::size_t>(x.rows()) != dim_h_ || x.rows() != x.cols()) {
      throw DimensionError::mismatch("TransferMap: input operator", dim_h_, static_cast<std::size_t>(x.rows()));
    }
    const DenseMatrix joint = tensor(tau_.matrix(), ComplexMatrix(x)).dense();
    return monomial_ ? conjugate(*monomial_, joint) : conjugate(u_.dense(), joint);
  }

  /// U v for a vector on K (x) H.
  DenseVector apply_unitary(const DenseVector& v) const {
    if (!monomial_) return u_.apply(v);
    DenseVector out(v.size());
    for (std::size_t c = 0; c < monomial_->row.size(); ++c) {
      out(ComplexMatrix::as_index(monomial_->row[c])) = monomial_->value[c] * v(ComplexMatrix::as_index(c));
    }
    return out;
  }

 private:
  ComplexMatrix u_;
  DensityMatrix tau_;
  std::size_t dim_k_;
  std::size_t dim_h_;
  std::shared_ptr<const MonomialForm> monomial_;
};

inline DensityMatrix apply_transfer(const TransferMap& t, const DensityMatrix& rho) {
  if (rho.dim() != t.dim_h()) throw DimensionError::mismatch("apply_transfer", t.dim_h(), rho.dim());
  return DensityMatrix::unchecked(ComplexMatrix(t.apply_operator(rho.dense())));
}

/// Reduced state of the system after the transfer: tr_K T(rho).
inline DensityMatrix reduced_system_state(const TransferMap& t, const DensityMatrix& rho) {
  return DensityMatrix::unchecked(partial_trace_ancilla(apply_transfer(t, rho).matrix(), t.dim_k(), t.dim_h()));
}

/// A mixed ancilla state replaced by its purification phi on
/// C^aux (x) K, with U extended diagonally to 1_aux (x) U. For every
/// operator X on K (x) H, tr(T(rho) X) equals tr(T'(rho) (1_aux (x) X)).
struct PurifiedTransfer {
  TransferMap transfer;
  std::size_t aux_dim;
};

inline PurifiedTransfer purified_transfer(const TransferMap& t) {
  Purification p = purify(t.tau());
  const std::size_t aux = p.aux_dim;
  // purify() lays branch i out at (i, k) -> i * dimK + k, so the enlarged
  // ancilla is C^aux (x) K in the ancilla-major convention.
  DensityMatrix tau = density_from_pure(p.vector);
  ComplexMatrix u = tensor(ComplexMatrix::identity(aux), t.u());
  return {TransferMap(std::move(u), std::move(tau), aux * t.dim_k(), t.dim_h()), aux};
}

// ---------------------------------------------------------------------------
// Pointer statistics and the coherence bound

struct PointerStats {
  double b0 = 0.0;
  double b1 = 0.0;
  double sigma0 = 0.0;
  double sigma1 = 0.0;
};

inline void require_orthonormal_pair(const PureState& psi0, const PureState& psi1, std::size_t dim_h,
                                     std::vector<std::string>* violations = nullptr) {
  std::vector<std::string> local;
  auto& v = violations ? *violations : local;
  if (psi0.dim() != dim_h || psi1.dim() != dim_h) {
    v.push_back("psi0 and psi1 must live on H of dimension " + std::to_string(dim_h));
  } else if (std::abs(inner(psi0, psi1)) > kOrthogonalityTolerance) {
    v.push_back("psi0 and psi1 are not orthogonal (|<psi0|psi1>| = " + std::to_string(std::abs(inner(psi0, psi1))) +
                ")");
  }
  if (!violations && !local.empty()) throw InvalidArgument(local.front());
}

/// Mean and standard deviation of b in T(|psi_j><psi_j|).
inline PointerStats pointer_stats(const TransferMap& t, const Observable& b, const PureState& psi0,
                                  const PureState& psi1) {
  require_orthonormal_pair(psi0, psi1, t.dim_h());
  if (b.dim() != t.dim()) throw DimensionError::mismatch("pointer_stats: pointer", t.dim(), b.dim());
  const DensityMatrix s0 = apply_transfer(t, density_from_pure(psi0));
  const DensityMatrix s1 = apply_transfer(t, density_from_pure(psi1));
  return {expectation(s0, b), expectation(s1, b), std::sqrt(variance(s0, b)), std::sqrt(variance(s1, b))};
}

/// (delta ||B|| + sigma0 + sigma1) / |b0 - b1| * ||A||.
inline double coherence_bound(double delta, double norm_b, double sigma0, double sigma1, double b0, double b1,
                              double norm_a) {
  const double gap = std::abs(b0 - b1);
  if (!(gap > kDegeneratePointerGap)) {
    throw DegeneratePointerError("coherence_bound: pointer means coincide (|b0 - b1| = " + std::to_string(gap) + ")");
  }
  return (delta * norm_b + sigma0 + sigma1) / gap * norm_a;
}

/// |tr(T(|psi><psi|) A) - tr(T(|a0|^2 |psi0><psi0| + |a1|^2 |psi1><psi1|) A)|
/// with psi = a0 psi0 + a1 psi1.
inline double decoherence_discrepancy(const TransferMap& t, const PureState& psi0, const PureState& psi1,
                                      const SuperpositionSpec& spec, const Observable& a) {
  require_orthonormal_pair(psi0, psi1, t.dim_h());
  if (a.dim() != t.dim()) throw DimensionError::mismatch("decoherence_discrepancy: observable", t.dim(), a.dim());
  const PureState psi = spec.superpose(psi0, psi1);
  const double coherent = expectation(apply_transfer(t, density_from_pure(psi)), a);
  const double incoherent = expectation(apply_transfer(t, collapsed_mixture(spec, psi0, psi1)), a);
  return std::abs(coherent - incoherent);
}

// ---------------------------------------------------------------------------
// Verification records

using ParamValue = std::variant<std::int64_t, double, std::string>;
using Params = std::vector<std::pair<std::string, ParamValue>>;

/// One checked inequality lhs <= rhs + tol. Quantities that do not apply to a
/// check are NaN.
struct VerificationRecord {
  std::string scenario;
  Params params;
  double lhs = std::numeric_limits<double>::quiet_NaN();
  double rhs = std::numeric_limits<double>::quiet_NaN();
  double delta = std::numeric_limits<double>::quiet_NaN();
  double norm_a = std::numeric_limits<double>::quiet_NaN();
  double norm_b = std::numeric_limits<double>::quiet_NaN();
  double b0 = std::numeric_limits<double>::quiet_NaN();
  double b1 = std::numeric_limits<double>::quiet_NaN();
  double sigma0 = std::numeric_limits<double>::quiet_NaN();
  double sigma1 = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  double tol = 0.0;

  static bool passes(double lhs, double rhs, double tol) { return lhs <= rhs + tol; }
  void settle() { pass = passes(lhs, rhs, tol); }

  const ParamValue* param(const std::string& key) const {
    for (const auto& [k, v] : params) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

/// Checks the coherence bound for one transfer, pointer and state pair
/// against many (superposition, observable) choices; the transferred basis
/// states are computed once.
class Theorem2Checker {
 public:
  Theorem2Checker(TransferMap t, Observable b, PureState psi0, PureState psi1)
      : t_(std::move(t)), b_(std::move(b)), psi0_(std::move(psi0)), psi1_(std::move(psi1)) {
    std::vector<std::string> violations;
    require_orthonormal_pair(psi0_, psi1_, t_.dim_h(), &violations);
    if (b_.dim() != t_.dim()) violations.push_back("pointer does not act on K (x) H");
    if (!violations.empty()) throw HypothesisError(std::move(violations));

    t0_ = apply_transfer(t_, density_from_pure(psi0_)).dense();
    t1_ = apply_transfer(t_, density_from_pure(psi1_)).dense();
    cross_ = t_.apply_operator(ComplexMatrix::outer(psi1_.amplitudes(), psi0_.amplitudes()).dense());
    const DensityMatrix s0 = DensityMatrix::unchecked(ComplexMatrix(t0_));
    const DensityMatrix s1 = DensityMatrix::unchecked(ComplexMatrix(t1_));
    stats_ = {expectation(s0, b_), expectation(s1, b_), std::sqrt(variance(s0, b_)), std::sqrt(variance(s1, b_))};
    if (!(std::abs(stats_.b0 - stats_.b1) > kDegeneratePointerGap)) {
      throw HypothesisError({"b0 != b1 fails: pointer means are " + std::to_string(stats_.b0) + " and " +
                             std::to_string(stats_.b1)});
    }
    norm_b_ = spectral_norm(b_);
  }

  const PointerStats& stats() const { return stats_; }
  double norm_b() const { return norm_b_; }
  const TransferMap& transfer() const { return t_; }

  /// lhs is the discrepancy between the coherent and collapsed inputs; rhs
  /// the bound with delta = ||[A, B]|| / (||A|| ||B||). Params also carry
  /// the coherence |<theta0|A theta1>| (the matrix element the bound
  /// controls, via T(|psi1><psi0|)) and the sharper 2|a0 a1| times it.
  VerificationRecord check(const SuperpositionSpec& spec, const Observable& a, double tol,
                           std::string scenario = "theorem2", Params params = {}) const {
    if (a.dim() != t_.dim()) throw DimensionError::mismatch("Theorem2Checker: observable", t_.dim(), a.dim());
    const PureState psi = spec.superpose(psi0_, psi1_);
    const double coherent = expectation(apply_transfer(t_, density_from_pure(psi)), a);
    const double incoherent = spec.weight0() * detail::trace_with(t0_, a).real() +
                              spec.weight1() * detail::trace_with(t1_, a).real();
    const double coherence = std::abs(detail::trace_with(cross_, a));

    VerificationRecord r;
    r.scenario = std::move(scenario);
    r.params = std::move(params);
    r.norm_a = spectral_norm(a);
    r.norm_b = norm_b_;
    r.delta = (r.norm_a > 0.0) ? commutator_norm(a, b_) / (r.norm_a * norm_b_) : 0.0;
    r.b0 = stats_.b0;
    r.b1 = stats_.b1;
    r.sigma0 = stats_.sigma0;
    r.sigma1 = stats_.sigma1;
    r.lhs = std::abs(coherent - incoherent);
    r.rhs = coherence_bound(r.delta, r.norm_b, r.sigma0, r.sigma1, r.b0, r.b1, r.norm_a);
    r.tol = tol;
    r.params.emplace_back("coherence", coherence);
    r.params.emplace_back("tight_bound", 2.0 * std::abs(spec.alpha0()) * std::abs(spec.alpha1()) * coherence);
    r.settle();
    return r;
  }

 private:
  TransferMap t_;
  Observable b_;
  PureState psi0_;
  PureState psi1_;
  DenseMatrix t0_;
  DenseMatrix t1_;
  DenseMatrix cross_;
  PointerStats stats_;
  double norm_b_ = 0.0;
};

inline VerificationRecord verify_theorem2(const TransferMap& t, const Observable& b, const PureState& psi0,
                                          const PureState& psi1, const SuperpositionSpec& spec, const Observable& a,
                                          double tol) {
  return Theorem2Checker(t, b, psi0, psi1).check(spec, a, tol);
}

// ---------------------------------------------------------------------------
// Abstract two-outcome splitting maps

/// Linear map on d x d matrices, stored as its d^2 x d^2 matrix on row-major
/// vectorizations: vec(X)[i * d + j] = X(i, j).
class Superoperator {
 public:
  explicit Superoperator(ComplexMatrix m) : m_(std::move(m)) {
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m_.dim()))));
    if (d * d != m_.dim()) throw DimensionError("Superoperator: size " + std::to_string(m_.dim()) + " is not a square");
    d_ = d;
  }

  /// X -> sum_k K_k X K_k^dagger.
  static Superoperator from_kraus(const std::vector<ComplexMatrix>& kraus) {
    if (kraus.empty()) throw InvalidArgument("Superoperator::from_kraus: no operators");
    const std::size_t d = kraus.front().dim();
    const auto n = ComplexMatrix::as_index(d * d);
    DenseMatrix acc = DenseMatrix::Zero(n, n);
    for (const auto& k : kraus) {
      if (k.dim() != d) throw DimensionError::mismatch("from_kraus", d, k.dim());
      acc += tensor(k, ComplexMatrix(DenseMatrix(k.dense().conjugate()))).dense();
    }
    return Superoperator(ComplexMatrix(std::move(acc)));
  }

  /// Tabulates a linear map given as a function on d x d matrices.
  template <typename Map>
  static Superoperator from_map(std::size_t d, Map&& map) {
    const auto n = ComplexMatrix::as_index(d * d);
    DenseMatrix acc(n, n);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        DenseMatrix e = DenseMatrix::Zero(ComplexMatrix::as_index(d), ComplexMatrix::as_index(d));
        e(ComplexMatrix::as_index(a), ComplexMatrix::as_index(b)) = 1.0;
        const DenseMatrix img = map(e);
        acc.col(ComplexMatrix::as_index(a * d + b)) = vec(img);
      }
    }
    return Superoperator(ComplexMatrix(std::move(acc)));
  }

  std::size_t dim() const { return d_; }
  const ComplexMatrix& matrix() const { return m_; }

  DenseMatrix apply(const DenseMatrix& x) const {
    if (static_cast<std::size_t>(x.rows()) != d_) {
      throw DimensionError::mismatch("Superoperator::apply", d_, static_cast<std::size_t>(x.rows()));
    }
    return unvec(m_.dense() * vec(x), d_);
  }

  Superoperator operator+(const Superoperator& o) const { return Superoperator(m_ + o.m_); }
  Superoperator operator*(Complex s) const { return Superoperator(m_ * s); }

  static DenseVector vec(const DenseMatrix& x) {
    DenseVector v(x.size());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j) = x(i, j);
    }
    return v;
  }
  static DenseMatrix unvec(const DenseVector& v, std::size_t d) {
    const auto n = ComplexMatrix::as_index(d);
    DenseMatrix x(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) x(i, j) = v(i * n + j);
    }
    return x;
  }

 private:
  ComplexMatrix m_;
  std::size_t d_ = 1;
};

enum class CollapseVerdict {
  confirmed,       ///< hypotheses hold and the off-diagonal images vanish
  counterexample,  ///< hypotheses hold but the conclusion fails
  inconclusive,    ///< some hypothesis fails; nothing follows
};

inline const char* to_string(CollapseVerdict v) {
  switch (v) {
    case CollapseVerdict::confirmed: return "confirmed";
    case CollapseVerdict::counterexample: return "counterexample";
    case CollapseVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct AbstractCollapseOptions {
  double tol = 1e-10;
  std::uint64_t seed = 0;
  std::size_t random_probes = 16;
  std::size_t alpha_samples = 8;
};

struct AbstractCollapseReport {
  CollapseVerdict verdict = CollapseVerdict::inconclusive;
  std::vector<std::string> failed_hypotheses;
  /// max(||M1(|psi0><psi0|)||, ||M0(|psi1><psi1|)||)
  double fullsplit_residual = 0.0;
  /// Smallest eigenvalue of any M_j(probe).
  double min_probe_eigenvalue = 0.0;
  /// max |tr (M0 + M1)(probe) - 1|
  double normalization_residual = 0.0;
  /// ||M_j(|psi0><psi1|)|| and ||M_j(|psi1><psi0|)|| for j = 0, 1.
  std::array<double, 4> off_diagonal_norms{};
  /// max over sampled alpha of ||M_j(|psi><psi|) - |alpha_j|^2 M_j(|psi_j><psi_j|)||.
  double collapse_residual = 0.0;
  /// max over sampled alpha of ||(M0 + M1)(|psi><psi|) - (M0 + M1)(mixture)||.
  double decoherence_residual = 0.0;

  double max_off_diagonal() const {
    double m = 0.0;
    for (double v : off_diagonal_norms) m = std::max(m, v);
    return m;
  }
};

/// Checks that a splitting rho -> M0(rho) (+) M1(rho) which separates psi0 from
/// psi1 perfectly annihilates the coherences |psi0><psi1| and |psi1><psi0|.
/// Positivity and normalization are probed on eps e^{i phi} psi0 + psi1 (and
/// the same with roles exchanged) plus seeded random pure states.
inline AbstractCollapseReport check_abstract_collapse(const Superoperator& m0, const Superoperator& m1,
                                                      const PureState& psi0, const PureState& psi1,
                                                      const AbstractCollapseOptions& opts = {}) {
  if (m0.dim() != m1.dim()) throw DimensionError::mismatch("check_abstract_collapse", m0.dim(), m1.dim());
  const std::size_t d = m0.dim();
  require_orthonormal_pair(psi0, psi1, d);
  const double tol = opts.tol;
  AbstractCollapseReport rep;

  const auto proj = [](const DenseVector& a, const DenseVector& b) { return DenseMatrix(a * b.adjoint()); };
  const DenseVector& v0 = psi0.amplitudes();
  const DenseVector& v1 = psi1.amplitudes();

  rep.fullsplit_residual =
      std::max(spectral_norm(m1.apply(proj(v0, v0))), spectral_norm(m0.apply(proj(v1, v1))));
  if (rep.fullsplit_residual > tol) rep.failed_hypotheses.push_back("M1(|psi0><psi0|) = 0 and M0(|psi1><psi1|) = 0");

  std::vector<DenseVector> probes;
  for (double eps : {1.0, 1e-1, 1e-3}) {
    for (int k = 0; k < 4; ++k) {
      const Complex phase = std::polar(1.0, k * std::numbers::pi / 2.0);
      probes.push_back(eps * phase * v0 + v1);
      probes.push_back(eps * phase * v1 + v0);
    }
  }
  Rng rng(opts.seed);
  for (std::size_t i = 0; i < opts.random_probes; ++i) probes.push_back(random_unit_vector(rng, d));
  rep.min_probe_eigenvalue = std::numeric_limits<double>::infinity();
  for (auto& p : probes) {
    p /= p.norm();
    const DenseMatrix rho = proj(p, p);
    const DenseMatrix a = m0.apply(rho);
    const DenseMatrix b = m1.apply(rho);
    for (const DenseMatrix* img : {&a, &b}) {
      const DenseMatrix herm = (*img + img->adjoint()) * 0.5;
      rep.min_probe_eigenvalue = std::min(rep.min_probe_eigenvalue, eigh(herm, false).values(0));
      if (!norm_within(DenseMatrix(*img - img->adjoint()), tol)) {
        rep.min_probe_eigenvalue = -std::numeric_limits<double>::infinity();
      }
    }
    rep.normalization_residual = std::max(rep.normalization_residual, std::abs((a.trace() + b.trace()).real() - 1.0));
  }
  if (rep.min_probe_eigenvalue < -tol) rep.failed_hypotheses.push_back("positivity on probe states");
  if (rep.normalization_residual > tol) rep.failed_hypotheses.push_back("normalization on probe states");

  const DenseMatrix c01 = proj(v0, v1);
  const DenseMatrix c10 = proj(v1, v0);
  rep.off_diagonal_norms = {spectral_norm(m0.apply(c01)), spectral_norm(m0.apply(c10)), spectral_norm(m1.apply(c01)),
                            spectral_norm(m1.apply(c10))};

  const DenseMatrix m0_0 = m0.apply(proj(v0, v0));
  const DenseMatrix m1_1 = m1.apply(proj(v1, v1));
  const Superoperator sum = m0 + m1;
  for (std::size_t s = 0; s < opts.alpha_samples; ++s) {
    const auto spec = SuperpositionSpec::random(rng);
    const DenseVector psi = spec.alpha0() * v0 + spec.alpha1() * v1;
    const DenseMatrix rho = proj(psi, psi);
    rep.collapse_residual = std::max({rep.collapse_residual, spectral_norm(DenseMatrix(m0.apply(rho) - spec.weight0() * m0_0)),
                                      spectral_norm(DenseMatrix(m1.apply(rho) - spec.weight1() * m1_1))});
    const DenseMatrix mixed = spec.weight0() * proj(v0, v0) + spec.weight1() * proj(v1, v1);
    rep.decoherence_residual =
        std::max(rep.decoherence_residual, spectral_norm(DenseMatrix(sum.apply(rho) - sum.apply(mixed))));
  }

  if (!rep.failed_hypotheses.empty()) {
    rep.verdict = CollapseVerdict::inconclusive;
  } else if (rep.max_off_diagonal() <= tol && rep.collapse_residual <= tol) {
    rep.verdict = CollapseVerdict::confirmed;
  } else {
    rep.verdict = CollapseVerdict::counterexample;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Instruments from pointer projections

class Instrument {
 public:
  Instrument(TransferMap transfer, ComplexMatrix q) : transfer_(std::move(transfer)), q_(std::move(q)) {
    if (q_.dim() != transfer_.dim_k()) throw DimensionError::mismatch("Instrument: projection", transfer_.dim_k(), q_.dim());
    if (!is_projection(q_, 1e-10)) throw InvalidArgument("Instrument: Q is not an orthogonal projection");
  }

  const TransferMap& transfer() const { return transfer_; }
  const ComplexMatrix& q() const { return q_; }

  /// Unnormalized branch j: tr_K((Q_j (x) 1) T(x)) with Q_1 = Q, Q_0 = 1 - Q.
  DenseMatrix branch(int outcome, const DenseMatrix& x) const {
    const DenseMatrix tx = transfer_.apply_operator(x);
    const auto dk = ComplexMatrix::as_index(transfer_.dim_k());
    const auto dh = ComplexMatrix::as_index(transfer_.dim_h());
    DenseMatrix qj = q_.dense();
    if (outcome == 0) qj = DenseMatrix::Identity(dk, dk) - qj;
    DenseMatrix out = DenseMatrix::Zero(dh, dh);
    // sum_{k,k'} Qj(k, k') X[(k', h), (k, h')]
    for (Eigen::Index k = 0; k < dk; ++k) {
      for (Eigen::Index kp = 0; kp < dk; ++kp) {
        const Complex w = qj(k, kp);
        if (w == Complex(0.0)) continue;
        out += w * tx.block(kp * dh, k * dh, dh, dh);
      }
    }
    return out;
  }

  Superoperator branch_superoperator(int outcome) const {
    return Superoperator::from_map(transfer_.dim_h(), [&](const DenseMatrix& e) { return branch(outcome, e); });
  }

 private:
  TransferMap transfer_;
  ComplexMatrix q_;
};

/// Outcome probabilities and conditional states of an instrument.
struct ConditionalStates {
  double p0 = 0.0;
  double p1 = 0.0;
  /// Absent when the outcome has probability below kNullEventProbability.
  std::optional<DensityMatrix> rho0;
  std::optional<DensityMatrix> rho1;
  DenseMatrix m0;
  DenseMatrix m1;
};

inline ConditionalStates condition(const Instrument& inst, const DensityMatrix& rho) {
  if (rho.dim() != inst.transfer().dim_h()) throw DimensionError::mismatch("condition", inst.transfer().dim_h(), rho.dim());
  ConditionalStates out;
  out.m0 = inst.branch(0, rho.dense());
  out.m1 = inst.branch(1, rho.dense());
  out.p0 = out.m0.trace().real();
  out.p1 = out.m1.trace().real();
  if (out.p0 > kNullEventProbability) out.rho0 = DensityMatrix::unchecked(ComplexMatrix(DenseMatrix(out.m0 / out.p0)));
  if (out.p1 > kNullEventProbability) out.rho1 = DensityMatrix::unchecked(ComplexMatrix(DenseMatrix(out.m1 / out.p1)));
  return out;
}

/// table[i][j] = P(p = i, q = j), where outcome 1 means the projection fires.
using JointTable = std::array<std::array<double, 2>, 2>;

inline JointTable joint_distribution(const TransferMap& t, const ComplexMatrix& p, const ComplexMatrix& q,
                                     const DensityMatrix& rho) {
  if (p.dim() != t.dim()) throw DimensionError::mismatch("joint_distribution: P", t.dim(), p.dim());
  if (q.dim() != t.dim()) throw DimensionError::mismatch("joint_distribution: Q", t.dim(), q.dim());
  if (!is_projection(p, 1e-10) || !is_projection(q, 1e-10)) {
    throw InvalidArgument("joint_distribution: P and Q must be orthogonal projections");
  }
  if (!norm_within(commutator(p, q).dense(), 1e-10)) {
    throw NonCommutingError("joint_distribution: P and Q do not commute");
  }
  const DenseMatrix out_state = apply_transfer(t, rho).dense();
  const auto n = ComplexMatrix::as_index(t.dim());
  const DenseMatrix id = DenseMatrix::Identity(n, n);
  const DenseMatrix pj[2] = {id - p.dense(), p.dense()};
  const DenseMatrix qj[2] = {id - q.dense(), q.dense()};
  JointTable table{};
  double total = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      table[i][j] = detail::trace_of_product(out_state, DenseMatrix(pj[i] * qj[j])).real();
      if (table[i][j] < -1e-12) throw Error("joint_distribution: negative probability");
      total += table[i][j];
    }
  }
  if (std::abs(total - 1.0) > 1e-10) throw Error("joint_distribution: probabilities sum to " + std::to_string(total));
  return table;
}

}  // namespace clab
