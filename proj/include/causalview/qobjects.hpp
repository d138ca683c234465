#pragma once

// Validated quantum objects: states, POVMs, Kraus channels, the steering
// decomposition of a state induced by a POVM, and the Choi correspondence.

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "causalview/matcore.hpp"

namespace causalview {

/// Minimum eigenvalue a state must exceed to count as full rank.
inline constexpr double kFullRankThreshold = 1e-8;

/// Hermitian, positive semidefinite, unit-trace matrix. The stored matrix is
/// the Hermitian part of the input, so sub-tolerance skew noise is dropped.
class DensityMatrix {
 public:
  explicit DensityMatrix(const ComplexMatrix& m, double tol = kDefaultTol) {
    detail::require_square(m, "DensityMatrix");
    const double defect = hermiticity_defect(m);
    if (defect > tol) {
      std::ostringstream msg;
      msg << "density matrix is not Hermitian (max |m - m^dagger| = " << defect << ")";
      throw DomainError(msg.str());
    }
    mat_ = hermitian_part(m);
    min_eigenvalue_ = eig_hermitian(mat_, tol).values.minCoeff();
    if (min_eigenvalue_ < -tol) {
      std::ostringstream msg;
      msg << "density matrix is not positive semidefinite (eigenvalue " << min_eigenvalue_ << ")";
      throw DomainError(msg.str());
    }
    const cplx tr = mat_.trace();
    if (std::abs(tr - 1.0) > tol) {
      std::ostringstream msg;
      msg << "density matrix trace is " << tr.real() << ", expected 1";
      throw DomainError(msg.str());
    }
  }

  const ComplexMatrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  double min_eigenvalue() const { return min_eigenvalue_; }
  bool full_rank(double threshold = kFullRankThreshold) const { return min_eigenvalue_ >= threshold; }

  DensityMatrix transposed() const { return DensityMatrix(mat_.transpose()); }

 private:
  ComplexMatrix mat_;
  double min_eigenvalue_ = 0.0;
};

/// Labeled list of PSD effects summing to the identity.
class Povm {
 public:
  Povm(std::vector<std::string> labels, std::vector<ComplexMatrix> effects,
       double tol = kDefaultTol)
      : labels_(std::move(labels)), effects_(std::move(effects)) {
    if (effects_.empty()) throw DomainError("POVM needs at least one effect");
    if (labels_.size() != effects_.size()) {
      throw DomainError("POVM has " + std::to_string(effects_.size()) + " effects but " +
                        std::to_string(labels_.size()) + " labels");
    }
    if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size()) {
      throw DomainError("POVM outcome labels are not unique");
    }
    const Eigen::Index d = effects_.front().rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < effects_.size(); ++k) {
      const ComplexMatrix& e = effects_[k];
      const std::string where = "POVM effect '" + labels_[k] + "'";
      if (e.rows() != d || e.cols() != d) {
        throw ShapeError(where + " is " + detail::dims_of(e) + ", expected " +
                         std::to_string(d) + "x" + std::to_string(d));
      }
      if (!is_hermitian(e, tol)) throw DomainError(where + " is not Hermitian");
      if (const double lowest = min_eigenvalue(e, tol); lowest < -tol) {
        std::ostringstream msg;
        msg << where << " is not positive semidefinite (eigenvalue " << lowest << ")";
        throw DomainError(msg.str());
      }
      sum += e;
    }
    if (const double gap = (sum - identity(d)).cwiseAbs().maxCoeff(); gap > tol) {
      std::ostringstream msg;
      msg << "POVM effects do not sum to the identity (max deviation " << gap << ")";
      throw DomainError(msg.str());
    }
  }

  /// Effects labeled "0", "1", ...
  static Povm unlabeled(std::vector<ComplexMatrix> effects, double tol = kDefaultTol) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < effects.size(); ++k) labels.push_back(std::to_string(k));
    return Povm(std::move(labels), std::move(effects), tol);
  }

  /// Projective measurement onto the columns of an orthonormal basis.
  static Povm projective(const ComplexMatrix& basis, std::vector<std::string> labels,
                         double tol = kDefaultTol) {
    std::vector<ComplexMatrix> effects;
    for (Eigen::Index k = 0; k < basis.cols(); ++k) {
      effects.push_back(basis.col(k) * basis.col(k).adjoint());
    }
    return Povm(std::move(labels), std::move(effects), tol);
  }

  Eigen::Index dim() const { return effects_.front().rows(); }
  std::size_t size() const { return effects_.size(); }
  const std::vector<ComplexMatrix>& effects() const { return effects_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const ComplexMatrix& effect(std::size_t k) const { return effects_.at(k); }

  /// Same labels, every effect transposed.
  Povm transposed() const {
    std::vector<ComplexMatrix> t;
    t.reserve(effects_.size());
    for (const auto& e : effects_) t.push_back(e.transpose());
    return Povm(labels_, std::move(t));
  }

 private:
  std::vector<std::string> labels_;
  std::vector<ComplexMatrix> effects_;
};

/// Completely positive trace-preserving map in operator-sum form, each Kraus
/// operator d_out x d_in.
class KrausChannel {
 public:
  KrausChannel(Eigen::Index d_in, Eigen::Index d_out, std::vector<ComplexMatrix> kraus_ops,
               double tol = kDefaultTol)
      : d_in_(d_in), d_out_(d_out), ops_(std::move(kraus_ops)) {
    if (d_in < 1 || d_out < 1) throw ShapeError("channel dimensions must be positive");
    if (ops_.empty()) throw DomainError("channel needs at least one Kraus operator");
    ComplexMatrix completeness = ComplexMatrix::Zero(d_in, d_in);
    for (std::size_t m = 0; m < ops_.size(); ++m) {
      if (ops_[m].rows() != d_out || ops_[m].cols() != d_in) {
        throw ShapeError("Kraus operator " + std::to_string(m) + " is " +
                         detail::dims_of(ops_[m]) + ", expected " + std::to_string(d_out) + "x" +
                         std::to_string(d_in));
      }
      completeness += ops_[m].adjoint() * ops_[m];
    }
    if (const double gap = (completeness - identity(d_in)).cwiseAbs().maxCoeff(); gap > tol) {
      std::ostringstream msg;
      msg << "Kraus operators are not trace preserving (max |sum K^dagger K - I| = " << gap << ")";
      throw DomainError(msg.str());
    }
  }

  static KrausChannel identity_channel(Eigen::Index d) { return KrausChannel(d, d, {identity(d)}); }

  static KrausChannel unitary(const ComplexMatrix& u) {
    return KrausChannel(u.cols(), u.rows(), {u});
  }

  /// Qubit channel with Kraus operators {I, X, Y, Z} / 2, mapping every state to I/2.
  static KrausChannel qubit_depolarizing() {
    ComplexMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, cplx(0, -1), cplx(0, 1), 0;
    z << 1, 0, 0, -1;
    return KrausChannel(2, 2, {0.5 * identity(2), 0.5 * x, 0.5 * y, 0.5 * z});
  }

  /// rho -> Tr(rho) I/d_out for arbitrary dimensions, with Kraus operators
  /// |e><f| / sqrt(d_out).
  static KrausChannel completely_depolarizing(Eigen::Index d_in, Eigen::Index d_out) {
    std::vector<ComplexMatrix> ops;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_out));
    for (Eigen::Index e = 0; e < d_out; ++e) {
      for (Eigen::Index f = 0; f < d_in; ++f) {
        ComplexMatrix k = ComplexMatrix::Zero(d_out, d_in);
        k(e, f) = scale;
        ops.push_back(std::move(k));
      }
    }
    return KrausChannel(d_in, d_out, std::move(ops));
  }

  Eigen::Index d_in() const { return d_in_; }
  Eigen::Index d_out() const { return d_out_; }
  const std::vector<ComplexMatrix>& kraus_ops() const { return ops_; }

  /// sum_m K^m x K^m^dagger for any d_in x d_in operator x (not only states).
  ComplexMatrix apply(const ComplexMatrix& x) const {
    if (x.rows() != d_in_ || x.cols() != d_in_) {
      throw ShapeError("channel input is " + detail::dims_of(x) + ", expected " +
                       std::to_string(d_in_) + "x" + std::to_string(d_in_));
    }
    ComplexMatrix out = ComplexMatrix::Zero(d_out_, d_out_);
    for (const auto& k : ops_) out += k * x * k.adjoint();
    return out;
  }

 private:
  Eigen::Index d_in_;
  Eigen::Index d_out_;
  std::vector<ComplexMatrix> ops_;
};

inline DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho) {
  if (rho.dim() != ch.d_in()) {
    throw ShapeError("apply_channel: state has dimension " + std::to_string(rho.dim()) +
                     ", channel expects " + std::to_string(ch.d_in()));
  }
  return DensityMatrix(ch.apply(rho.mat()));
}

struct EnsembleMember {
  std::string label;
  double weight = 0.0;
  /// Empty when the outcome has zero probability under rho.
  std::optional<DensityMatrix> state;
};

struct WeightedEnsemble {
  std::vector<EnsembleMember> members;

  /// sum_i weight_i * state_i over members with a defined state.
  ComplexMatrix mixture() const {
    ComplexMatrix out;
    for (const auto& m : members) {
      if (!m.state) continue;
      if (out.size() == 0) out = ComplexMatrix::Zero(m.state->dim(), m.state->dim());
      out += m.weight * m.state->mat();
    }
    return out;
  }
};

/// Weights below this are treated as zero-probability outcomes.
inline constexpr double kZeroWeight = 1e-12;

/// Decomposes rho into the ensemble prepared by the outcomes of `povm`:
/// weight_i = Tr[a_i rho], member_i = sqrt(rho) a_i sqrt(rho) / weight_i.
inline WeightedEnsemble ensemble_decompose(const DensityMatrix& rho, const Povm& povm,
                                           double full_rank_threshold = kFullRankThreshold) {
  if (rho.dim() != povm.dim()) {
    throw ShapeError("ensemble_decompose: state dimension " + std::to_string(rho.dim()) +
                     " does not match POVM dimension " + std::to_string(povm.dim()));
  }
  if (!rho.full_rank(full_rank_threshold)) {
    std::ostringstream msg;
    msg << "ensemble_decompose: the state must be full rank (minimum eigenvalue "
        << rho.min_eigenvalue() << " is below " << full_rank_threshold << ")";
    throw RankDeficientError(msg.str());
  }
  const ComplexMatrix root = sqrtm_psd(rho.mat());
  WeightedEnsemble out;
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const double w = std::max(0.0, (povm.effect(i) * rho.mat()).trace().real());
    EnsembleMember member{povm.labels()[i], w, std::nullopt};
    if (w > kZeroWeight) member.state.emplace(root * povm.effect(i) * root / w);
    out.members.push_back(std::move(member));
  }
  return out;
}

/// Unnormalized Choi matrix (I (x) T)(|Omega><Omega|), |Omega> = sum_j |j>|j>,
/// input factor slow. Its trace is d_in.
inline ComplexMatrix choi(const KrausChannel& ch) {
  const Eigen::Index n = ch.d_in() * ch.d_out();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (const auto& k : ch.kraus_ops()) {
    // (I (x) K)|Omega> has entry K(e, j) at index j * d_out + e.
    ComplexVector v(n);
    for (Eigen::Index j = 0; j < ch.d_in(); ++j) v.segment(j * ch.d_out(), ch.d_out()) = k.col(j);
    out += v * v.adjoint();
  }
  return out;
}

/// Inverse of choi(): one Kraus operator per eigenpair with eigenvalue > tol.
inline KrausChannel kraus_from_choi(const ComplexMatrix& c, Eigen::Index d_in, Eigen::Index d_out,
                                    double tol = kDefaultTol) {
  const BipartiteShape shape(d_in, d_out);
  detail::require_bipartite(c, shape, "kraus_from_choi");
  const HermitianEigen eig = eig_hermitian(c, tol);
  detail::require_psd(eig, tol, "kraus_from_choi");
  const ComplexMatrix marginal = partial_trace(c, shape, Subsystem::B);
  if (const double gap = (marginal - identity(d_in)).cwiseAbs().maxCoeff(); gap > tol) {
    std::ostringstream msg;
    msg << "kraus_from_choi: partial trace over the output is not the identity (max deviation "
        << gap << "); the map is not trace preserving";
    throw DomainError(msg.str());
  }
  std::vector<ComplexMatrix> ops;
  for (Eigen::Index r = 0; r < eig.values.size(); ++r) {
    const double lambda = eig.values(r);
    if (lambda <= tol) break;  // descending
    ComplexMatrix k(d_out, d_in);
    for (Eigen::Index j = 0; j < d_in; ++j) {
      k.col(j) = std::sqrt(lambda) * eig.vectors.col(r).segment(j * d_out, d_out);
    }
    ops.push_back(std::move(k));
  }
  // Discarded eigenvalues are each at most tol.
  const double slack = tol * static_cast<double>(std::max<Eigen::Index>(1, eig.values.size()));
  return KrausChannel(d_in, d_out, std::move(ops), slack);
}

}  // namespace causalview
