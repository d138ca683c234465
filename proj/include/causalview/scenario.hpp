#pragma once

// Two descriptions of one bipartite experiment.
//
// Causal view: outcomes on A prepare an ensemble from rho (via POVM a_i), the
// ensemble evolves through a channel A -> B and is measured by POVM b_j.
// Spacelike view: A and B measure a shared state tau with POVMs a'_i, b'_j.
//
// The views are related by tau = T_rho^{T_A}, a'_i = a_i^T, b'_j = b_j, where
//   T_rho = [(I (x) T)(|Phi><Phi|)]^{T_A},  |Phi> = (sqrt(rho)^T (x) I) sum_j |j>|j>.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "causalview/qobjects.hpp"

namespace causalview {

/// Entries in [-kNegativeProbabilityTol, 0) are reported as 0.
inline constexpr double kNegativeProbabilityTol = 1e-12;
/// Allowed deviation of a probability table's total from 1.
inline constexpr double kTotalProbabilityTol = 1e-10;

namespace detail {

inline double clamp_probability(double p) {
  if (p < -kNegativeProbabilityTol) {
    throw NumericalError("negative probability " + std::to_string(p) + " in joint distribution");
  }
  return std::max(p, 0.0);
}

}  // namespace detail

/// Joint probabilities p(a_i, b_j); rows are A outcomes, columns B outcomes.
class JointDistribution {
 public:
  JointDistribution(std::vector<std::string> row_labels, std::vector<std::string> col_labels,
                    const RealMatrix& raw)
      : row_labels_(std::move(row_labels)), col_labels_(std::move(col_labels)), table_(raw) {
    if (table_.rows() != static_cast<Eigen::Index>(row_labels_.size()) ||
        table_.cols() != static_cast<Eigen::Index>(col_labels_.size())) {
      throw ShapeError("joint distribution table does not match its labels");
    }
    table_ = table_.unaryExpr(&detail::clamp_probability);
    if (std::abs(table_.sum() - 1.0) > kTotalProbabilityTol) {
      throw NumericalError("joint distribution sums to " + std::to_string(table_.sum()));
    }
  }

  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }
  const RealMatrix& table() const { return table_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return table_(i, j); }
  double total() const { return table_.sum(); }
  RealVector row_marginal() const { return table_.rowwise().sum(); }
  RealVector col_marginal() const { return table_.colwise().sum().transpose(); }

  /// Entrywise max |p - q|. Tables must have the same shape.
  double max_abs_gap(const JointDistribution& other) const {
    if (table_.rows() != other.table_.rows() || table_.cols() != other.table_.cols()) {
      throw ShapeError("cannot compare joint distributions of different shapes");
    }
    return (table_ - other.table_).cwiseAbs().maxCoeff();
  }

 private:
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
  RealMatrix table_;
};

/// Preparation on A (rho with POVM a_i), channel A -> B, measurement b_j on B.
class CausalScenario {
 public:
  CausalScenario(DensityMatrix rho, KrausChannel channel, Povm povm_a, Povm povm_b,
                 double full_rank_threshold = kFullRankThreshold)
      : rho_(std::move(rho)),
        channel_(std::move(channel)),
        povm_a_(std::move(povm_a)),
        povm_b_(std::move(povm_b)) {
    if (rho_.dim() != channel_.d_in() || rho_.dim() != povm_a_.dim()) {
      throw ShapeError("causal scenario: rho (" + std::to_string(rho_.dim()) + "), channel input (" +
                       std::to_string(channel_.d_in()) + ") and povm_a (" +
                       std::to_string(povm_a_.dim()) + ") dimensions must agree");
    }
    if (channel_.d_out() != povm_b_.dim()) {
      throw ShapeError("causal scenario: channel output (" + std::to_string(channel_.d_out()) +
                       ") and povm_b (" + std::to_string(povm_b_.dim()) +
                       ") dimensions must agree");
    }
    if (!rho_.full_rank(full_rank_threshold)) {
      throw RankDeficientError("causal scenario: rho must be full rank (minimum eigenvalue " +
                               std::to_string(rho_.min_eigenvalue()) + ")");
    }
  }

  const DensityMatrix& rho() const { return rho_; }
  const KrausChannel& channel() const { return channel_; }
  const Povm& povm_a() const { return povm_a_; }
  const Povm& povm_b() const { return povm_b_; }
  BipartiteShape shape() const { return {channel_.d_in(), channel_.d_out()}; }

 private:
  DensityMatrix rho_;
  KrausChannel channel_;
  Povm povm_a_;
  Povm povm_b_;
};

/// Shared state tau on A (x) B measured by povm_a_prime and povm_b_prime.
class SpacelikeScenario {
 public:
  SpacelikeScenario(DensityMatrix tau, BipartiteShape shape, Povm povm_a_prime, Povm povm_b_prime)
      : tau_(std::move(tau)),
        shape_(shape),
        povm_a_(std::move(povm_a_prime)),
        povm_b_(std::move(povm_b_prime)) {
    if (tau_.dim() != shape_.total()) {
      throw ShapeError("spacelike scenario: tau has dimension " + std::to_string(tau_.dim()) +
                       " but the shape needs " + std::to_string(shape_.total()));
    }
    if (povm_a_.dim() != shape_.dim_a() || povm_b_.dim() != shape_.dim_b()) {
      throw ShapeError("spacelike scenario: POVM dimensions do not match the shape");
    }
  }

  const DensityMatrix& tau() const { return tau_; }
  const BipartiteShape& shape() const { return shape_; }
  const Povm& povm_a_prime() const { return povm_a_; }
  const Povm& povm_b_prime() const { return povm_b_; }

 private:
  DensityMatrix tau_;
  BipartiteShape shape_;
  Povm povm_a_;
  Povm povm_b_;
};

/// (I (x) T)(|Phi><Phi|) with |Phi> = (sqrt(rho)^T (x) I) sum_j |j>|j>: a
/// normalized state on in (x) out whose input marginal is rho^T.
inline ComplexMatrix steered_choi_state(const DensityMatrix& rho, const KrausChannel& ch) {
  if (rho.dim() != ch.d_in()) throw ShapeError("steered_choi_state: rho/channel dimension mismatch");
  const Eigen::Index d_in = ch.d_in();
  const Eigen::Index d_out = ch.d_out();
  const ComplexMatrix root = sqrtm_psd(rho.mat());
  const Eigen::Index n = d_in * d_out;
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (const auto& k : ch.kraus_ops()) {
    // (I (x) K)|Phi> = sum_j sqrt(rho)^T|j> (x) K|j>; sqrt(rho)^T(i, j) = sqrt(rho)(j, i).
    ComplexVector v = ComplexVector::Zero(n);
    for (Eigen::Index i = 0; i < d_in; ++i) {
      for (Eigen::Index j = 0; j < d_in; ++j) v.segment(i * d_out, d_out) += root(j, i) * k.col(j);
    }
    out += v * v.adjoint();
  }
  return out;
}

/// The joint operator T_rho on A (x) B. Tr_B T_rho = rho, Tr_A T_rho = T(rho).
inline ComplexMatrix t_rho(const CausalScenario& s) {
  return partial_transpose(steered_choi_state(s.rho(), s.channel()), s.shape(), Subsystem::A);
}

/// p1(a_i, b_j) = Tr_B[b_j Tr_A[T_rho (a_i (x) I_B)]].
inline JointDistribution joint_causal(const CausalScenario& s) {
  const ComplexMatrix op = t_rho(s);
  const BipartiteShape shape = s.shape();
  const ComplexMatrix id_b = identity(shape.dim_b());
  RealMatrix raw(s.povm_a().size(), s.povm_b().size());
  for (std::size_t i = 0; i < s.povm_a().size(); ++i) {
    const ComplexMatrix reduced =
        partial_trace(op * kron(s.povm_a().effect(i), id_b), shape, Subsystem::A);
    for (std::size_t j = 0; j < s.povm_b().size(); ++j) {
      raw(i, j) = (s.povm_b().effect(j) * reduced).trace().real();
    }
  }
  return JointDistribution(s.povm_a().labels(), s.povm_b().labels(), raw);
}

/// p(a_i, b_j) = Tr[b_j T(sqrt(rho) a_i sqrt(rho))], never forming T_rho.
inline JointDistribution joint_causal_oracle(const CausalScenario& s) {
  const ComplexMatrix root = sqrtm_psd(s.rho().mat());
  RealMatrix raw(s.povm_a().size(), s.povm_b().size());
  for (std::size_t i = 0; i < s.povm_a().size(); ++i) {
    const ComplexMatrix evolved = s.channel().apply(root * s.povm_a().effect(i) * root);
    for (std::size_t j = 0; j < s.povm_b().size(); ++j) {
      raw(i, j) = (s.povm_b().effect(j) * evolved).trace().real();
    }
  }
  return JointDistribution(s.povm_a().labels(), s.povm_b().labels(), raw);
}

/// Reinterprets the causal view as a shared state: tau = T_rho^{T_A},
/// a'_i = a_i^T, b'_j = b_j.
inline SpacelikeScenario to_spacelike(const CausalScenario& s) {
  return SpacelikeScenario(DensityMatrix(steered_choi_state(s.rho(), s.channel())), s.shape(),
                           s.povm_a().transposed(), s.povm_b());
}

/// p2(a_i, b_j) = Tr[(a'_i (x) b'_j) tau].
inline JointDistribution joint_spacelike(const SpacelikeScenario& s) {
  const Povm& pa = s.povm_a_prime();
  const Povm& pb = s.povm_b_prime();
  RealMatrix raw(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < pb.size(); ++j) {
      raw(i, j) = (kron(pa.effect(i), pb.effect(j)) * s.tau().mat()).trace().real();
    }
  }
  return JointDistribution(pa.labels(), pb.labels(), raw);
}

/// Reads a shared state as a preparation plus channel. Needs Tr_B tau to be
/// full rank: rho = (Tr_B tau)^T and the channel's Choi matrix is
/// (S^{-1} (x) I) tau (S^{-1} (x) I) with S = sqrt(rho)^T.
inline CausalScenario from_spacelike(const SpacelikeScenario& s,
                                     double full_rank_threshold = kFullRankThreshold,
                                     double tol = kDefaultTol) {
  const BipartiteShape& shape = s.shape();
  const ComplexMatrix marginal = partial_trace(s.tau().mat(), shape, Subsystem::B);
  const DensityMatrix rho(marginal.transpose(), tol);
  if (!rho.full_rank(full_rank_threshold)) {
    std::ostringstream msg;
    msg << "the A marginal of tau has minimum eigenvalue " << rho.min_eigenvalue()
        << "; a causal reading needs a full-rank preparation state (threshold "
        << full_rank_threshold << ")";
    throw RankDeficientError(msg.str());
  }
  // sqrt(rho^T) = sqrt(rho)^T, and (sqrt(rho)^T)^{-1} = inverse square root of the marginal.
  const ComplexMatrix lift = kron(inverse_sqrtm_pd(marginal, 0.0, tol), identity(shape.dim_b()));
  const ComplexMatrix c = hermitian_part(lift * s.tau().mat() * lift);
  KrausChannel channel = kraus_from_choi(c, shape.dim_a(), shape.dim_b(), tol);
  return CausalScenario(rho, std::move(channel), s.povm_a_prime().transposed(), s.povm_b_prime(),
                        full_rank_threshold);
}

struct EquivalenceReport {
  JointDistribution causal;
  JointDistribution spacelike;
  double max_abs_gap;
};

inline EquivalenceReport equivalence_report(const CausalScenario& s) {
  JointDistribution p1 = joint_causal(s);
  JointDistribution p2 = joint_spacelike(to_spacelike(s));
  const double gap = p1.max_abs_gap(p2);
  return {std::move(p1), std::move(p2), gap};
}

/// Polarizer analyser basis at angle theta: (transmitted, reflected) =
/// ((cos, sin), (-sin, cos)).
inline ComplexMatrix polarizer_basis(double theta) {
  ComplexMatrix basis(2, 2);
  basis << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return basis;
}

/// Photon prepared by polarizer P_A at angle alpha (reflected with weight p,
/// transmitted with 1 - p), carried unchanged by a mirror to polarizer P_B at
/// angle beta. Outcomes are labeled a_r, a_t and b_r, b_t.
/// p(a_r, b_t) = p * sin^2(beta - alpha).
inline CausalScenario polarizer_scenario(double alpha, double beta, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("polarizer mixing weight must lie strictly between 0 and 1 (got " +
                      std::to_string(p) + "); p = 0 or 1 gives a pure, rank-deficient state");
  }
  const ComplexMatrix a = polarizer_basis(alpha);
  const ComplexMatrix b = polarizer_basis(beta);
  const ComplexVector a_t = a.col(0);
  const ComplexVector a_r = a.col(1);
  const ComplexMatrix rho = p * a_r * a_r.adjoint() + (1.0 - p) * a_t * a_t.adjoint();
  const auto reorder = [](const ComplexMatrix& basis) {
    ComplexMatrix out(2, 2);
    out.col(0) = basis.col(1);
    out.col(1) = basis.col(0);
    return out;
  };
  return CausalScenario(DensityMatrix(rho), KrausChannel::identity_channel(2),
                        Povm::projective(reorder(a), {"a_r", "a_t"}),
                        Povm::projective(reorder(b), {"b_r", "b_t"}));
}

}  // namespace causalview
