#pragma once

// Three-region experiments. Causal view: outcomes on C prepare an ensemble
// from rho_C that a channel C -> A (x) B carries to measurements on A and B.
// Spacelike view: A, B and C measure a shared tripartite state tau_ABC.
//
// Internally the joint operator lives on C (x) (A (x) B); the public tau_ABC
// uses the A (x) B (x) C layout.

#include <array>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "causalview/scenario.hpp"

namespace causalview {

struct TripartiteDims {
  Eigen::Index a;
  Eigen::Index b;
  Eigen::Index c;

  Eigen::Index total() const { return a * b * c; }
  bool operator==(const TripartiteDims&) const = default;
};

/// Reorders tensor factors. `dims[k]` is the dimension of input factor k
/// (slowest first); output factor k is input factor `perm[k]`.
inline ComplexMatrix permute_subsystems(const ComplexMatrix& m, const std::vector<Eigen::Index>& dims,
                                        const std::vector<std::size_t>& perm) {
  const std::size_t n = dims.size();
  if (perm.size() != n) throw ShapeError("permute_subsystems: permutation length mismatch");
  std::vector<bool> seen(n, false);
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) throw ShapeError("permute_subsystems: not a permutation");
    seen[p] = true;
  }
  const Eigen::Index total =
      std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, std::multiplies<>());
  if (m.rows() != total || m.cols() != total) {
    throw ShapeError("permute_subsystems: matrix is " + detail::dims_of(m) + ", factors need " +
                     std::to_string(total));
  }
  // Maps an input flat index to the output flat index.
  std::vector<Eigen::Index> out_dims(n);
  for (std::size_t k = 0; k < n; ++k) out_dims[k] = dims[perm[k]];
  std::vector<Eigen::Index> target(static_cast<std::size_t>(total));
  std::vector<Eigen::Index> digits(n);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rest = flat;
    for (std::size_t k = n; k-- > 0;) {
      digits[k] = rest % dims[k];
      rest /= dims[k];
    }
    Eigen::Index idx = 0;
    for (std::size_t k = 0; k < n; ++k) idx = idx * out_dims[k] + digits[perm[k]];
    target[static_cast<std::size_t>(flat)] = idx;
  }
  ComplexMatrix out(total, total);
  for (Eigen::Index r = 0; r < total; ++r)
    for (Eigen::Index c = 0; c < total; ++c) out(target[r], target[c]) = m(r, c);
  return out;
}

/// C (x) A (x) B  ->  A (x) B (x) C.
inline ComplexMatrix cab_to_abc(const ComplexMatrix& m, const TripartiteDims& d) {
  return permute_subsystems(m, {d.c, d.a, d.b}, {1, 2, 0});
}

/// A (x) B (x) C  ->  C (x) A (x) B.
inline ComplexMatrix abc_to_cab(const ComplexMatrix& m, const TripartiteDims& d) {
  return permute_subsystems(m, {d.a, d.b, d.c}, {2, 0, 1});
}

/// p(a_i, b_j, c_k), flattened with k fastest.
class JointDistribution3 {
 public:
  JointDistribution3(std::array<std::vector<std::string>, 3> labels, std::vector<double> raw)
      : labels_(std::move(labels)), values_(std::move(raw)) {
    if (values_.size() != labels_[0].size() * labels_[1].size() * labels_[2].size()) {
      throw ShapeError("tripartite distribution size does not match its labels");
    }
    double sum = 0.0;
    for (double& v : values_) {
      v = detail::clamp_probability(v);
      sum += v;
    }
    if (std::abs(sum - 1.0) > kTotalProbabilityTol) {
      throw NumericalError("tripartite distribution sums to " + std::to_string(sum));
    }
  }

  const std::vector<std::string>& labels(std::size_t party) const { return labels_.at(party); }
  std::size_t size(std::size_t party) const { return labels_.at(party).size(); }
  const std::vector<double>& values() const { return values_; }

  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[(i * size(1) + j) * size(2) + k];
  }

  double max_abs_gap(const JointDistribution3& other) const {
    if (values_.size() != other.values_.size() || size(0) != other.size(0) ||
        size(1) != other.size(1)) {
      throw ShapeError("cannot compare tripartite distributions of different shapes");
    }
    double gap = 0.0;
    for (std::size_t n = 0; n < values_.size(); ++n) {
      gap = std::max(gap, std::abs(values_[n] - other.values_[n]));
    }
    return gap;
  }

  /// Sums out the C outcomes.
  JointDistribution marginal_ab() const {
    RealMatrix raw = RealMatrix::Zero(size(0), size(1));
    for (std::size_t i = 0; i < size(0); ++i)
      for (std::size_t j = 0; j < size(1); ++j)
        for (std::size_t k = 0; k < size(2); ++k) raw(i, j) += (*this)(i, j, k);
    return JointDistribution(labels_[0], labels_[1], raw);
  }

  std::vector<double> marginal_c() const {
    std::vector<double> out(size(2), 0.0);
    for (std::size_t n = 0; n < values_.size(); ++n) out[n % size(2)] += values_[n];
    return out;
  }

 private:
  std::array<std::vector<std::string>, 3> labels_;
  std::vector<double> values_;
};

class TripartiteCausalScenario {
 public:
  TripartiteCausalScenario(DensityMatrix rho_c, KrausChannel channel, Povm povm_a, Povm povm_b,
                           Povm povm_c, double full_rank_threshold = kFullRankThreshold)
      : rho_c_(std::move(rho_c)),
        channel_(std::move(channel)),
        povm_a_(std::move(povm_a)),
        povm_b_(std::move(povm_b)),
        povm_c_(std::move(povm_c)) {
    if (rho_c_.dim() != channel_.d_in() || rho_c_.dim() != povm_c_.dim()) {
      throw ShapeError("tripartite causal scenario: rho_c, channel input and povm_c dimensions must agree");
    }
    if (channel_.d_out() != povm_a_.dim() * povm_b_.dim()) {
      throw ShapeError("tripartite causal scenario: channel output dimension " +
                       std::to_string(channel_.d_out()) + " is not d_A * d_B = " +
                       std::to_string(povm_a_.dim() * povm_b_.dim()));
    }
    if (!rho_c_.full_rank(full_rank_threshold)) {
      throw RankDeficientError("tripartite causal scenario: rho_c must be full rank (minimum eigenvalue " +
                               std::to_string(rho_c_.min_eigenvalue()) + ")");
    }
  }

  const DensityMatrix& rho_c() const { return rho_c_; }
  const KrausChannel& channel() const { return channel_; }
  const Povm& povm_a() const { return povm_a_; }
  const Povm& povm_b() const { return povm_b_; }
  const Povm& povm_c() const { return povm_c_; }
  TripartiteDims dims() const { return {povm_a_.dim(), povm_b_.dim(), povm_c_.dim()}; }
  /// C (x) (A (x) B).
  BipartiteShape internal_shape() const { return {channel_.d_in(), channel_.d_out()}; }

 private:
  DensityMatrix rho_c_;
  KrausChannel channel_;
  Povm povm_a_;
  Povm povm_b_;
  Povm povm_c_;
};

class TripartiteSpacelikeScenario {
 public:
  TripartiteSpacelikeScenario(DensityMatrix tau_abc, Povm povm_a, Povm povm_b, Povm povm_c_prime)
      : tau_(std::move(tau_abc)),
        povm_a_(std::move(povm_a)),
        povm_b_(std::move(povm_b)),
        povm_c_(std::move(povm_c_prime)) {
    if (tau_.dim() != dims().total()) {
      throw ShapeError("tripartite spacelike scenario: tau has dimension " +
                       std::to_string(tau_.dim()) + ", POVMs need " + std::to_string(dims().total()));
    }
  }

  const DensityMatrix& tau_abc() const { return tau_; }
  const Povm& povm_a() const { return povm_a_; }
  const Povm& povm_b() const { return povm_b_; }
  const Povm& povm_c_prime() const { return povm_c_; }
  TripartiteDims dims() const { return {povm_a_.dim(), povm_b_.dim(), povm_c_.dim()}; }

 private:
  DensityMatrix tau_;
  Povm povm_a_;
  Povm povm_b_;
  Povm povm_c_;
};

/// T_rho on C (x) (A (x) B). Tr_{AB} = rho_C, Tr_C = T(rho_C).
inline ComplexMatrix t_rho_tri(const TripartiteCausalScenario& s) {
  return partial_transpose(steered_choi_state(s.rho_c(), s.channel()), s.internal_shape(),
                           Subsystem::A);
}

/// tau_ABC = T_rho^{T_C} in A (x) B (x) C layout; C's POVM becomes c_k^T.
inline TripartiteSpacelikeScenario to_spacelike_tri(const TripartiteCausalScenario& s) {
  const ComplexMatrix tau_cab = steered_choi_state(s.rho_c(), s.channel());
  return TripartiteSpacelikeScenario(DensityMatrix(cab_to_abc(tau_cab, s.dims())), s.povm_a(),
                                     s.povm_b(), s.povm_c().transposed());
}

/// Inverse of to_spacelike_tri; needs the C marginal of tau to be full rank.
inline TripartiteCausalScenario from_spacelike_tri(const TripartiteSpacelikeScenario& s,
                                                   double full_rank_threshold = kFullRankThreshold,
                                                   double tol = kDefaultTol) {
  const TripartiteDims d = s.dims();
  const SpacelikeScenario flat(DensityMatrix(abc_to_cab(s.tau_abc().mat(), d), tol),
                               BipartiteShape(d.c, d.a * d.b), s.povm_c_prime(),
                               Povm::unlabeled({identity(d.a * d.b)}));
  const CausalScenario causal = from_spacelike(flat, full_rank_threshold, tol);
  return TripartiteCausalScenario(causal.rho(), causal.channel(), s.povm_a(), s.povm_b(),
                                  causal.povm_a(), full_rank_threshold);
}

namespace detail {

inline std::array<std::vector<std::string>, 3> tri_labels(const Povm& a, const Povm& b, const Povm& c) {
  return {a.labels(), b.labels(), c.labels()};
}

}  // namespace detail

/// p(a_i, b_j, c_k) = Tr_AB[(a_i (x) b_j) Tr_C[T_rho (c_k (x) I_AB)]].
inline JointDistribution3 joint_tri_causal(const TripartiteCausalScenario& s) {
  const ComplexMatrix op = t_rho_tri(s);
  const BipartiteShape shape = s.internal_shape();
  const ComplexMatrix id_ab = identity(shape.dim_b());
  std::vector<double> raw;
  raw.reserve(s.povm_a().size() * s.povm_b().size() * s.povm_c().size());
  std::vector<ComplexMatrix> reduced;
  for (const auto& c : s.povm_c().effects()) {
    reduced.push_back(partial_trace(op * kron(c, id_ab), shape, Subsystem::A));
  }
  for (const auto& a : s.povm_a().effects())
    for (const auto& b : s.povm_b().effects()) {
      const ComplexMatrix ab = kron(a, b);
      for (const auto& r : reduced) raw.push_back((ab * r).trace().real());
    }
  return JointDistribution3(detail::tri_labels(s.povm_a(), s.povm_b(), s.povm_c()), std::move(raw));
}

/// p(a_i, b_j, c_k) = Tr[(a_i (x) b_j) T(sqrt(rho_C) c_k sqrt(rho_C))].
inline JointDistribution3 joint_tri_causal_oracle(const TripartiteCausalScenario& s) {
  const ComplexMatrix root = sqrtm_psd(s.rho_c().mat());
  std::vector<ComplexMatrix> evolved;
  for (const auto& c : s.povm_c().effects()) evolved.push_back(s.channel().apply(root * c * root));
  std::vector<double> raw;
  for (const auto& a : s.povm_a().effects())
    for (const auto& b : s.povm_b().effects()) {
      const ComplexMatrix ab = kron(a, b);
      for (const auto& e : evolved) raw.push_back((ab * e).trace().real());
    }
  return JointDistribution3(detail::tri_labels(s.povm_a(), s.povm_b(), s.povm_c()), std::move(raw));
}

/// p(a_i, b_j, c_k) = Tr[tau_ABC (a_i (x) b_j (x) c'_k)].
inline JointDistribution3 joint_tri_spacelike(const TripartiteSpacelikeScenario& s) {
  std::vector<double> raw;
  for (const auto& a : s.povm_a().effects())
    for (const auto& b : s.povm_b().effects()) {
      const ComplexMatrix ab = kron(a, b);
      for (const auto& c : s.povm_c_prime().effects()) {
        raw.push_back((kron(ab, c) * s.tau_abc().mat()).trace().real());
      }
    }
  return JointDistribution3(detail::tri_labels(s.povm_a(), s.povm_b(), s.povm_c_prime()),
                            std::move(raw));
}

struct TripartiteEquivalenceReport {
  JointDistribution3 causal;
  JointDistribution3 spacelike;
  double max_abs_gap;
};

inline TripartiteEquivalenceReport equivalence_report_tri(const TripartiteCausalScenario& s) {
  JointDistribution3 p1 = joint_tri_causal(s);
  JointDistribution3 p2 = joint_tri_spacelike(to_spacelike_tri(s));
  const double gap = p1.max_abs_gap(p2);
  return {std::move(p1), std::move(p2), gap};
}

}  // namespace causalview
