#pragma once

// No-signalling checks on a shared bipartite state, and the demonstration
// that a signalling causal scenario is, seen spacelike, a change of state.

#include <algorithm>
#include <vector>

#include "causalview/scenario.hpp"

namespace causalview {

struct NoSignallingReport {
  /// Max change of a B marginal p(b_j) when A switches between POVMs.
  double direction_a_to_b = 0.0;
  /// Max change of an A marginal p(a_i) when B switches between POVMs.
  double direction_b_to_a = 0.0;
  /// Number of unordered POVM pairs compared, both sides together.
  std::size_t povm_pairs_tested = 0;
  double tol = 0.0;
  bool pass = false;
};

namespace detail {

/// Largest spread max - min of each marginal across the alternatives.
/// marginals[alt][outcome].
inline double max_spread(const std::vector<RealVector>& marginals) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < marginals.front().size(); ++k) {
    double lo = marginals.front()(k), hi = lo;
    for (const auto& m : marginals) {
      lo = std::min(lo, m(k));
      hi = std::max(hi, m(k));
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

inline std::size_t pairs(std::size_t n) { return n * (n - 1) / 2; }

}  // namespace detail

/// Checks both directions of the no-signalling condition for `tau` over the
/// supplied alternative measurements (at least two per side).
inline NoSignallingReport check_nosignalling(const DensityMatrix& tau, const BipartiteShape& shape,
                                             const std::vector<Povm>& povms_a,
                                             const std::vector<Povm>& povms_b,
                                             double tol = 1e-10) {
  if (povms_a.size() < 2 || povms_b.size() < 2) {
    throw UsageError("no-signalling check needs at least two alternative POVMs per side (got " +
                     std::to_string(povms_a.size()) + " on A, " + std::to_string(povms_b.size()) +
                     " on B)");
  }
  if (tau.dim() != shape.total()) throw ShapeError("check_nosignalling: tau does not match shape");
  for (const auto& p : povms_a)
    if (p.dim() != shape.dim_a()) throw ShapeError("check_nosignalling: A POVM has wrong dimension");
  for (const auto& p : povms_b)
    if (p.dim() != shape.dim_b()) throw ShapeError("check_nosignalling: B POVM has wrong dimension");

  NoSignallingReport report;
  report.tol = tol;
  // For fixed B POVM, B marginals under every A alternative.
  for (const auto& pb : povms_b) {
    std::vector<RealVector> marginals;
    for (const auto& pa : povms_a) {
      marginals.push_back(joint_spacelike(SpacelikeScenario(tau, shape, pa, pb)).col_marginal());
    }
    report.direction_a_to_b = std::max(report.direction_a_to_b, detail::max_spread(marginals));
  }
  for (const auto& pa : povms_a) {
    std::vector<RealVector> marginals;
    for (const auto& pb : povms_b) {
      marginals.push_back(joint_spacelike(SpacelikeScenario(tau, shape, pa, pb)).row_marginal());
    }
    report.direction_b_to_a = std::max(report.direction_b_to_a, detail::max_spread(marginals));
  }
  report.povm_pairs_tested = detail::pairs(povms_a.size()) + detail::pairs(povms_b.size());
  report.pass = report.direction_a_to_b < tol && report.direction_b_to_a < tol;
  return report;
}

struct SignallingDemoReport {
  /// B marginals computed causally with rho and rho'.
  RealVector causal_b_marginal;
  RealVector causal_b_marginal_prime;
  /// Same marginals from the shared states tau = T_rho^{T_A}, tau' = T_rho'^{T_A}.
  RealVector spacelike_b_marginal;
  RealVector spacelike_b_marginal_prime;
  /// max_j |p(b_j | rho) - p(b_j | rho')|; may be nonzero.
  double marginal_shift = 0.0;
  /// Max entrywise gap between the two views over both full tables.
  double cross_view_gap = 0.0;
  /// rho' equals rho (Frobenius below tol), so nothing changes.
  bool degenerate = false;
};

/// Replaces the preparation state rho by rho' in `s` and compares the B
/// marginals under both views. The causal observer sees the B statistics
/// change; the spacelike observer computes the same numbers from a different
/// shared state.
inline SignallingDemoReport signalling_demo(const CausalScenario& s, const DensityMatrix& rho_prime,
                                            double tol = kDefaultTol) {
  if (rho_prime.dim() != s.rho().dim()) throw ShapeError("signalling_demo: rho' has the wrong dimension");
  const CausalScenario primed(rho_prime, s.channel(), s.povm_a(), s.povm_b());

  const JointDistribution causal = joint_causal(s);
  const JointDistribution causal_prime = joint_causal(primed);
  const JointDistribution spacelike = joint_spacelike(to_spacelike(s));
  const JointDistribution spacelike_prime = joint_spacelike(to_spacelike(primed));

  SignallingDemoReport r;
  r.causal_b_marginal = causal.col_marginal();
  r.causal_b_marginal_prime = causal_prime.col_marginal();
  r.spacelike_b_marginal = spacelike.col_marginal();
  r.spacelike_b_marginal_prime = spacelike_prime.col_marginal();
  r.marginal_shift = (r.causal_b_marginal - r.causal_b_marginal_prime).cwiseAbs().maxCoeff();
  r.cross_view_gap = std::max(causal.max_abs_gap(spacelike), causal_prime.max_abs_gap(spacelike_prime));
  r.degenerate = frob_dist(s.rho().mat(), rho_prime.mat()) < tol;
  return r;
}

}  // namespace causalview
