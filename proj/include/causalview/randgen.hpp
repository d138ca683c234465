#pragma once

// Seeded generators for full-rank states, POVMs, channels and whole
// scenarios. The engine is std::mt19937_64 seeded through std::seed_seq from
// (seed, stream_id); both are fully specified by the standard, and normals
// are drawn with Box-Muller from 53-bit uniforms, so a given RngSpec gives the
// same objects on any conforming toolchain.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "causalview/multiparty.hpp"

namespace causalview {

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

class Rng {
 public:
  explicit Rng(RngSpec spec) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(spec.stream_id),
                      static_cast<std::uint32_t>(spec.stream_id >> 32)};
    engine_.seed(seq);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

  double normal() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
    cached_ = true;
    return radius * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Standard complex Gaussian, E|z|^2 = 1.
  cplx complex_normal() {
    const double re = normal();
    const double im = normal();
    return cplx(re, im) * std::numbers::sqrt2 * 0.5;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool cached_ = false;
};

inline ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
  return g;
}

/// Orthonormal columns spanning a Ginibre draw (rows >= cols), phases fixed
/// so the result is Haar distributed.
inline ComplexMatrix random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const ComplexMatrix g = ginibre(rows, cols, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  const ComplexMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < cols; ++k) {
    const cplx diag = r(k, k);
    if (std::abs(diag) > 0.0) q.col(k) *= diag / std::abs(diag);
  }
  return q;
}

inline ComplexMatrix random_unitary(Eigen::Index d, Rng& rng) { return random_isometry(d, d, rng); }

inline DensityMatrix random_density(Eigen::Index dim, Rng& rng, double min_eig = 1e-3) {
  if (dim < 2) throw DomainError("random_density: dimension must be at least 2");
  if (!(min_eig > 0.0 && min_eig < 1.0 / static_cast<double>(dim))) {
    throw DomainError("random_density: min_eig must lie in (0, 1/dim)");
  }
  const ComplexMatrix g = ginibre(dim, dim, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (1.0 - static_cast<double>(dim) * min_eig) * rho + min_eig * identity(dim);
  return DensityMatrix(rho);
}

inline DensityMatrix random_density(Eigen::Index dim, RngSpec spec, double min_eig = 1e-3) {
  Rng rng(spec);
  return random_density(dim, rng, min_eig);
}

/// Random POVM with `n_outcomes` effects S^{-1/2} G_k G_k^dagger S^{-1/2}.
/// With `projective`, rank-one projectors onto a Haar-random basis instead
/// (requires n_outcomes == dim).
inline Povm random_povm(Eigen::Index dim, std::size_t n_outcomes, Rng& rng, bool projective = false) {
  if (n_outcomes < 2) throw DomainError("random_povm: need at least two outcomes");
  if (projective) {
    if (static_cast<Eigen::Index>(n_outcomes) != dim) {
      throw DomainError("random_povm: a projective POVM needs exactly dim outcomes");
    }
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < n_outcomes; ++k) labels.push_back(std::to_string(k));
    return Povm::projective(random_unitary(dim, rng), std::move(labels));
  }
  for (;;) {
    std::vector<ComplexMatrix> parts;
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < n_outcomes; ++k) {
      const ComplexMatrix g = ginibre(dim, dim, rng);
      parts.push_back(g * g.adjoint());
      sum += parts.back();
    }
    // A singular sum has probability zero; draw again if it shows up.
    if (min_eigenvalue(sum) < 1e-10) continue;
    const ComplexMatrix norm = inverse_sqrtm_pd(sum, 0.0);
    std::vector<ComplexMatrix> effects;
    for (const auto& p : parts) effects.push_back(hermitian_part(norm * p * norm));
    return Povm::unlabeled(std::move(effects));
  }
}

inline Povm random_povm(Eigen::Index dim, std::size_t n_outcomes, RngSpec spec, bool projective = false) {
  Rng rng(spec);
  return random_povm(dim, n_outcomes, rng, projective);
}

/// Channel whose stacked Kraus operators form a random isometry.
inline KrausChannel random_cptp(Eigen::Index d_in, Eigen::Index d_out, std::size_t n_kraus, Rng& rng) {
  if (n_kraus < 1) throw DomainError("random_cptp: need at least one Kraus operator");
  const Eigen::Index rows = static_cast<Eigen::Index>(n_kraus) * d_out;
  if (rows < d_in) {
    throw DomainError("random_cptp: " + std::to_string(n_kraus) + " Kraus operators of size " +
                      std::to_string(d_out) + "x" + std::to_string(d_in) +
                      " cannot form an isometry");
  }
  const ComplexMatrix v = random_isometry(rows, d_in, rng);
  std::vector<ComplexMatrix> ops;
  for (std::size_t m = 0; m < n_kraus; ++m) {
    ops.push_back(v.middleRows(static_cast<Eigen::Index>(m) * d_out, d_out));
  }
  return KrausChannel(d_in, d_out, std::move(ops));
}

inline KrausChannel random_cptp(Eigen::Index d_in, Eigen::Index d_out, std::size_t n_kraus, RngSpec spec) {
  Rng rng(spec);
  return random_cptp(d_in, d_out, n_kraus, rng);
}

/// Ranges for randomized scenario generation.
struct ScenarioRanges {
  std::vector<int> dims{2, 3, 4};
  int min_kraus = 1;
  int max_kraus = 4;
  int min_outcomes = 2;
  int max_outcomes = 5;
  double min_eig = 1e-3;
};

namespace detail {

inline int pick(const std::vector<int>& options, Rng& rng) {
  return options[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(options.size()) - 1))];
}

/// Kraus count in range, raised if needed so the isometry is feasible.
inline std::size_t pick_kraus(const ScenarioRanges& r, Eigen::Index d_in, Eigen::Index d_out, Rng& rng) {
  const int needed = static_cast<int>((d_in + d_out - 1) / d_out);
  const int lo = std::max(r.min_kraus, needed);
  return static_cast<std::size_t>(rng.uniform_int(lo, std::max(lo, r.max_kraus)));
}

}  // namespace detail

inline CausalScenario random_causal_scenario(RngSpec spec, const ScenarioRanges& r = {}) {
  Rng rng(spec);
  const Eigen::Index da = detail::pick(r.dims, rng);
  const Eigen::Index db = detail::pick(r.dims, rng);
  DensityMatrix rho = random_density(da, rng, r.min_eig);
  KrausChannel ch = random_cptp(da, db, detail::pick_kraus(r, da, db, rng), rng);
  Povm pa = random_povm(da, static_cast<std::size_t>(rng.uniform_int(r.min_outcomes, r.max_outcomes)), rng);
  Povm pb = random_povm(db, static_cast<std::size_t>(rng.uniform_int(r.min_outcomes, r.max_outcomes)), rng);
  return CausalScenario(std::move(rho), std::move(ch), std::move(pa), std::move(pb));
}

/// `dims_c` and `dims_ab` choose d_C and each of d_A, d_B.
inline TripartiteCausalScenario random_tripartite_scenario(RngSpec spec, const std::vector<int>& dims_c,
                                                           const std::vector<int>& dims_ab,
                                                           const ScenarioRanges& r = {}) {
  Rng rng(spec);
  const Eigen::Index dc = detail::pick(dims_c, rng);
  const Eigen::Index da = detail::pick(dims_ab, rng);
  const Eigen::Index db = detail::pick(dims_ab, rng);
  DensityMatrix rho = random_density(dc, rng, r.min_eig);
  KrausChannel ch = random_cptp(dc, da * db, detail::pick_kraus(r, dc, da * db, rng), rng);
  auto outcomes = [&] { return static_cast<std::size_t>(rng.uniform_int(r.min_outcomes, r.max_outcomes)); };
  Povm pa = random_povm(da, outcomes(), rng);
  Povm pb = random_povm(db, outcomes(), rng);
  Povm pc = random_povm(dc, outcomes(), rng);
  return TripartiteCausalScenario(std::move(rho), std::move(ch), std::move(pa), std::move(pb), std::move(pc));
}

}  // namespace causalview
