#pragma once

// Brute-force reference computations for tests. These deliberately avoid the
// library's kernels (block slicing, vectorized Kraus sums) and work from
// basis-vector contractions instead.

#include <vector>

#include "causalview/matcore.hpp"

namespace oracle {

using causalview::ComplexMatrix;
using causalview::ComplexVector;
using Index = Eigen::Index;

inline ComplexVector e(Index d, Index k) {
  ComplexVector v = ComplexVector::Zero(d);
  v(k) = 1.0;
  return v;
}

inline ComplexMatrix unit(Index d, Index i, Index j) { return e(d, i) * e(d, j).transpose(); }

/// Kronecker product by the definition (a (x) b)_{(i k),(j l)} = a_ij b_kl.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < b.rows(); ++k)
      for (Index j = 0; j < a.cols(); ++j)
        for (Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Tr_B m = sum_k (I (x) <k|) m (I (x) |k>).
inline ComplexMatrix trace_b(const ComplexMatrix& m, Index da, Index db) {
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (Index k = 0; k < db; ++k) {
    const ComplexMatrix v = kron(ComplexMatrix::Identity(da, da), e(db, k));
    out += v.adjoint() * m * v;
  }
  return out;
}

/// Tr_A m = sum_k (<k| (x) I) m (|k> (x) I).
inline ComplexMatrix trace_a(const ComplexMatrix& m, Index da, Index db) {
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Index k = 0; k < da; ++k) {
    const ComplexMatrix v = kron(e(da, k), ComplexMatrix::Identity(db, db));
    out += v.adjoint() * m * v;
  }
  return out;
}

/// m^{T_A} = sum_{ik} |k><i| (x) (<i| (x) I) m (|k> (x) I).
inline ComplexMatrix transpose_a(const ComplexMatrix& m, Index da, Index db) {
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  const ComplexMatrix id = ComplexMatrix::Identity(db, db);
  for (Index i = 0; i < da; ++i)
    for (Index k = 0; k < da; ++k) {
      const ComplexMatrix block = kron(e(da, i), id).adjoint() * m * kron(e(da, k), id);
      out += kron(unit(da, k, i), block);
    }
  return out;
}

/// (I (x) T)(X) = sum_{jk} |j><k| (x) T(<j|X|k>-block) for X = sum |j><k| (x) X_jk.
/// With X = |Omega><Omega| this is sum_{jk} |j><k| (x) T(|j><k|).
template <typename Channel>
inline ComplexMatrix choi_by_definition(const Channel& apply, Index d_in) {
  ComplexMatrix out;
  for (Index j = 0; j < d_in; ++j)
    for (Index k = 0; k < d_in; ++k) {
      const ComplexMatrix img = apply(unit(d_in, j, k));
      if (out.size() == 0) out = ComplexMatrix::Zero(d_in * img.rows(), d_in * img.rows());
      out += kron(unit(d_in, j, k), img);
    }
  return out;
}

/// sum_{jk} A|j><k|A^dagger (x) T(|j><k|) with A = sqrt(rho)^T: the shared
/// state of the spacelike view, assembled term by term.
template <typename Channel>
inline ComplexMatrix steered_state_by_definition(const Channel& apply, const ComplexMatrix& sqrt_rho) {
  const Index d = sqrt_rho.rows();
  const ComplexMatrix a = sqrt_rho.transpose();
  ComplexMatrix out;
  for (Index j = 0; j < d; ++j)
    for (Index k = 0; k < d; ++k) {
      const ComplexMatrix img = apply(unit(d, j, k));
      const ComplexMatrix left = a * unit(d, j, k) * a.adjoint();
      if (out.size() == 0) out = ComplexMatrix::Zero(d * img.rows(), d * img.rows());
      out += kron(left, img);
    }
  return out;
}

/// Roots of the characteristic polynomial of a 2x2 Hermitian matrix, descending.
inline std::pair<double, double> eig2(const ComplexMatrix& m) {
  const double tr = m.trace().real();
  const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  return {tr / 2 + disc, tr / 2 - disc};
}

}  // namespace oracle
