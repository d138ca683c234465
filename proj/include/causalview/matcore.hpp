#pragma once

// Dense complex linear-algebra kernels. Bipartite operators always use the
// ordering A (x) B with A the slow (left) tensor factor.

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "causalview/error.hpp"

namespace causalview {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Tolerance for structural predicates (Hermiticity, PSD, completeness).
inline constexpr double kDefaultTol = 1e-9;

enum class Subsystem { A, B };

inline const char* to_string(Subsystem s) { return s == Subsystem::A ? "A" : "B"; }

/// Dimensions of the composite space H_A (x) H_B.
class BipartiteShape {
 public:
  BipartiteShape(Eigen::Index dim_a, Eigen::Index dim_b) : dim_a_(dim_a), dim_b_(dim_b) {
    if (dim_a < 1 || dim_b < 1) {
      throw ShapeError("bipartite dimensions must be positive, got (" + std::to_string(dim_a) +
                       ", " + std::to_string(dim_b) + ")");
    }
  }

  Eigen::Index dim_a() const { return dim_a_; }
  Eigen::Index dim_b() const { return dim_b_; }
  Eigen::Index total() const { return dim_a_ * dim_b_; }

  bool operator==(const BipartiteShape&) const = default;

 private:
  Eigen::Index dim_a_;
  Eigen::Index dim_b_;
};

namespace detail {

inline std::string dims_of(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline void require_bipartite(const ComplexMatrix& m, const BipartiteShape& shape, const char* op) {
  if (m.rows() != shape.total() || m.cols() != shape.total()) {
    throw ShapeError(std::string(op) + ": matrix is " + dims_of(m) + " but shape (" +
                     std::to_string(shape.dim_a()) + ", " + std::to_string(shape.dim_b()) +
                     ") needs " + std::to_string(shape.total()) + "x" +
                     std::to_string(shape.total()));
  }
}

inline void require_square(const ComplexMatrix& m, const char* op) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ShapeError(std::string(op) + ": expected a non-empty square matrix, got " + dims_of(m));
  }
}

}  // namespace detail

inline ComplexMatrix identity(Eigen::Index d) { return ComplexMatrix::Identity(d, d); }

/// Kronecker product, `a` as the slow factor.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Traces out subsystem `over`; the result lives on the other factor.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const BipartiteShape& shape,
                                   Subsystem over) {
  detail::require_bipartite(m, shape, "partial_trace");
  const Eigen::Index da = shape.dim_a();
  const Eigen::Index db = shape.dim_b();
  if (over == Subsystem::B) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index k = 0; k < da; ++k) out(i, k) = m.block(i * db, k * db, db, db).trace();
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index i = 0; i < da; ++i) out += m.block(i * db, i * db, db, db);
  return out;
}

/// Transposes the `on` factor only. An involution that preserves the trace.
inline ComplexMatrix partial_transpose(const ComplexMatrix& m, const BipartiteShape& shape,
                                       Subsystem on) {
  detail::require_bipartite(m, shape, "partial_transpose");
  const Eigen::Index da = shape.dim_a();
  const Eigen::Index db = shape.dim_b();
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index k = 0; k < da; ++k) {
      auto block = m.block(i * db, k * db, db, db);
      if (on == Subsystem::A) {
        out.block(k * db, i * db, db, db) = block;
      } else {
        out.block(i * db, k * db, db, db) = block.transpose();
      }
    }
  }
  return out;
}

/// Largest entrywise deviation |m - m^dagger|.
inline double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTol) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

inline double frob_dist(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("frob_dist: shapes differ (" + detail::dims_of(a) + " vs " +
                     detail::dims_of(b) + ")");
  }
  return (a - b).norm();
}

struct HermitianEigen {
  RealVector values;     // descending
  ComplexMatrix vectors; // columns, matching `values`
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
/// Within a degenerate eigenspace the returned basis is arbitrary.
inline HermitianEigen eig_hermitian(const ComplexMatrix& m, double tol = kDefaultTol) {
  detail::require_square(m, "eig_hermitian");
  if (const double defect = hermiticity_defect(m); defect > tol) {
    std::ostringstream msg;
    msg << "eig_hermitian: matrix is not Hermitian (max |m - m^dagger| = " << defect
        << ", tol " << tol << ")";
    throw DomainError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) throw NumericalError("eig_hermitian: solver did not converge");
  HermitianEigen out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

inline double min_eigenvalue(const ComplexMatrix& m, double tol = kDefaultTol) {
  return eig_hermitian(m, tol).values.minCoeff();
}

/// Applies f to the spectrum of a Hermitian matrix: V f(diag) V^dagger.
template <typename F>
ComplexMatrix spectral_map(const HermitianEigen& eig, F&& f) {
  RealVector mapped = eig.values.unaryExpr(std::forward<F>(f));
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

namespace detail {

inline void require_psd(const HermitianEigen& eig, double tol, const char* op) {
  const double lowest = eig.values.minCoeff();
  if (lowest < -tol) {
    std::ostringstream msg;
    msg << op << ": matrix is not positive semidefinite (eigenvalue " << lowest
        << " below -" << tol << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace detail

/// Unique PSD square root. Eigenvalues in [-tol, 0) are clamped to zero;
/// anything lower is an error. sqrtm_psd(m)^2 reproduces m to ~1e-14 * |m|.
inline ComplexMatrix sqrtm_psd(const ComplexMatrix& m, double tol = kDefaultTol) {
  const HermitianEigen eig = eig_hermitian(m, tol);
  detail::require_psd(eig, tol, "sqrtm_psd");
  return spectral_map(eig, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

/// m^{-1/2} for a positive definite m; eigenvalues at or below `floor` are an error.
inline ComplexMatrix inverse_sqrtm_pd(const ComplexMatrix& m, double floor, double tol = kDefaultTol) {
  const HermitianEigen eig = eig_hermitian(m, tol);
  if (const double lowest = eig.values.minCoeff(); lowest <= floor) {
    std::ostringstream msg;
    msg << "inverse_sqrtm_pd: matrix is not positive definite (eigenvalue " << lowest
        << " not above " << floor << ")";
    throw RankDeficientError(msg.str());
  }
  return spectral_map(eig, [](double x) { return 1.0 / std::sqrt(x); });
}

/// Replaces eigenvalues in [-tol, 0) by zero; errors on anything lower.
inline ComplexMatrix project_psd(const ComplexMatrix& m, double tol = kDefaultTol) {
  const HermitianEigen eig = eig_hermitian(m, tol);
  detail::require_psd(eig, tol, "project_psd");
  return spectral_map(eig, [](double x) { return std::max(x, 0.0); });
}

/// Column vector e_k of dimension d.
inline ComplexVector basis_vector(Eigen::Index d, Eigen::Index k) {
  ComplexVector v = ComplexVector::Zero(d);
  v(k) = 1.0;
  return v;
}

}  // namespace causalview
