/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "fastkrr/kernel.hpp"

#include <stdexcept>

namespace fastkrr {

namespace {

void check_dims(const PointSet& sources, const PointSet& targets, Index weight_rows) {
  if (sources.dim() != targets.dim()) {
    throw std::invalid_argument("gauss transform: source/target dimension mismatch");
  }
  if (weight_rows != sources.size()) {
    throw std::invalid_argument("gauss transform: weight length must equal source count");
  }
}

}  // namespace

Vector gauss_matvec_direct(const PointSet& sources, const PointSet& targets,
                           double epsilon, const Vector& weights) {
  Matrix w = weights;
  return gauss_matvec_direct(sources, targets, epsilon, w).col(0);
}

Matrix gauss_matvec_direct(const PointSet& sources, const PointSet& targets,
                           double epsilon, const Matrix& weights) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("gauss transform: epsilon must be positive");
  check_dims(sources, targets, weights.rows());

  const Matrix& X = sources.points();
  const Matrix& Y = targets.points();
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  Matrix out = Matrix::Zero(Y.rows(), weights.cols());
  for (Index j = 0; j < Y.rows(); ++j) {
    for (Index i = 0; i < X.rows(); ++i) {
      const double t = (Y.row(j) - X.row(i)).squaredNorm() * inv_eps2;
      if (t > kExpUnderflow) continue;
      out.row(j) += std::exp(-t) * weights.row(i);
    }
  }
  return out;
}

Matrix kernel_submatrix(const PointSet& X, const std::vector<Index>& rows,
                        const std::vector<Index>& cols, double epsilon) {
  for (Index i : rows) {
    if (i < 0 || i >= X.size()) throw std::out_of_range("kernel_submatrix: row index out of range");
  }
  for (Index j : cols) {
    if (j < 0 || j >= X.size()) throw std::out_of_range("kernel_submatrix: col index out of range");
  }
  const Matrix& P = X.points();
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  const bool symmetric = rows == cols;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const std::size_t b_end = symmetric ? a + 1 : cols.size();
    for (std::size_t b = 0; b < b_end; ++b) {
      out(static_cast<Index>(a), static_cast<Index>(b)) =
          gauss_kernel(P.row(rows[a]), P.row(cols[b]), epsilon);
    }
  }
  if (symmetric) {
    // Evaluate once, mirror: exact symmetry by construction.
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = a + 1; b < cols.size(); ++b) {
        out(static_cast<Index>(a), static_cast<Index>(b)) =
            out(static_cast<Index>(b), static_cast<Index>(a));
      }
    }
  }
  return out;
}

Matrix dense_gauss_kernel(const PointSet& X, double epsilon) {
  const Matrix& P = X.points();
  const Index n = P.rows();
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  Matrix K(n, n);
  for (Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Index j = 0; j < i; ++j) {
      const double t = (P.row(i) - P.row(j)).squaredNorm() * inv_eps2;
      const double v = t > kExpUnderflow ? 0.0 : std::exp(-t);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Matrix dense_gauss_cross_kernel(const PointSet& targets, const PointSet& sources,
                                double epsilon) {
  if (sources.dim() != targets.dim()) {
    throw std::invalid_argument("cross kernel: dimension mismatch");
  }
  const Matrix& Y = targets.points();
  const Matrix& X = sources.points();
  Matrix K(Y.rows(), X.rows());
  for (Index i = 0; i < Y.rows(); ++i) {
    for (Index j = 0; j < X.rows(); ++j) {
      K(i, j) = gauss_kernel(Y.row(i), X.row(j), epsilon);
    }
  }
  return K;
}

}  // namespace fastkrr
