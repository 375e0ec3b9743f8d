/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <cmath>
#include <vector>

#include "fastkrr/point_set.hpp"

namespace fastkrr {

// Exponent threshold below which exp(-t) is treated as exactly zero
// (ln of the smallest positive normal double is about -708.4).
inline constexpr double kExpUnderflow = 708.0;

/// Single kernel entry exp(-||x-y||^2 / epsilon^2).
inline double gauss_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                           const Eigen::Ref<const Eigen::RowVectorXd>& y,
                           double epsilon) {
  const double t = (x - y).squaredNorm() / (epsilon * epsilon);
  return t > kExpUnderflow ? 0.0 : std::exp(-t);
}

/// Discrete Gauss transform by the O(MN) double loop:
/// out[j] = sum_i q[i] * exp(-||y_j - x_i||^2 / epsilon^2).
/// This is the exactness oracle for the fast path.
Vector gauss_matvec_direct(const PointSet& sources, const PointSet& targets,
                           double epsilon, const Vector& weights);

/// Block variant: one transform per column of `weights`.
Matrix gauss_matvec_direct(const PointSet& sources, const PointSet& targets,
                           double epsilon, const Matrix& weights);

/// Dense kernel block K(rows, cols); evaluated entrywise (meant for small
/// index sets such as the anchor-anchor block).
Matrix kernel_submatrix(const PointSet& X, const std::vector<Index>& rows,
                        const std::vector<Index>& cols, double epsilon);

/// Full dense kernel matrix; desk-scale oracle helper.
Matrix dense_gauss_kernel(const PointSet& X, double epsilon);

/// Dense cross-kernel block, K_ij = k(targets_i, sources_j).
Matrix dense_gauss_cross_kernel(const PointSet& targets, const PointSet& sources,
                                double epsilon);

}  // namespace fastkrr
