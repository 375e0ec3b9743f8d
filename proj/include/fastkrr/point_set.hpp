/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <utility>

namespace fastkrr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Axis-aligned bounding box; one closed interval [lo_i, hi_i] per dimension.
struct BoundingBox {
  Vector lo;
  Vector hi;

  /// Interval lengths q_i = hi_i - lo_i.
  Vector lengths() const { return hi - lo; }

  bool contains(const Eigen::Ref<const Vector>& x, double slack = 0.0) const {
    for (Index i = 0; i < lo.size(); ++i) {
      if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    }
    return true;
  }
};

/// A dataset of n points in R^d (rows are points) plus its bounding box.
/// Immutable after construction.
class PointSet {
 public:
  explicit PointSet(Matrix points) : points_(std::move(points)) {
    if (points_.rows() < 1 || points_.cols() < 1) {
      throw std::invalid_argument("PointSet: need at least one point and one dimension");
    }
    if (!points_.allFinite()) {
      throw std::invalid_argument("PointSet: coordinates must be finite");
    }
    box_.lo = points_.colwise().minCoeff();
    box_.hi = points_.colwise().maxCoeff();
  }

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  const BoundingBox& bounding_box() const { return box_; }

 private:
  Matrix points_;
  BoundingBox box_;
};

/// Gaussian kernel k(x,y) = exp(-||x-y||^2 / epsilon^2) plus the ridge
/// parameter beta of the regularized system (K + beta I) alpha = b.
struct KernelConfig {
  double epsilon = 1.0;
  double beta = 1.0;

  KernelConfig() = default;
  KernelConfig(double eps, double b) : epsilon(eps), beta(b) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("KernelConfig: epsilon must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("KernelConfig: beta must be positive");
  }
};

}  // namespace fastkrr
