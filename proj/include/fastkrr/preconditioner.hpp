/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>

#include "fastkrr/anchors.hpp"
#include "fastkrr/fgt.hpp"
#include "fastkrr/point_set.hpp"

namespace fastkrr {

class DegenerateAnchorsError : public std::runtime_error {
 public:
  explicit DegenerateAnchorsError(int clipped, Index k)
      : std::runtime_error("preconditioner: anchor set degenerate (" +
                           std::to_string(clipped) + " of " + std::to_string(k) +
                           " eigenvalues clipped); remove duplicate anchors"),
        clipped_(clipped) {}
  int clipped() const { return clipped_; }

 private:
  int clipped_;
};

/// Nystrom preconditioner (K~ + beta I)^{-1} with K~ = C U C^T, applied via
/// the Woodbury identity and the stabilized k x k Cholesky system
/// F F^T = beta I + U^{1/2} C^T C U^{1/2}.
class NystromPreconditioner {
 public:
  const AnchorSet& anchors() const { return anchors_; }
  const Matrix& anchor_points() const { return anchor_plan_->sources().points(); }
  const Matrix& u_half() const { return u_half_; }
  const Matrix& chol_factor() const { return chol_factor_; }
  double beta() const { return beta_; }
  double epsilon() const { return epsilon_; }
  int clip_count() const { return clip_count_; }

  /// (K~ + beta I)^{-1} x, length n in and out. O(n + k^2) per call.
  Vector apply(const Vector& x) const;
  Matrix apply(const Matrix& x) const;

  /// Versioned JSON serialization of everything needed to resume a solve
  /// without rebuilding (anchors, U^{1/2}, F, parameters).
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static NystromPreconditioner load(std::istream& in, const PointSet& X, FgtOptions fgt_options = {});
  static NystromPreconditioner load_file(const std::string& path, const PointSet& X,
                                         FgtOptions fgt_options = {});

 private:
  friend NystromPreconditioner build_preconditioner(const PointSet&, const AnchorSet&,
                                                    double, double, double, FgtOptions);

  NystromPreconditioner() = default;

  AnchorSet anchors_;
  Matrix u_half_;       // k x k symmetric (K_SS)^{-1/2} after eigenvalue clipping
  Matrix chol_factor_;  // lower-triangular F with F F^T = beta I + U^{1/2} C^T C U^{1/2}
  double beta_ = 0.0;
  double epsilon_ = 0.0;
  int clip_count_ = 0;

  // Kernel block applications for C and C^T.
  std::shared_ptr<const FgtPlan> data_plan_;    // sources = full dataset
  std::shared_ptr<const FgtPlan> anchor_plan_;  // sources = anchor subset
};

/// Builds the preconditioner: K_SS eigendecomposition with clipping to form
/// U^{1/2}, then the stabilized Cholesky factor via FGT block products.
/// O(nk + k^3) total. `fgt_delta` is the precision of the C / C^T
/// applications on both the build and apply paths.
NystromPreconditioner build_preconditioner(const PointSet& X, const AnchorSet& S,
                                           double beta, double epsilon,
                                           double fgt_delta = 1e-8,
                                           FgtOptions fgt_options = {});

}  // namespace fastkrr
