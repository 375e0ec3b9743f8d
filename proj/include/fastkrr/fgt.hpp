/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fastkrr/point_set.hpp"

namespace fastkrr {

/// Which evaluation path an apply call takes.
///   kAuto      - expansion when its predicted cost beats the direct loop
///   kExpansion - always the clustered Taylor expansion
///   kDirect    - always the exact double loop
enum class FgtPath { kAuto, kExpansion, kDirect };

struct FgtOptions {
  FgtPath path = FgtPath::kAuto;
  /// Cap on the per-cluster Taylor degree. Precision requests that would
  /// need a higher degree raise PrecisionUnattainableError.
  int max_degree = 60;
  /// Cap on the number of source clusters.
  int max_clusters = 4096;
  /// Target cluster radius as a multiple of epsilon; <= 0 picks a value
  /// from a cost model.
  double radius_scale = 0.0;
};

/// Raised when the requested per-entry precision cannot be met within the
/// configured degree cap; carries the precision that would be achievable.
class PrecisionUnattainableError : public std::runtime_error {
 public:
  PrecisionUnattainableError(double requested, double achievable)
      : std::runtime_error("fgt: requested precision " + std::to_string(requested) +
                           " unattainable within degree cap; achievable ~" +
                           std::to_string(achievable)),
        requested_(requested),
        achievable_(achievable) {}

  double requested_delta() const { return requested_; }
  double achievable_delta() const { return achievable_; }

 private:
  double requested_;
  double achievable_;
};

/// Monomial bookkeeping for multivariate Taylor expansions, graded order
/// (all terms of total degree m before degree m+1). Entry t is produced
/// from entry parent[t] by one extra factor of coordinate axis[t], so a
/// full monomial vector evaluates in one multiply per entry.
struct MonomialTable {
  int dim = 0;
  int max_degree = -1;
  std::vector<std::int32_t> parent;
  std::vector<std::int32_t> axis;
  /// 2^|alpha| / alpha! per monomial.
  std::vector<double> alpha_scale;
  /// degree_offset[m] = number of monomials of total degree < m.
  std::vector<std::ptrdiff_t> degree_offset;

  std::ptrdiff_t terms_for_degree(int degree) const {
    return degree_offset[static_cast<std::size_t>(degree) + 1];
  }

  /// out[t] = z^alpha_t for the first `count` monomials.
  void eval(const double* z, double* out, std::ptrdiff_t count) const {
    out[0] = 1.0;
    for (std::ptrdiff_t t = 1; t < count; ++t) out[t] = z[axis[t]] * out[parent[t]];
  }
};

MonomialTable make_monomial_table(int dim, int max_degree);

/// Precomputed clustering and truncation data for fast application of the
/// Gaussian kernel operator of one source set.
///
/// Accuracy contract: per-entry absolute error of an apply is at most
/// delta * (||q||_1 / n) -- i.e. at most delta times the mean absolute
/// weight -- for targets anywhere in space. Holds for the adjoint too.
class FgtPlan {
 public:
  const PointSet& sources() const { return sources_; }
  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  const FgtOptions& options() const { return options_; }

  Index num_clusters() const { return static_cast<Index>(centers_.rows()); }
  /// Largest per-cluster Taylor degree in the plan.
  int max_degree() const { return max_degree_; }
  const std::vector<int>& cluster_degrees() const { return cluster_degree_; }

  /// True when `apply` with automatic path selection would expand rather
  /// than fall back to the direct loop, for the given target count.
  bool expansion_profitable(Index num_targets) const;

  Vector apply(const PointSet& targets, const Vector& weights) const;
  Matrix apply(const PointSet& targets, const Matrix& weights) const;

  /// Transpose action: maps a weight per target to a value per source.
  Vector apply_adjoint(const PointSet& targets, const Vector& weights) const;
  Matrix apply_adjoint(const PointSet& targets, const Matrix& weights) const;

 private:
  friend FgtPlan build_fgt_plan(const PointSet&, double, double, FgtOptions);

  FgtPlan(PointSet sources, double epsilon, double delta, FgtOptions options)
      : sources_(std::move(sources)), epsilon_(epsilon), delta_(delta), options_(options) {}

  void apply_expansion(const Matrix& targets, const Matrix& weights, Matrix& out) const;
  void apply_direct(const Matrix& targets, const Matrix& weights, Matrix& out) const;
  void adjoint_expansion(const Matrix& targets, const Matrix& weights, Matrix& out) const;
  void adjoint_direct(const Matrix& targets, const Matrix& weights, Matrix& out) const;
  bool use_expansion(Index num_targets) const;

  PointSet sources_;
  double epsilon_ = 1.0;
  double delta_ = 1e-6;
  FgtOptions options_;

  // Clustering (Gonzalez farthest-point) of the sources.
  Matrix centers_;                             // K x d
  std::vector<std::int32_t> cluster_of_;       // per source
  std::vector<std::vector<std::int32_t>> members_;
  std::vector<double> cluster_radius_scaled_;  // max ||x - c|| / epsilon per cluster
  std::vector<int> cluster_degree_;            // Taylor degree per cluster
  std::vector<std::ptrdiff_t> coeff_offset_;   // into a packed coefficient buffer
  std::ptrdiff_t total_terms_ = 0;
  int max_degree_ = 0;

  // Per-source cached quantities: (x_i - c)/epsilon and exp(-||.||^2).
  Matrix scaled_diff_;
  Vector source_gauss_;

  MonomialTable table_;
  double tail_scaled_ = 0.0;  // sqrt(ln(1/delta_unit)); cutoff = radius + tail
  double delta_unit_ = 0.0;   // per-source, per-unit-weight error budget

  // Cost-model statistics cached at build time for the auto path choice.
  double coeff_work_ = 0.0;
  double eval_terms_per_target_ = 0.0;
};

/// Builds a plan meeting per-entry precision `delta` (see FgtPlan for the
/// exact contract). Build cost is linear in the source count for fixed
/// dimension and precision.
FgtPlan build_fgt_plan(const PointSet& sources, double epsilon, double delta,
                       FgtOptions options = {});

/// Free-function spellings of the plan operations.
Vector fgt_apply(const FgtPlan& plan, const PointSet& targets, const Vector& weights);
Matrix fgt_apply(const FgtPlan& plan, const PointSet& targets, const Matrix& weights);
Vector fgt_apply_adjoint(const FgtPlan& plan, const PointSet& targets, const Vector& weights);
Matrix fgt_apply_adjoint(const FgtPlan& plan, const PointSet& targets, const Matrix& weights);

}  // namespace fastkrr
