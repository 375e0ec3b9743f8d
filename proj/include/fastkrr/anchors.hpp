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

enum class AnchorMethod { kId, kRandom, kFps };

std::string to_string(AnchorMethod method);
AnchorMethod anchor_method_from_string(const std::string& name);

/// k distinct row indices into the dataset whose kernel columns form the
/// Nystrom basis, together with how they were chosen.
struct AnchorSet {
  std::vector<Index> indices;
  AnchorMethod method = AnchorMethod::kId;
  std::uint64_t seed = 0;

  Index rank() const { return static_cast<Index>(indices.size()); }
};

/// Sketch size for the randomized interpolative decomposition; l >= k rows
/// of Gaussian random projections.
struct SketchConfig {
  Index l = 0;
  std::uint64_t seed = 0;
  /// FGT precision used when forming the sketch; pivot order is robust to
  /// small perturbations, so this is looser than solve-path precision.
  double fgt_delta = 1e-6;
};

/// Raised when column-pivoted QR runs out of numerically independent
/// columns before k pivots are found.
class SketchRankDeficientError : public std::runtime_error {
 public:
  explicit SketchRankDeficientError(Index found, Index requested)
      : std::runtime_error("anchor selection: sketch rank deficient (got " +
                           std::to_string(found) + " of " + std::to_string(requested) +
                           " pivots); try larger l or epsilon"),
        found_(found) {}
  Index pivots_found() const { return found_; }

 private:
  Index found_;
};

/// Randomized interpolative decomposition selection: sketch Y = Omega K by
/// FGT, then column-pivoted QR on the l x n sketch; the first k pivot
/// columns index the anchors. O(n l^2) for the QR.
AnchorSet select_anchors_id(const PointSet& X, Index k, const SketchConfig& cfg,
                            double epsilon);

/// Uniform sample of k distinct indices.
AnchorSet select_anchors_random(const PointSet& X, Index k, std::uint64_t seed);

/// Greedy farthest-point traversal from a seeded random start; each next
/// anchor maximizes its distance to the chosen set (ties to lowest index).
AnchorSet select_anchors_fps(const PointSet& X, Index k, std::uint64_t seed);

}  // namespace fastkrr
