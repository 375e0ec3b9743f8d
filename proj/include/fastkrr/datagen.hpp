/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <cstdint>
#include <string>

#include "fastkrr/point_set.hpp"

namespace fastkrr {

/// Synthetic electric-field dataset: point charges and sampling locations
/// uniform in [0,1]^3, field components by superposition over charges,
/// potential Phi as the regression label.
struct EmFieldData {
  Matrix positions;  // n x 3
  Vector phi;        // labels, one per sample
  Matrix e_field;    // n x 3, stored for validation
  Matrix charges;    // n_charges x 3
  int resample_count = 0;
};

/// Samples coinciding with a charge are redrawn (counted in the result).
EmFieldData gen_em_field(Index n_samples, Index n_charges, std::uint64_t seed);

/// Uniform i.i.d. points in the box [0, q_1] x ... x [0, q_d].
PointSet gen_uniform_box(Index n, Index d, const Vector& box_lengths, std::uint64_t seed);

/// Convenience: unit box.
PointSet gen_uniform_box(Index n, Index d, std::uint64_t seed);

/// CSV with header x,y,z,phi,ex,ey,ez at full (17 significant digit)
/// precision.
void write_em_csv(const EmFieldData& data, const std::string& path);

}  // namespace fastkrr
