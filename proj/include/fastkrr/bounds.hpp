/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fastkrr/point_set.hpp"

namespace fastkrr {

/// Spectrum of a PSD kernel matrix, non-increasing. For PSD K singular
/// values and eigenvalues coincide.
class SpectralSummary {
 public:
  /// Accepts values in any order; sorts descending and clamps roundoff
  /// negatives (rejects anything below -1e-10 * largest).
  explicit SpectralSummary(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  double largest() const { return values_.front(); }
  Index size() const { return static_cast<Index>(values_.size()); }

 private:
  std::vector<double> values_;
};

/// Inputs of the required-rank formula: dataset box, kernel and ridge
/// parameters, target condition number xi, and the error-factor supremum.
struct RankBoundInputs {
  Vector box_lengths;
  double epsilon = 1.0;
  double beta = 1.0;
  double xi = 2.0;
  double m_bar = 1.0;
  double n = 1.0;
};

/// Interpolative decomposition error factor p(n,k) = sqrt(1 + k(n-k)).
double id_error_factor(Index n, Index k);

/// Condition-number bound 1 + M * lambda_{k+1} / beta for the Nystrom
/// preconditioned system.
double condition_bound(double lambda_k1, double M, double beta);

/// Gaussian-kernel rank rate gamma = (2/pi) * sqrt(ln(1/delta) / epsilon).
double gamma_rate(double epsilon, double delta);

/// Count of singular values with sigma_j / sigma_1 >= delta.
Index numerical_rank(const SpectralSummary& summary, double delta);

/// Rank bound prod_i (floor(gamma * q_i) + 1) for points boxed by the
/// given interval lengths; saturates instead of overflowing.
std::int64_t numerical_rank_bound(const Vector& box_lengths, double epsilon, double delta);

/// Raised by required_rank when the target condition number already holds
/// without any preconditioning (the ln argument drops to <= 1).
class TargetAlreadyMetError : public std::invalid_argument {
 public:
  TargetAlreadyMetError()
      : std::invalid_argument("required_rank: target condition number already met; "
                              "no low-rank correction needed") {}
};

struct RankRequirement {
  std::int64_t k = 0;
  /// Bound exceeded n; any rank works only vacuously.
  bool exceeds_n = false;
};

/// Minimal admissible Nystrom rank for condition number at most xi:
/// k >= prod_i (floor((2 q_i / pi) sqrt(ln(m_bar n / (beta (xi-1))) / epsilon)) + 1).
RankRequirement required_rank(const RankBoundInputs& inputs);

struct ConditionEstimate {
  double value = 1.0;
  double lambda_max = 1.0;
  double lambda_min = 1.0;
  bool breakdown = false;
};

using LinearOperator = std::function<Vector(const Vector&)>;

/// Extreme-eigenvalue estimate of the preconditioned operator
/// P^{-1/2} A P^{-1/2} by preconditioned Lanczos with full
/// reorthogonalization, matrix-free in A-applies and P^{-1}-applies.
/// `probes` independent restarts; pass an identity `precond_apply` for the
/// unpreconditioned operator.
ConditionEstimate estimate_condition(const LinearOperator& op_matvec,
                                     const LinearOperator& precond_apply, Index n,
                                     int probes, std::uint64_t seed = 0,
                                     int max_lanczos_iters = 200);

}  // namespace fastkrr
