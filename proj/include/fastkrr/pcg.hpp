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
#include <optional>
#include <vector>

#include "fastkrr/anchors.hpp"
#include "fastkrr/point_set.hpp"
#include "fastkrr/preconditioner.hpp"

namespace fastkrr {

enum class PrecondKind { kNystrom, kNone };

std::string to_string(PrecondKind kind);
PrecondKind precond_kind_from_string(const std::string& name);

struct SolveOptions {
  int max_iters = 1000;
  double rel_tol = 1e-6;
  bool track_energy_norm = false;
  PrecondKind preconditioner = PrecondKind::kNystrom;
  AnchorMethod sampler = AnchorMethod::kId;
  bool record_timings = false;
  double fgt_delta = 1e-8;
  /// Energy tracking needs the exact solution; above this size the dense
  /// direct solve is refused rather than silently approximated.
  Index dense_cap = 20000;
};

struct SolveReport {
  Vector alpha;
  int iterations = 0;
  bool converged = false;
  /// ||r^(i)|| for i = 0..iterations (the i=0 entry is ||b||).
  std::vector<double> residual_history;
  /// ||alpha* - alpha^(i)||_{K + beta I}, when tracking was requested.
  std::vector<double> energy_history;
  int clip_count = 0;
  double anchor_seconds = 0.0;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// (K + beta I) v by one FGT self-application plus the ridge term.
Vector operator_matvec(const FgtPlan& plan, double beta, const Vector& v);

/// Convenience overload that builds a throwaway plan.
Vector operator_matvec(const PointSet& X, const KernelConfig& cfg, const Vector& v,
                       double fgt_delta = 1e-8);

/// sqrt(v^T (K + beta I) v); tiny negative inner products from FGT noise
/// clamp to zero.
double energy_norm(const FgtPlan& plan, double beta, const Vector& v);
double energy_norm(const PointSet& X, const KernelConfig& cfg, const Vector& v,
                   double fgt_delta = 1e-8);

/// Exact solution and dense operator used for energy-norm tracking.
struct EnergyReference {
  Matrix dense_op;  // K + beta I
  Vector alpha_star;
};

/// Dense direct solve of (K + beta I) alpha* = b; refused above `dense_cap`.
EnergyReference make_energy_reference(const PointSet& X, const KernelConfig& cfg,
                                      const Vector& b, Index dense_cap);

/// Preconditioned conjugate gradient for (K + beta I) alpha = b: anchor
/// selection, preconditioner build, then CG with FGT matvecs. Stops at
/// ||r|| / ||b|| <= rel_tol or max_iters (non-convergence is reported, not
/// thrown).
SolveReport solve_krr(const PointSet& X, const Vector& b, const KernelConfig& cfg,
                      Index k, const SketchConfig& sketch, const SolveOptions& opts);

/// Variant reusing an existing plan and preconditioner (null `precond`
/// means plain CG; `energy` may be null).
SolveReport pcg_solve(const FgtPlan& plan, double beta, const Vector& b,
                      const NystromPreconditioner* precond, const SolveOptions& opts,
                      const EnergyReference* energy = nullptr);

/// Predictions f(y) = sum_j k(x_j, y) alpha_j at the query points.
Vector predict(const PointSet& X_train, const Vector& alpha, const PointSet& X_query,
               double epsilon, double fgt_delta = 1e-8);

}  // namespace fastkrr
