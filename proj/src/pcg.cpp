/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "fastkrr/pcg.hpp"

#include <Eigen/Cholesky>

#include <chrono>
#include <cmath>

#include "fastkrr/kernel.hpp"

namespace fastkrr {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string to_string(PrecondKind kind) {
  return kind == PrecondKind::kNystrom ? "nystrom" : "none";
}

PrecondKind precond_kind_from_string(const std::string& name) {
  if (name == "nystrom") return PrecondKind::kNystrom;
  if (name == "none") return PrecondKind::kNone;
  throw std::invalid_argument("unknown preconditioner '" + name + "' (expected nystrom|none)");
}

Vector operator_matvec(const FgtPlan& plan, double beta, const Vector& v) {
  if (v.size() != plan.sources().size()) {
    throw std::invalid_argument("operator_matvec: length mismatch");
  }
  return plan.apply(plan.sources(), v) + beta * v;
}

Vector operator_matvec(const PointSet& X, const KernelConfig& cfg, const Vector& v,
                       double fgt_delta) {
  const FgtPlan plan = build_fgt_plan(X, cfg.epsilon, fgt_delta);
  return operator_matvec(plan, cfg.beta, v);
}

double energy_norm(const FgtPlan& plan, double beta, const Vector& v) {
  const double q = v.dot(operator_matvec(plan, beta, v));
  return std::sqrt(std::max(q, 0.0));
}

double energy_norm(const PointSet& X, const KernelConfig& cfg, const Vector& v,
                   double fgt_delta) {
  const FgtPlan plan = build_fgt_plan(X, cfg.epsilon, fgt_delta);
  return energy_norm(plan, cfg.beta, v);
}

EnergyReference make_energy_reference(const PointSet& X, const KernelConfig& cfg,
                                      const Vector& b, Index dense_cap) {
  if (X.size() > dense_cap) {
    throw std::invalid_argument(
        "energy tracking refused: n = " + std::to_string(X.size()) +
        " exceeds the dense cap " + std::to_string(dense_cap) +
        " for the exact reference solve");
  }
  EnergyReference ref;
  ref.dense_op = dense_gauss_kernel(X, cfg.epsilon);
  ref.dense_op.diagonal().array() += cfg.beta;
  ref.alpha_star = Eigen::LLT<Matrix>(ref.dense_op).solve(b);
  return ref;
}

SolveReport pcg_solve(const FgtPlan& plan, double beta, const Vector& b,
                      const NystromPreconditioner* precond, const SolveOptions& opts,
                      const EnergyReference* energy) {
  if (b.size() != plan.sources().size()) {
    throw std::invalid_argument("pcg_solve: right-hand side length mismatch");
  }
  if (!(opts.rel_tol > 0.0) || opts.max_iters < 1) {
    throw std::invalid_argument("pcg_solve: need rel_tol > 0 and max_iters >= 1");
  }

  const auto t0 = std::chrono::steady_clock::now();
  SolveReport report;
  const Index n = b.size();
  const double b_norm = b.norm();

  Vector x = Vector::Zero(n);
  Vector r = b;

  auto record_energy = [&](const Vector& current) {
    if (energy == nullptr) return;
    const Vector e = energy->alpha_star - current;
    const double q = e.dot(energy->dense_op * e);
    report.energy_history.push_back(std::sqrt(std::max(q, 0.0)));
  };

  report.residual_history.push_back(b_norm);
  record_energy(x);
  if (b_norm == 0.0) {
    report.alpha = x;
    report.converged = true;
    report.solve_seconds = seconds_since(t0);
    return report;
  }

  Vector z = precond ? precond->apply(r) : r;
  Vector p = z;
  double rz = r.dot(z);

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    const Vector v = operator_matvec(plan, beta, p);
    const double pv = p.dot(v);
    if (!(pv > 0.0)) {
      // Loss of positive definiteness (can only come from numerical noise);
      // stop with what we have.
      report.iterations = iter - 1;
      report.converged = false;
      break;
    }
    const double step = rz / pv;
    x += step * p;
    r -= step * v;

    const double r_norm = r.norm();
    report.residual_history.push_back(r_norm);
    record_energy(x);
    report.iterations = iter;
    if (r_norm <= opts.rel_tol * b_norm) {
      report.converged = true;
      break;
    }
    if (iter == opts.max_iters) break;

    z = precond ? precond->apply(r) : r;
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }

  report.alpha = std::move(x);
  report.solve_seconds = seconds_since(t0);
  return report;
}

SolveReport solve_krr(const PointSet& X, const Vector& b, const KernelConfig& cfg,
                      Index k, const SketchConfig& sketch, const SolveOptions& opts) {
  if (b.size() != X.size()) throw std::invalid_argument("solve_krr: length(b) must equal n");

  const FgtPlan plan = build_fgt_plan(X, cfg.epsilon, opts.fgt_delta);

  EnergyReference energy_ref;
  const EnergyReference* energy = nullptr;
  if (opts.track_energy_norm) {
    energy_ref = make_energy_reference(X, cfg, b, opts.dense_cap);
    energy = &energy_ref;
  }

  SolveReport report;
  if (opts.preconditioner == PrecondKind::kNystrom) {
    const auto t0 = std::chrono::steady_clock::now();
    AnchorSet anchors;
    switch (opts.sampler) {
      case AnchorMethod::kId:
        anchors = select_anchors_id(X, k, sketch, cfg.epsilon);
        break;
      case AnchorMethod::kRandom:
        anchors = select_anchors_random(X, k, sketch.seed);
        break;
      case AnchorMethod::kFps:
        anchors = select_anchors_fps(X, k, sketch.seed);
        break;
    }
    const double anchor_seconds = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const NystromPreconditioner precond =
        build_preconditioner(X, anchors, cfg.beta, cfg.epsilon, opts.fgt_delta);
    const double build_seconds = seconds_since(t1);

    report = pcg_solve(plan, cfg.beta, b, &precond, opts, energy);
    report.anchor_seconds = anchor_seconds;
    report.build_seconds = build_seconds;
    report.clip_count = precond.clip_count();
  } else {
    report = pcg_solve(plan, cfg.beta, b, nullptr, opts, energy);
  }
  return report;
}

Vector predict(const PointSet& X_train, const Vector& alpha, const PointSet& X_query,
               double epsilon, double fgt_delta) {
  if (alpha.size() != X_train.size()) {
    throw std::invalid_argument("predict: alpha length must equal training size");
  }
  const FgtPlan plan = build_fgt_plan(X_train, epsilon, fgt_delta);
  return plan.apply(X_query, alpha);
}

}  // namespace fastkrr
