/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fastkrr/anchors.hpp"
#include "fastkrr/pcg.hpp"
#include "fastkrr/point_set.hpp"

namespace fastkrr {

/// One benchmark/solve configuration; every field has a CLI flag and a
/// key=value config-file entry (flag wins).
struct RunConfig {
  std::string dataset_path;
  std::string label_column = "phi";
  double epsilon = 1.0;
  double beta = 0.1;
  Index rank = 50;
  Index oversample = 60;
  AnchorMethod sampler = AnchorMethod::kId;
  PrecondKind preconditioner = PrecondKind::kNystrom;
  double rel_tol = 1e-6;
  int max_iters = 1000;
  double fgt_delta = 1e-8;
  std::uint64_t seed = 0;
  Index dense_cap = 20000;
  bool standardize = false;
  bool track_energy = false;
  /// Also estimate and bound the preconditioned condition number in the
  /// summary record.
  bool report_condition = false;
  std::string out_path;

  void validate() const;
};

/// Parses a flat key=value file into `cfg`; unknown keys are an error.
void load_run_config(const std::string& path, RunConfig& cfg);

struct BenchOutcome {
  int exit_code = 0;
  /// Summary per executed configuration (config_id -> iterations etc.).
  struct Summary {
    std::string config_id;
    int iterations = 0;
    bool converged = false;
    double build_seconds = 0.0;
    double solve_seconds = 0.0;
  };
  std::vector<Summary> summaries;
};

/// Runs the solve under each requested configuration (preconditioned and
/// plain CG when comparing) and streams JSONL: one record per iteration
/// plus a final summary record per configuration.
BenchOutcome run_benchmark(const RunConfig& cfg, std::ostream& log);

/// Single-configuration solve with the same JSONL logging.
BenchOutcome run_solve(const RunConfig& cfg, std::ostream& log);

struct BoundsReport {
  Vector box_lengths;
  double gamma = 0.0;
  std::int64_t rank_bound = 0;
  std::int64_t required_k = 0;
  bool required_k_exceeds_n = false;
  bool target_already_met = false;
  std::optional<Index> empirical_rank;  // dense path, when n <= dense_cap
};

/// Bounding box, gamma, required rank, and (under the dense cap) the
/// empirical numerical rank of the dataset's kernel matrix.
BoundsReport report_bounds(const PointSet& X, double epsilon, double beta, double xi,
                           Index dense_cap = 2000, double m_bar = 0.0);

void print_bounds_report(const BoundsReport& report, Index n, std::ostream& out);

}  // namespace fastkrr
