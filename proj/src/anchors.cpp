/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "fastkrr/anchors.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>

#include "fastkrr/fgt.hpp"
#include "fastkrr/rng.hpp"

namespace fastkrr {

std::string to_string(AnchorMethod method) {
  switch (method) {
    case AnchorMethod::kId: return "id";
    case AnchorMethod::kRandom: return "random";
    case AnchorMethod::kFps: return "fps";
  }
  return "id";
}

AnchorMethod anchor_method_from_string(const std::string& name) {
  if (name == "id") return AnchorMethod::kId;
  if (name == "random") return AnchorMethod::kRandom;
  if (name == "fps") return AnchorMethod::kFps;
  throw std::invalid_argument("unknown sampler '" + name + "' (expected id|random|fps)");
}

AnchorSet select_anchors_id(const PointSet& X, Index k, const SketchConfig& cfg,
                            double epsilon) {
  const Index n = X.size();
  if (k < 1 || k > cfg.l || cfg.l > n) {
    throw std::invalid_argument("select_anchors_id: need 1 <= k <= l <= n");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("select_anchors_id: epsilon must be positive");

  // Sketch Y = Omega K, computed as K Omega^T by symmetry of K.
  Rng rng(cfg.seed);
  Matrix omega_t(n, cfg.l);
  for (Index i = 0; i < n; ++i) {
    for (Index r = 0; r < cfg.l; ++r) omega_t(i, r) = rng.normal();
  }
  const FgtPlan plan = build_fgt_plan(X, epsilon, cfg.fgt_delta);
  const Matrix sketch_t = plan.apply(X, omega_t);  // n x l

  // Column-pivoted QR on the l x n sketch; pivot order ranks data points.
  Eigen::ColPivHouseholderQR<Matrix> qr(sketch_t.transpose());
  const Matrix& qr_matrix = qr.matrixQR();
  const Index diag = std::min<Index>(cfg.l, n);
  const double pivot_floor =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
      std::abs(qr_matrix(0, 0));
  Index usable = 0;
  while (usable < diag && std::abs(qr_matrix(usable, usable)) > pivot_floor) ++usable;
  if (usable < k) throw SketchRankDeficientError(usable, k);

  AnchorSet result;
  result.method = AnchorMethod::kId;
  result.seed = cfg.seed;
  result.indices.reserve(static_cast<std::size_t>(k));
  const auto& perm = qr.colsPermutation().indices();
  for (Index i = 0; i < k; ++i) result.indices.push_back(static_cast<Index>(perm[i]));
  return result;
}

AnchorSet select_anchors_random(const PointSet& X, Index k, std::uint64_t seed) {
  if (k < 1 || k > X.size()) {
    throw std::invalid_argument("select_anchors_random: need 1 <= k <= n");
  }
  Rng rng(seed);
  AnchorSet result;
  result.method = AnchorMethod::kRandom;
  result.seed = seed;
  result.indices = rng.sample_without_replacement(X.size(), k);
  return result;
}

AnchorSet select_anchors_fps(const PointSet& X, Index k, std::uint64_t seed) {
  const Index n = X.size();
  if (k < 1 || k > n) throw std::invalid_argument("select_anchors_fps: need 1 <= k <= n");
  Rng rng(seed);
  const auto start = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));

  AnchorSet result;
  result.method = AnchorMethod::kFps;
  result.seed = seed;
  result.indices.reserve(static_cast<std::size_t>(k));
  result.indices.push_back(start);

  const Matrix& P = X.points();
  Vector dist2 = (P.rowwise() - P.row(start)).rowwise().squaredNorm();
  for (Index step = 1; step < k; ++step) {
    Index best = 0;
    for (Index i = 1; i < n; ++i) {
      if (dist2[i] > dist2[best]) best = i;  // ties stay at the lowest index
    }
    result.indices.push_back(best);
    for (Index i = 0; i < n; ++i) {
      const double d2 = (P.row(i) - P.row(best)).squaredNorm();
      if (d2 < dist2[i]) dist2[i] = d2;
    }
  }
  return result;
}

}  // namespace fastkrr
