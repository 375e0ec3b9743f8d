/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "fastkrr/fgt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fastkrr/kernel.hpp"

namespace fastkrr {

namespace {

std::ptrdiff_t binomial(int top, int bottom) {
  // Exact for the small arguments used here (top <= ~70).
  double v = 1.0;
  bottom = std::min(bottom, top - bottom);
  for (int i = 1; i <= bottom; ++i) v = v * (top - bottom + i) / i;
  return static_cast<std::ptrdiff_t>(std::llround(v));
}

/// Per-unit-weight truncation error of an order-(p-1) Taylor expansion for
/// a cluster of scaled radius `a`, maximized over target distances in
/// [0, b_cut]: (2ab)^p / p! * exp(-(a-b)^2) at the worst admissible b.
double truncation_bound(int p, double a, double b_cut) {
  if (a <= 0.0) return 0.0;
  const double b_star = 0.5 * (a + std::sqrt(a * a + 2.0 * p));
  const double b = std::min(b_star, b_cut);
  if (b <= 0.0) return 0.0;
  const double log_bound =
      p * std::log(2.0 * a * b) - std::lgamma(p + 1.0) - (a - b) * (a - b);
  return std::exp(log_bound);
}

/// Smallest degree whose truncation bound meets `delta_unit`, or -1 with
/// the best achievable bound when the cap is exceeded.
int choose_degree(double a, double b_cut, double delta_unit, int max_degree,
                  double& best_bound) {
  best_bound = std::numeric_limits<double>::infinity();
  if (a <= 0.0) {
    best_bound = 0.0;
    return 0;
  }
  for (int p = 1; p <= max_degree + 1; ++p) {
    const double bound = truncation_bound(p, a, b_cut);
    best_bound = std::min(best_bound, bound);
    if (bound <= delta_unit) return p - 1;
  }
  return -1;
}

struct RadiusPlanEstimate {
  double cost = std::numeric_limits<double>::infinity();
  double rho = 0.5;
};

/// Rough work estimate for one candidate cluster-radius scale; only used
/// to pick rho, correctness never depends on it.
double estimate_cost(double rho, Index n, int d, const Vector& box_lengths,
                     double epsilon, double tail, double delta_unit, int max_degree,
                     Index max_clusters) {
  double best_bound = 0.0;
  const int degree = choose_degree(rho, rho + tail, delta_unit, max_degree, best_bound);
  if (degree < 0) return std::numeric_limits<double>::infinity();
  const double terms = static_cast<double>(binomial(degree + d, d));

  const double r = rho * epsilon;
  const double cell = 2.0 * r / std::sqrt(static_cast<double>(d));
  double clusters = 1.0;
  double frac = 1.0;
  const double r_cut = r + tail * epsilon;
  for (int i = 0; i < d; ++i) {
    const double q = box_lengths[i];
    clusters *= std::max(1.0, std::ceil(q / cell));
    frac *= std::min(1.0, 2.0 * r_cut / std::max(q, 1e-300));
  }
  clusters = std::min(clusters, static_cast<double>(std::min<Index>(n, max_clusters)));
  const double near = std::max(1.0, clusters * frac);
  const double nn = static_cast<double>(n);
  // clustering + coefficient accumulation + per-target scan and evaluation
  return nn * clusters + nn * terms + nn * (near * terms + 2.0 * clusters);
}

}  // namespace

MonomialTable make_monomial_table(int dim, int max_degree) {
  MonomialTable t;
  t.dim = dim;
  t.max_degree = max_degree;
  const std::ptrdiff_t total = binomial(max_degree + dim, dim);
  t.parent.resize(total);
  t.axis.resize(total);
  t.alpha_scale.resize(total);
  t.degree_offset.assign(static_cast<std::size_t>(max_degree) + 2, 0);

  // exponent of the generating axis, for the alpha_scale recurrence
  std::vector<std::int32_t> gen_count(total);
  t.parent[0] = 0;
  t.axis[0] = dim - 1;  // lets every axis extend the constant term
  t.alpha_scale[0] = 1.0;
  gen_count[0] = 0;
  t.degree_offset[1] = 1;

  std::vector<std::ptrdiff_t> heads(dim, 0);
  std::ptrdiff_t prev_end = 1;
  std::ptrdiff_t idx = 1;
  for (int m = 1; m <= max_degree; ++m) {
    std::vector<std::ptrdiff_t> new_heads(dim);
    for (int j = 0; j < dim; ++j) {
      new_heads[j] = idx;
      for (std::ptrdiff_t p = heads[j]; p < prev_end; ++p) {
        t.parent[idx] = static_cast<std::int32_t>(p);
        t.axis[idx] = j;
        const std::int32_t cnt = (t.axis[p] == j) ? gen_count[p] + 1 : 1;
        gen_count[idx] = cnt;
        t.alpha_scale[idx] = t.alpha_scale[p] * 2.0 / cnt;
        ++idx;
      }
    }
    heads = std::move(new_heads);
    prev_end = idx;
    t.degree_offset[static_cast<std::size_t>(m) + 1] = idx;
  }
  return t;
}

FgtPlan build_fgt_plan(const PointSet& sources, double epsilon, double delta,
                       FgtOptions options) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_fgt_plan: epsilon must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("build_fgt_plan: delta must be positive");

  FgtPlan plan{sources, epsilon, delta, options};
  const Matrix& X = plan.sources_.points();
  const Index n = X.rows();
  const int d = static_cast<int>(X.cols());

  plan.delta_unit_ = delta / (2.0 * static_cast<double>(n));
  plan.tail_scaled_ = std::sqrt(std::log(1.0 / plan.delta_unit_));

  double rho = options.radius_scale;
  if (rho <= 0.0) {
    RadiusPlanEstimate best;
    for (double cand : {0.15, 0.2, 0.3, 0.4, 0.5, 0.7, 1.0}) {
      const double cost =
          estimate_cost(cand, n, d, plan.sources_.bounding_box().lengths(), epsilon,
                        plan.tail_scaled_, plan.delta_unit_, options.max_degree,
                        options.max_clusters);
      if (cost < best.cost) best = {cost, cand};
    }
    rho = best.rho;
  }

  // Gonzalez farthest-point clustering down to radius rho * epsilon.
  const Index cap = std::min<Index>(n, options.max_clusters);
  const double target_r2 = (rho * epsilon) * (rho * epsilon);
  std::vector<std::int32_t> assign(static_cast<std::size_t>(n), 0);
  Vector dist2 = (X.rowwise() - X.row(0)).rowwise().squaredNorm();
  std::vector<Index> center_rows{0};
  while (static_cast<Index>(center_rows.size()) < cap) {
    Index far = 0;
    const double worst = dist2.maxCoeff(&far);
    if (worst <= target_r2) break;
    const auto c = static_cast<std::int32_t>(center_rows.size());
    center_rows.push_back(far);
    for (Index i = 0; i < n; ++i) {
      const double d2 = (X.row(i) - X.row(far)).squaredNorm();
      if (d2 < dist2[i]) {
        dist2[i] = d2;
        assign[static_cast<std::size_t>(i)] = c;
      }
    }
  }

  const auto num_clusters = static_cast<Index>(center_rows.size());
  plan.centers_.resize(num_clusters, d);
  for (Index c = 0; c < num_clusters; ++c) plan.centers_.row(c) = X.row(center_rows[static_cast<std::size_t>(c)]);
  plan.cluster_of_ = assign;
  plan.members_.assign(static_cast<std::size_t>(num_clusters), {});
  for (Index i = 0; i < n; ++i) {
    plan.members_[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])].push_back(
        static_cast<std::int32_t>(i));
  }

  plan.cluster_radius_scaled_.assign(static_cast<std::size_t>(num_clusters), 0.0);
  for (Index i = 0; i < n; ++i) {
    auto& r = plan.cluster_radius_scaled_[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    r = std::max(r, std::sqrt(dist2[i]) / epsilon);
  }

  // Truncation degree per cluster from the rigorous bound.
  plan.cluster_degree_.assign(static_cast<std::size_t>(num_clusters), 0);
  double worst_achievable = 0.0;
  bool attainable = true;
  for (Index c = 0; c < num_clusters; ++c) {
    const double a = plan.cluster_radius_scaled_[static_cast<std::size_t>(c)];
    double best_bound = 0.0;
    const int degree = choose_degree(a, a + plan.tail_scaled_, plan.delta_unit_,
                                     options.max_degree, best_bound);
    if (degree < 0) {
      attainable = false;
      worst_achievable = std::max(worst_achievable, best_bound);
    } else {
      plan.cluster_degree_[static_cast<std::size_t>(c)] = degree;
    }
  }
  if (!attainable) {
    throw PrecisionUnattainableError(delta,
                                     worst_achievable * 2.0 * static_cast<double>(n));
  }

  plan.max_degree_ = *std::max_element(plan.cluster_degree_.begin(), plan.cluster_degree_.end());
  plan.table_ = make_monomial_table(d, plan.max_degree_);

  plan.coeff_offset_.assign(static_cast<std::size_t>(num_clusters) + 1, 0);
  for (Index c = 0; c < num_clusters; ++c) {
    plan.coeff_offset_[static_cast<std::size_t>(c) + 1] =
        plan.coeff_offset_[static_cast<std::size_t>(c)] +
        plan.table_.terms_for_degree(plan.cluster_degree_[static_cast<std::size_t>(c)]);
  }
  plan.total_terms_ = plan.coeff_offset_.back();

  plan.scaled_diff_.resize(n, d);
  plan.source_gauss_.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto c = assign[static_cast<std::size_t>(i)];
    plan.scaled_diff_.row(i) = (X.row(i) - plan.centers_.row(c)) / epsilon;
    const double a2 = plan.scaled_diff_.row(i).squaredNorm();
    plan.source_gauss_[i] = a2 > kExpUnderflow ? 0.0 : std::exp(-a2);
  }

  // Path-choice statistics: coefficient work plus in-range term count per
  // target, measured with the sources as proxy targets.
  for (Index c = 0; c < num_clusters; ++c) {
    plan.coeff_work_ += static_cast<double>(plan.members_[static_cast<std::size_t>(c)].size()) *
                        static_cast<double>(plan.coeff_offset_[static_cast<std::size_t>(c) + 1] -
                                            plan.coeff_offset_[static_cast<std::size_t>(c)]);
  }
  double eval_terms = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < num_clusters; ++c) {
      const double b2 = (X.row(i) - plan.centers_.row(c)).squaredNorm() / (epsilon * epsilon);
      const double reach = plan.cluster_radius_scaled_[static_cast<std::size_t>(c)] + plan.tail_scaled_;
      if (b2 <= reach * reach && b2 <= kExpUnderflow) {
        eval_terms += static_cast<double>(plan.coeff_offset_[static_cast<std::size_t>(c) + 1] -
                                          plan.coeff_offset_[static_cast<std::size_t>(c)]);
      }
    }
  }
  plan.eval_terms_per_target_ = eval_terms / static_cast<double>(n);
  return plan;
}

bool FgtPlan::use_expansion(Index num_targets) const {
  switch (options_.path) {
    case FgtPath::kExpansion:
      return true;
    case FgtPath::kDirect:
      return false;
    case FgtPath::kAuto:
      break;
  }
  return expansion_profitable(num_targets);
}

bool FgtPlan::expansion_profitable(Index num_targets) const {
  const double m = static_cast<double>(num_targets);
  const double fast =
      coeff_work_ + m * (eval_terms_per_target_ + 2.0 * static_cast<double>(num_clusters()));
  const double direct = m * static_cast<double>(sources_.size()) *
                        (static_cast<double>(sources_.dim()) + 6.0);
  return fast < direct;
}

void FgtPlan::apply_direct(const Matrix& targets, const Matrix& weights, Matrix& out) const {
  const Matrix& X = sources_.points();
  const double inv_eps2 = 1.0 / (epsilon_ * epsilon_);
  for (Index j = 0; j < targets.rows(); ++j) {
    for (Index i = 0; i < X.rows(); ++i) {
      const double t = (targets.row(j) - X.row(i)).squaredNorm() * inv_eps2;
      if (t > kExpUnderflow) continue;
      out.row(j) += std::exp(-t) * weights.row(i);
    }
  }
}

void FgtPlan::adjoint_direct(const Matrix& targets, const Matrix& weights, Matrix& out) const {
  const Matrix& X = sources_.points();
  const double inv_eps2 = 1.0 / (epsilon_ * epsilon_);
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < targets.rows(); ++j) {
      const double t = (targets.row(j) - X.row(i)).squaredNorm() * inv_eps2;
      if (t > kExpUnderflow) continue;
      out.row(i) += std::exp(-t) * weights.row(j);
    }
  }
}

void FgtPlan::apply_expansion(const Matrix& targets, const Matrix& weights, Matrix& out) const {
  const Index num_cl = num_clusters();
  const int d = static_cast<int>(sources_.dim());
  std::vector<double> mono(static_cast<std::size_t>(table_.terms_for_degree(max_degree_)));
  std::vector<double> coeffs(static_cast<std::size_t>(total_terms_));
  std::vector<double> z(static_cast<std::size_t>(d));

  for (Index col = 0; col < weights.cols(); ++col) {
    std::fill(coeffs.begin(), coeffs.end(), 0.0);
    // Source pass: per-cluster Taylor coefficients of this weight column.
    for (Index c = 0; c < num_cl; ++c) {
      const std::ptrdiff_t off = coeff_offset_[static_cast<std::size_t>(c)];
      const std::ptrdiff_t terms = coeff_offset_[static_cast<std::size_t>(c) + 1] - off;
      for (const std::int32_t i : members_[static_cast<std::size_t>(c)]) {
        const double w = source_gauss_[i] * weights(i, col);
        if (w == 0.0) continue;
        for (int a = 0; a < d; ++a) z[static_cast<std::size_t>(a)] = scaled_diff_(i, a);
        table_.eval(z.data(), mono.data(), terms);
        double* cptr = coeffs.data() + off;
        for (std::ptrdiff_t t = 0; t < terms; ++t) cptr[t] += w * mono[static_cast<std::size_t>(t)];
      }
      double* cptr = coeffs.data() + off;
      for (std::ptrdiff_t t = 0; t < terms; ++t) cptr[t] *= table_.alpha_scale[static_cast<std::size_t>(t)];
    }
    // Target pass.
    for (Index j = 0; j < targets.rows(); ++j) {
      double acc = 0.0;
      for (Index c = 0; c < num_cl; ++c) {
        double b2 = 0.0;
        for (int a = 0; a < d; ++a) {
          const double v = (targets(j, a) - centers_(c, a)) / epsilon_;
          z[static_cast<std::size_t>(a)] = v;
          b2 += v * v;
        }
        const double reach = cluster_radius_scaled_[static_cast<std::size_t>(c)] + tail_scaled_;
        if (b2 > reach * reach || b2 > kExpUnderflow) continue;
        const std::ptrdiff_t off = coeff_offset_[static_cast<std::size_t>(c)];
        const std::ptrdiff_t terms = coeff_offset_[static_cast<std::size_t>(c) + 1] - off;
        table_.eval(z.data(), mono.data(), terms);
        const double* cptr = coeffs.data() + off;
        double dot = 0.0;
        for (std::ptrdiff_t t = 0; t < terms; ++t) dot += cptr[t] * mono[static_cast<std::size_t>(t)];
        acc += std::exp(-b2) * dot;
      }
      out(j, col) = acc;
    }
  }
}

void FgtPlan::adjoint_expansion(const Matrix& targets, const Matrix& weights, Matrix& out) const {
  const Index num_cl = num_clusters();
  const int d = static_cast<int>(sources_.dim());
  std::vector<double> mono(static_cast<std::size_t>(table_.terms_for_degree(max_degree_)));
  std::vector<double> coeffs(static_cast<std::size_t>(total_terms_));
  std::vector<double> z(static_cast<std::size_t>(d));

  for (Index col = 0; col < weights.cols(); ++col) {
    std::fill(coeffs.begin(), coeffs.end(), 0.0);
    // Gather pass: coefficients accumulated from the weighted targets.
    for (Index j = 0; j < targets.rows(); ++j) {
      if (weights(j, col) == 0.0) continue;
      for (Index c = 0; c < num_cl; ++c) {
        double b2 = 0.0;
        for (int a = 0; a < d; ++a) {
          const double v = (targets(j, a) - centers_(c, a)) / epsilon_;
          z[static_cast<std::size_t>(a)] = v;
          b2 += v * v;
        }
        const double reach = cluster_radius_scaled_[static_cast<std::size_t>(c)] + tail_scaled_;
        if (b2 > reach * reach || b2 > kExpUnderflow) continue;
        const double g = std::exp(-b2) * weights(j, col);
        const std::ptrdiff_t off = coeff_offset_[static_cast<std::size_t>(c)];
        const std::ptrdiff_t terms = coeff_offset_[static_cast<std::size_t>(c) + 1] - off;
        table_.eval(z.data(), mono.data(), terms);
        double* cptr = coeffs.data() + off;
        for (std::ptrdiff_t t = 0; t < terms; ++t) cptr[t] += g * mono[static_cast<std::size_t>(t)];
      }
    }
    for (Index c = 0; c < num_cl; ++c) {
      double* cptr = coeffs.data() + coeff_offset_[static_cast<std::size_t>(c)];
      const std::ptrdiff_t terms = coeff_offset_[static_cast<std::size_t>(c) + 1] -
                                   coeff_offset_[static_cast<std::size_t>(c)];
      for (std::ptrdiff_t t = 0; t < terms; ++t) cptr[t] *= table_.alpha_scale[static_cast<std::size_t>(t)];
    }
    // Scatter pass: evaluate at each source against its own cluster.
    for (Index c = 0; c < num_cl; ++c) {
      const std::ptrdiff_t off = coeff_offset_[static_cast<std::size_t>(c)];
      const std::ptrdiff_t terms = coeff_offset_[static_cast<std::size_t>(c) + 1] - off;
      const double* cptr = coeffs.data() + off;
      for (const std::int32_t i : members_[static_cast<std::size_t>(c)]) {
        for (int a = 0; a < d; ++a) z[static_cast<std::size_t>(a)] = scaled_diff_(i, a);
        table_.eval(z.data(), mono.data(), terms);
        double dot = 0.0;
        for (std::ptrdiff_t t = 0; t < terms; ++t) dot += cptr[t] * mono[static_cast<std::size_t>(t)];
        out(i, col) = source_gauss_[i] * dot;
      }
    }
  }
}

Vector FgtPlan::apply(const PointSet& targets, const Vector& weights) const {
  Matrix w = weights;
  return apply(targets, w).col(0);
}

Matrix FgtPlan::apply(const PointSet& targets, const Matrix& weights) const {
  if (targets.dim() != sources_.dim()) {
    throw std::invalid_argument("fgt_apply: target dimension mismatch");
  }
  if (weights.rows() != sources_.size()) {
    throw std::invalid_argument("fgt_apply: weight length must equal source count");
  }
  Matrix out = Matrix::Zero(targets.size(), weights.cols());
  if (use_expansion(targets.size())) {
    apply_expansion(targets.points(), weights, out);
  } else {
    apply_direct(targets.points(), weights, out);
  }
  return out;
}

Vector FgtPlan::apply_adjoint(const PointSet& targets, const Vector& weights) const {
  Matrix w = weights;
  return apply_adjoint(targets, w).col(0);
}

Matrix FgtPlan::apply_adjoint(const PointSet& targets, const Matrix& weights) const {
  if (targets.dim() != sources_.dim()) {
    throw std::invalid_argument("fgt_apply_adjoint: target dimension mismatch");
  }
  if (weights.rows() != targets.size()) {
    throw std::invalid_argument("fgt_apply_adjoint: weight length must equal target count");
  }
  Matrix out = Matrix::Zero(sources_.size(), weights.cols());
  if (use_expansion(targets.size())) {
    adjoint_expansion(targets.points(), weights, out);
  } else {
    adjoint_direct(targets.points(), weights, out);
  }
  return out;
}

Vector fgt_apply(const FgtPlan& plan, const PointSet& targets, const Vector& weights) {
  return plan.apply(targets, weights);
}

Matrix fgt_apply(const FgtPlan& plan, const PointSet& targets, const Matrix& weights) {
  return plan.apply(targets, weights);
}

Vector fgt_apply_adjoint(const FgtPlan& plan, const PointSet& targets, const Vector& weights) {
  return plan.apply_adjoint(targets, weights);
}

Matrix fgt_apply_adjoint(const FgtPlan& plan, const PointSet& targets, const Matrix& weights) {
  return plan.apply_adjoint(targets, weights);
}

}  // namespace fastkrr
