/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "fastkrr/preconditioner.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "fastkrr/kernel.hpp"

namespace fastkrr {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows) {
  const auto r = static_cast<Index>(rows.size());
  const auto c = static_cast<Index>(rows.at(0).size());
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) m(i, j) = rows.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j)).get<double>();
  }
  return m;
}

}  // namespace

NystromPreconditioner build_preconditioner(const PointSet& X, const AnchorSet& S,
                                           double beta, double epsilon,
                                           double fgt_delta, FgtOptions fgt_options) {
  if (!(beta > 0.0)) throw std::invalid_argument("build_preconditioner: beta must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_preconditioner: epsilon must be positive");
  const Index k = S.rank();
  if (k < 1) throw std::invalid_argument("build_preconditioner: empty anchor set");
  std::set<Index> distinct(S.indices.begin(), S.indices.end());
  if (static_cast<Index>(distinct.size()) != k || *distinct.begin() < 0 ||
      *distinct.rbegin() >= X.size()) {
    throw std::invalid_argument("build_preconditioner: anchor indices must be distinct and in range");
  }

  NystromPreconditioner p;
  p.anchors_ = S;
  p.beta_ = beta;
  p.epsilon_ = epsilon;

  // K_SS is U^{-1}; dense evaluation since k is small.
  const Matrix k_ss = kernel_submatrix(X, S.indices, S.indices, epsilon);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(k_ss);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("build_preconditioner: eigendecomposition failed");
  }
  const double lambda_max = eig.eigenvalues().maxCoeff();
  if (!(lambda_max > 0.0)) throw DegenerateAnchorsError(static_cast<int>(k), k);
  const double tau =
      static_cast<double>(k) * std::numeric_limits<double>::epsilon() * lambda_max;
  Vector lambda = eig.eigenvalues();
  int clipped = 0;
  for (Index i = 0; i < k; ++i) {
    if (lambda[i] < tau) {
      lambda[i] = tau;
      ++clipped;
    }
  }
  if (clipped > k / 4) throw DegenerateAnchorsError(clipped, k);
  p.clip_count_ = clipped;
  p.u_half_ = eig.eigenvectors() *
              lambda.array().rsqrt().matrix().asDiagonal() *
              eig.eigenvectors().transpose();
  p.u_half_ = 0.5 * (p.u_half_ + p.u_half_.transpose()).eval();

  Matrix anchor_points(k, X.dim());
  for (Index i = 0; i < k; ++i) anchor_points.row(i) = X.points().row(S.indices[static_cast<std::size_t>(i)]);
  p.data_plan_ = std::make_shared<FgtPlan>(build_fgt_plan(X, epsilon, fgt_delta, fgt_options));
  p.anchor_plan_ = std::make_shared<FgtPlan>(
      build_fgt_plan(PointSet(std::move(anchor_points)), epsilon, fgt_delta, fgt_options));

  // M = beta I + U^{1/2} C^T C U^{1/2} via two kernel block products.
  const Matrix cu_half = p.anchor_plan_->apply(X, p.u_half_);           // n x k
  const Matrix ct_cu_half = p.data_plan_->apply(p.anchor_plan_->sources(), cu_half);  // k x k
  Matrix m = p.u_half_ * ct_cu_half;
  m = 0.5 * (m + m.transpose()).eval();
  m.diagonal().array() += beta;

  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "build_preconditioner: Cholesky breakdown (min diagonal " +
        std::to_string(m.diagonal().minCoeff()) + ", beta " + std::to_string(beta) + ")");
  }
  p.chol_factor_ = llt.matrixL();
  return p;
}

Vector NystromPreconditioner::apply(const Vector& x) const {
  Matrix x_block = x;
  return apply(x_block).col(0);
}

Matrix NystromPreconditioner::apply(const Matrix& x) const {
  if (x.rows() != data_plan_->sources().size()) {
    throw std::invalid_argument("preconditioner apply: length mismatch");
  }
  // y = U^{1/2} C^T x; solve F F^T z' = y; z = U^{1/2} z'; r = (x - C z) / beta.
  const Matrix ct_x = data_plan_->apply(anchor_plan_->sources(), x);
  const Matrix y = u_half_ * ct_x;
  Matrix z = chol_factor_.triangularView<Eigen::Lower>().solve(y);
  chol_factor_.transpose().triangularView<Eigen::Upper>().solveInPlace(z);
  z = (u_half_ * z).eval();
  const Matrix cz = anchor_plan_->apply(data_plan_->sources(), z);
  return (x - cz) / beta_;
}

void NystromPreconditioner::save(std::ostream& out) const {
  json doc;
  doc["format"] = "fastkrr-preconditioner";
  doc["version"] = 1;
  doc["epsilon"] = epsilon_;
  doc["beta"] = beta_;
  doc["clip_count"] = clip_count_;
  doc["fgt_delta"] = data_plan_->delta();
  doc["anchor_method"] = to_string(anchors_.method);
  doc["anchor_seed"] = anchors_.seed;
  doc["anchor_indices"] = anchors_.indices;
  doc["anchor_points"] = matrix_to_json(anchor_plan_->sources().points());
  doc["u_half"] = matrix_to_json(u_half_);
  doc["chol_factor"] = matrix_to_json(chol_factor_);
  out << doc.dump() << "\n";
}

void NystromPreconditioner::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save(out);
}

NystromPreconditioner NystromPreconditioner::load(std::istream& in, const PointSet& X,
                                                  FgtOptions fgt_options) {
  const json doc = json::parse(in);
  if (doc.at("format").get<std::string>() != "fastkrr-preconditioner" ||
      doc.at("version").get<int>() != 1) {
    throw std::runtime_error("preconditioner load: unrecognized format/version");
  }
  NystromPreconditioner p;
  p.epsilon_ = doc.at("epsilon").get<double>();
  p.beta_ = doc.at("beta").get<double>();
  p.clip_count_ = doc.at("clip_count").get<int>();
  p.anchors_.method = anchor_method_from_string(doc.at("anchor_method").get<std::string>());
  p.anchors_.seed = doc.at("anchor_seed").get<std::uint64_t>();
  p.anchors_.indices = doc.at("anchor_indices").get<std::vector<Index>>();
  Matrix anchor_points = matrix_from_json(doc.at("anchor_points"));
  p.u_half_ = matrix_from_json(doc.at("u_half"));
  p.chol_factor_ = matrix_from_json(doc.at("chol_factor"));

  for (std::size_t i = 0; i < p.anchors_.indices.size(); ++i) {
    const Index row = p.anchors_.indices[i];
    if (row < 0 || row >= X.size() ||
        (X.points().row(row) - anchor_points.row(static_cast<Index>(i))).cwiseAbs().maxCoeff() != 0.0) {
      throw std::invalid_argument("preconditioner load: dataset does not match stored anchors");
    }
  }
  const double fgt_delta = doc.at("fgt_delta").get<double>();
  p.data_plan_ = std::make_shared<FgtPlan>(build_fgt_plan(X, p.epsilon_, fgt_delta, fgt_options));
  p.anchor_plan_ = std::make_shared<FgtPlan>(
      build_fgt_plan(PointSet(std::move(anchor_points)), p.epsilon_, fgt_delta, fgt_options));
  return p;
}

NystromPreconditioner NystromPreconditioner::load_file(const std::string& path,
                                                       const PointSet& X,
                                                       FgtOptions fgt_options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return NystromPreconditioner::load(in, X, fgt_options);
}

}  // namespace fastkrr
