/*
 Copyright 2026 The adpdock Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "adpdock/matops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace adpdock {

RankDeficientError::RankDeficientError(Index rank, Index required)
    : Error("rank deficient: rank " + std::to_string(rank) + " of required " +
            std::to_string(required)),
      rank_(rank),
      required_(required) {}

SymVector::SymVector(Index d, Vector e) : dim(d), entries(std::move(e)) {
  if (entries.size() != triangular_size(dim)) {
    throw std::invalid_argument("SymVector length must be dim*(dim+1)/2");
  }
}

QuadVector::QuadVector(Index d, Vector e) : dim(d), entries(std::move(e)) {
  if (entries.size() != triangular_size(dim)) {
    throw std::invalid_argument("QuadVector length must be dim*(dim+1)/2");
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector vec(const Matrix& a) { return a.reshaped(); }

Matrix unvec(const Eigen::Ref<const Vector>& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw std::invalid_argument("unvec: length does not match rows*cols");
  }
  return v.reshaped(rows, cols);
}

Matrix symmetrized(const Matrix& p, double tolerance) {
  if (p.rows() != p.cols()) {
    throw std::invalid_argument("expected a square matrix");
  }
  const double scale = std::max(1.0, max_abs(p));
  if (max_abs(p - p.transpose()) > tolerance * scale) {
    throw std::invalid_argument("matrix is not symmetric within tolerance");
  }
  return 0.5 * (p + p.transpose());
}

SymVector vecs(const Matrix& p, double tolerance) {
  const Matrix s = symmetrized(p, tolerance);
  const Index n = s.rows();
  Vector out(triangular_size(n));
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    out(k++) = s(i, i);
    for (Index j = i + 1; j < n; ++j) out(k++) = 2.0 * s(i, j);
  }
  return {n, std::move(out)};
}

Matrix unvecs(const Eigen::Ref<const Vector>& entries, Index dim) {
  if (entries.size() != triangular_size(dim)) {
    throw std::invalid_argument("unvecs: length must be dim*(dim+1)/2");
  }
  Matrix out(dim, dim);
  Index k = 0;
  for (Index i = 0; i < dim; ++i) {
    out(i, i) = entries(k++);
    for (Index j = i + 1; j < dim; ++j) {
      out(i, j) = out(j, i) = 0.5 * entries(k++);
    }
  }
  return out;
}

Matrix unvecs(const SymVector& s) { return unvecs(s.entries, s.dim); }

QuadVector vecv(const Eigen::Ref<const Vector>& v) {
  const Index n = v.size();
  Vector out(triangular_size(n));
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) out(k++) = v(i) * v(j);
  }
  return {n, std::move(out)};
}

Matrix bdiag(std::span<const Matrix> blocks) {
  if (blocks.empty()) {
    throw std::invalid_argument("bdiag: empty block list");
  }
  Index rows = 0;
  Index cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Index r = 0;
  Index c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

Matrix bdiag(std::initializer_list<Matrix> blocks) {
  return bdiag(std::span<const Matrix>(blocks.begin(), blocks.size()));
}

double rank_threshold(const Vector& singular_values, Index rows, Index cols) {
  const double smax = singular_values.size() > 0 ? singular_values.maxCoeff() : 0.0;
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * smax;
}

namespace {

Index rank_from_singular_values(const Vector& sv, Index rows, Index cols) {
  if (sv.size() == 0 || sv.maxCoeff() == 0.0) return 0;
  const double tol = rank_threshold(sv, rows, cols);
  return static_cast<Index>((sv.array() > tol).count());
}

}  // namespace

Index numerical_rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(a);
  return rank_from_singular_values(svd.singularValues(), a.rows(), a.cols());
}

LeastSquaresResult lstsq(const Matrix& theta, const Matrix& rhs) {
  if (theta.rows() != rhs.rows()) {
    throw std::invalid_argument("lstsq: row count mismatch");
  }
  Eigen::BDCSVD<Matrix> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index rank = rank_from_singular_values(svd.singularValues(), theta.rows(), theta.cols());
  if (rank < theta.cols()) {
    throw RankDeficientError(rank, theta.cols());
  }
  LeastSquaresResult out;
  out.solution = svd.solve(rhs);
  out.residual_norm = (theta * out.solution - rhs).norm();
  out.rank = rank;
  return out;
}

AffineSet solve_affine(const Matrix& m, const Vector& b) {
  if (m.rows() != b.size()) {
    throw std::invalid_argument("solve_affine: row count mismatch");
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const Index rank = rank_from_singular_values(sv, m.rows(), m.cols());
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();

  Vector coeffs = u.leftCols(rank).transpose() * b;
  for (Index i = 0; i < rank; ++i) coeffs(i) /= sv(i);

  AffineSet out;
  out.particular = v.leftCols(rank) * coeffs;
  out.null_basis = v.rightCols(m.cols() - rank);
  out.residual = (m * out.particular - b).norm();
  return out;
}

double spectral_abscissa(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("spectral_abscissa: square matrix required");
  }
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& a, double margin) {
  if (!all_finite(a)) return false;
  return spectral_abscissa(a) < -margin;
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace adpdock
