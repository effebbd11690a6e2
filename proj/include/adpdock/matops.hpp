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

#pragma once

#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace adpdock {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a least-squares problem (or a regression matrix) lacks full
/// column rank. Carries the numerical rank that was found.
class RankDeficientError : public Error {
 public:
  RankDeficientError(Index rank, Index required);
  Index rank() const { return rank_; }
  Index required() const { return required_; }

 private:
  Index rank_;
  Index required_;
};

/// Upper-triangular scan of a symmetric matrix with doubled off-diagonals:
/// [p11, 2p12, ..., 2p1m, p22, 2p23, ..., pmm].
struct SymVector {
  Index dim = 0;
  Vector entries;

  SymVector() = default;
  SymVector(Index dim, Vector entries);
};

/// Ordered pairwise products [v1^2, v1v2, ..., v1vn, v2^2, ..., vn^2].
struct QuadVector {
  Index dim = 0;
  Vector entries;

  QuadVector() = default;
  QuadVector(Index dim, Vector entries);
};

constexpr Index triangular_size(Index n) { return n * (n + 1) / 2; }

Matrix kron(const Matrix& a, const Matrix& b);

/// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& a);
Matrix unvec(const Eigen::Ref<const Vector>& v, Index rows, Index cols);

inline constexpr double kSymmetryTolerance = 1e-10;

/// Throws std::invalid_argument when p is asymmetric beyond tolerance
/// (relative to max(1, max|p_ij|)); otherwise averages p with its transpose.
Matrix symmetrized(const Matrix& p, double tolerance = kSymmetryTolerance);

SymVector vecs(const Matrix& p, double tolerance = kSymmetryTolerance);
/// Inverse of vecs: off-diagonal entries are halved.
Matrix unvecs(const SymVector& s);
Matrix unvecs(const Eigen::Ref<const Vector>& entries, Index dim);

QuadVector vecv(const Eigen::Ref<const Vector>& v);

Matrix bdiag(std::span<const Matrix> blocks);
Matrix bdiag(std::initializer_list<Matrix> blocks);

/// Singular-value threshold max(rows, cols) * eps * sigma_max.
double rank_threshold(const Vector& singular_values, Index rows, Index cols);
Index numerical_rank(const Matrix& a);

struct LeastSquaresResult {
  Matrix solution;
  double residual_norm = 0.0;
  Index rank = 0;
};

/// Minimum-residual solution of theta * X = rhs. Requires full column rank;
/// otherwise throws RankDeficientError with the computed rank.
LeastSquaresResult lstsq(const Matrix& theta, const Matrix& rhs);

/// Solution set {particular + null_basis * y} of m * z = b. When the system is
/// inconsistent, `particular` is the minimum-norm least-squares point and
/// `residual` is |m * particular - b|.
struct AffineSet {
  Vector particular;
  Matrix null_basis;
  double residual = 0.0;
};

AffineSet solve_affine(const Matrix& m, const Vector& b);

bool is_hurwitz(const Matrix& a, double margin = 0.0);
/// Largest real part over the spectrum of a.
double spectral_abscissa(const Matrix& a);

inline double frobenius(const Matrix& a) { return a.norm(); }
inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }
bool all_finite(const Matrix& a);

}  // namespace adpdock
