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

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "adpdock/matops.hpp"
#include "adpdock/sysmodels.hpp"
#include "support/fixtures.hpp"

namespace adpdock {
namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;
using testing::Rng;

TEST(Kron, RowTimesColumn) {
  Matrix a(1, 2);
  a << 1, 2;
  Matrix b(2, 1);
  b << 3, 4;
  Matrix expected(2, 2);
  expected << 3, 6, 4, 8;
  EXPECT_TRUE(kron(a, b).isApprox(expected));
}

TEST(Kron, IdentityGivesBlockDiagonal) {
  Rng rng(1);
  const Matrix m = rng.matrix(2, 3);
  EXPECT_EQ(kron(Matrix::Identity(2, 2), m), bdiag({m, m}));
}

TEST(Kron, VecIdentity) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = rng.matrix(3, 3);
    const Matrix x = rng.matrix(3, 3);
    const Matrix b = rng.matrix(3, 3);
    const Vector lhs = vec(a * x * b);
    const Vector rhs = kron(b.transpose(), a) * vec(x);
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * (1.0 + lhs.norm()));
  }
}

TEST(Kron, VecIdentityRectangular) {
  Rng rng(3);
  const Matrix a = rng.matrix(2, 4);
  const Matrix x = rng.matrix(4, 3);
  const Matrix b = rng.matrix(3, 5);
  const Vector lhs = vec(a * x * b);
  EXPECT_LE((lhs - kron(b.transpose(), a) * vec(x)).norm(), 1e-12 * (1.0 + lhs.norm()));
}

TEST(Kron, MixedProductAndAssociativity) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = rng.matrix(2, 3);
    const Matrix b = rng.matrix(3, 2);
    const Matrix c = rng.matrix(3, 2);
    const Matrix d = rng.matrix(2, 4);
    const Matrix lhs = kron(a, b) * kron(c, d);
    const Matrix rhs = kron(a * c, b * d);
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * (1.0 + lhs.norm()));

    const Matrix e = rng.matrix(2, 2);
    const Matrix left = kron(kron(a, b), e);
    EXPECT_LE((left - kron(a, kron(b, e))).norm(), 1e-12 * (1.0 + left.norm()));
  }
}

TEST(Vec, RoundTrip) {
  Rng rng(5);
  const Matrix a = rng.matrix(4, 3);
  const Vector v = vec(a);
  EXPECT_EQ(v(1), a(1, 0));
  EXPECT_EQ(v(4), a(0, 1));
  EXPECT_EQ(unvec(v, 4, 3), a);
  EXPECT_THROW(unvec(v, 5, 3), std::invalid_argument);
}

TEST(Vecs, TwoByTwo) {
  Matrix p(2, 2);
  p << 1, 2, 2, 3;
  const SymVector s = vecs(p);
  EXPECT_EQ(s.dim, 2);
  EXPECT_EQ(s.entries, (Vector(3) << 1, 4, 3).finished());
  EXPECT_EQ(vecs(Matrix::Identity(2, 2)).entries, (Vector(3) << 1, 0, 1).finished());
}

TEST(Vecs, RowScanOrder) {
  Matrix p(3, 3);
  p << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  EXPECT_EQ(vecs(p).entries, (Vector(6) << 1, 4, 6, 4, 10, 6).finished());
}

TEST(Vecs, RejectsAsymmetry) {
  Matrix p(2, 2);
  p << 1, 2, 2.1, 3;
  EXPECT_THROW(vecs(p), std::invalid_argument);
  EXPECT_THROW(vecs(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST(Vecs, AveragesRoundoffAsymmetry) {
  Matrix p(2, 2);
  p << 1, 2, 2 + 1e-13, 3;
  EXPECT_NEAR(vecs(p).entries(1), 4.0 + 1e-13, 1e-15);
}

TEST(Vecs, UnvecsInverts) {
  Rng rng(6);
  const Matrix p = rng.symmetric(5);
  EXPECT_LE((unvecs(vecs(p)) - p).norm(), 1e-15);
  EXPECT_THROW(unvecs(Vector::Zero(5), 3), std::invalid_argument);
}

TEST(SymVector, LengthIsChecked) {
  EXPECT_THROW(SymVector(3, Vector::Zero(5)), std::invalid_argument);
  EXPECT_THROW(QuadVector(2, Vector::Zero(4)), std::invalid_argument);
  EXPECT_NO_THROW(SymVector(3, Vector::Zero(6)));
}

TEST(Vecv, Definition) {
  const double a = 1.5;
  const double b = -2.0;
  EXPECT_EQ(vecv(Vector2d(a, b)).entries, Vector3d(a * a, a * b, b * b));
  EXPECT_EQ(vecv(Vector3d(1, 0, 0)).entries, (Vector(6) << 1, 0, 0, 0, 0, 0).finished());
}

TEST(Vecv, QuadraticFormIdentity) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = rng.integer(1, 6);
    const Matrix p = rng.symmetric(n);
    const Vector x = rng.vector(n);
    const double quad = x.dot(p * x);
    const double packed = vecs(p).entries.dot(vecv(x).entries);
    EXPECT_LE(std::abs(quad - packed), 1e-12 * std::max(1.0, std::abs(quad)));
  }
}

TEST(Bdiag, ExosystemMatrix) {
  std::vector<Matrix> blocks;
  for (double w : {0.1, 0.2, 0.3, 0.4}) blocks.push_back(rotation_generator(w));
  const Matrix e = bdiag(blocks);
  ASSERT_EQ(e.rows(), 8);
  ASSERT_EQ(e.cols(), 8);
  for (Index k = 0; k < 4; ++k) {
    const double w = 0.1 * static_cast<double>(k + 1);
    EXPECT_DOUBLE_EQ(e(2 * k, 2 * k + 1), w);
    EXPECT_DOUBLE_EQ(e(2 * k + 1, 2 * k), -w);
  }
  EXPECT_DOUBLE_EQ(e.cwiseAbs().sum(), 2.0 * (0.1 + 0.2 + 0.3 + 0.4));
}

TEST(Bdiag, SingleBlockAndEmpty) {
  Rng rng(8);
  const Matrix m = rng.matrix(2, 3);
  EXPECT_EQ(bdiag({m}), m);
  EXPECT_THROW(bdiag(std::span<const Matrix>{}), std::invalid_argument);
}

TEST(Bdiag, SpectrumIsUnionOfBlocks) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix b1 = rng.matrix(2, 2);
    const Matrix b2 = rng.matrix(2, 2);
    const Eigen::VectorXcd all = Eigen::EigenSolver<Matrix>(bdiag({b1, b2})).eigenvalues();
    Eigen::VectorXcd parts(4);
    parts << Eigen::EigenSolver<Matrix>(b1).eigenvalues(), Eigen::EigenSolver<Matrix>(b2).eigenvalues();
    for (Index i = 0; i < parts.size(); ++i) {
      double best = 1e300;
      for (Index j = 0; j < all.size(); ++j) best = std::min(best, std::abs(parts(i) - all(j)));
      EXPECT_LE(best, 1e-10);
    }
  }
}

TEST(Lstsq, SquareInvertible) {
  Rng rng(10);
  const Matrix a = rng.matrix(4, 4) + 4.0 * Matrix::Identity(4, 4);
  const Vector x = rng.vector(4);
  const LeastSquaresResult r = lstsq(a, a * x);
  EXPECT_LE((r.solution - x).norm(), 1e-12);
  EXPECT_LE(r.residual_norm, 1e-10);
  EXPECT_EQ(r.rank, 4);
}

TEST(Lstsq, DuplicatedRowsMatchNormalEquations) {
  Rng rng(11);
  const Matrix theta = rng.matrix(6, 3);
  const Vector x = rng.vector(3);
  Matrix doubled(12, 3);
  doubled << theta, theta;
  Vector rhs(12);
  rhs << theta * x, theta * x;
  const Vector normal = (doubled.transpose() * doubled).ldlt().solve(doubled.transpose() * rhs);
  EXPECT_LE((lstsq(doubled, rhs).solution - normal).norm(), 1e-10);
  EXPECT_LE((lstsq(theta, theta * x).solution - x).norm(), 1e-12);
}

TEST(Lstsq, InconsistentTwoVariableMatchesGridSearch) {
  Matrix theta(4, 2);
  theta << 1, 0, 0, 1, 1, 1, 1, -1;
  const Vector rhs = (Vector(4) << 1, 2, 0, 4).finished();
  const LeastSquaresResult r = lstsq(theta, rhs);

  double best = 1e300;
  for (int i = -400; i <= 400; ++i) {
    for (int j = -400; j <= 400; ++j) {
      const Vector2d z(0.005 * i, 0.005 * j);
      best = std::min(best, (theta * z - rhs).norm());
    }
  }
  EXPECT_LE(r.residual_norm, best + 1e-12);
  EXPECT_NEAR(r.residual_norm, best, 1e-4);
}

TEST(Lstsq, NormalEquationsProperty) {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const Index cols = rng.integer(1, 8);
    const Index rows = cols + rng.integer(0, 10);
    const Matrix theta = rng.matrix(rows, cols);
    const Matrix rhs = rng.matrix(rows, 2);
    const Matrix x = lstsq(theta, rhs).solution;
    const Matrix lhs = theta.transpose() * theta * x;
    const Matrix expect = theta.transpose() * rhs;
    EXPECT_LE((lhs - expect).norm(), 1e-8 * (1.0 + expect.norm()));
  }
}

TEST(Lstsq, RankDeficiencyCarriesRank) {
  Matrix theta(4, 3);
  theta << 1, 2, 3, 2, 4, 6, 1, 0, 1, 0, 1, 1;  // col3 = col1 + col2
  try {
    lstsq(theta, Vector::Ones(4));
    FAIL() << "expected RankDeficientError";
  } catch (const RankDeficientError& e) {
    EXPECT_EQ(e.rank(), 2);
    EXPECT_EQ(e.required(), 3);
  }
  EXPECT_THROW(lstsq(Matrix::Ones(2, 3), Vector::Ones(2)), RankDeficientError);
  EXPECT_THROW(lstsq(Matrix::Identity(3, 3), Vector::Ones(2)), std::invalid_argument);
}

TEST(NumericalRank, Threshold) {
  EXPECT_EQ(numerical_rank(Matrix::Zero(3, 3)), 0);
  EXPECT_EQ(numerical_rank(Matrix::Identity(5, 3)), 3);
  Matrix m = Matrix::Identity(3, 3);
  m(2, 2) = 1e-17;
  EXPECT_EQ(numerical_rank(m), 2);
}

TEST(SolveAffine, NullSpaceAndResidual) {
  Matrix m(1, 3);
  m << 1, 1, 1;
  const AffineSet set = solve_affine(m, Vector::Ones(1));
  EXPECT_EQ(set.null_basis.cols(), 2);
  EXPECT_NEAR((m * set.particular)(0), 1.0, 1e-14);
  EXPECT_LE((m * set.null_basis).norm(), 1e-14);
  EXPECT_LE(set.residual, 1e-14);

  Matrix bad(2, 1);
  bad << 1, 1;
  EXPECT_NEAR(solve_affine(bad, Vector2d(0, 2)).residual, std::sqrt(2.0), 1e-12);
}

TEST(Hurwitz, Examples) {
  EXPECT_TRUE(is_hurwitz(-Matrix::Identity(3, 3)));
  EXPECT_FALSE(is_hurwitz(-Matrix::Identity(3, 3), 1.0));
  EXPECT_TRUE(is_hurwitz(-Matrix::Identity(3, 3), 0.5));
  EXPECT_FALSE(is_hurwitz(build_cw_plant(CwParams{}).A));
  EXPECT_THROW(is_hurwitz(Matrix::Zero(2, 3)), std::invalid_argument);
  EXPECT_NEAR(spectral_abscissa(-2.0 * Matrix::Identity(2, 2)), -2.0, 1e-14);
}

TEST(Finite, DetectsNan) {
  Matrix m = Matrix::Zero(2, 2);
  EXPECT_TRUE(all_finite(m));
  m(1, 0) = std::nan("");
  EXPECT_FALSE(all_finite(m));
}

}  // namespace
}  // namespace adpdock
