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

#include "adpdock/regulator.hpp"

#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace adpdock {

RegulatorNoSolutionError::RegulatorNoSolutionError(double residual)
    : Error([residual] {
        std::ostringstream s;
        s << "regulator equations have no solution (residual " << residual << ")";
        return s.str();
      }()),
      residual_(residual) {}

const Matrix& KernelBasis::member(Index j) const {
  if (j == 0) return X0;
  if (j == 1) return X1;
  if (j < 0 || j > h() + 1) throw std::out_of_range("kernel basis index out of range");
  return basis[static_cast<std::size_t>(j - 2)];
}

KernelBasis kernel_basis(const StateSpaceModel& model) {
  model.validate();
  const Index n = model.n();
  const Index p = model.p();
  const Index q = model.q();

  Eigen::JacobiSVD<Matrix> svd(model.C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double tol = rank_threshold(sv, model.C.rows(), model.C.cols());
  const Index rank = sv.size() == 0 ? 0 : static_cast<Index>((sv.array() > tol).count());
  if (rank < p) {
    throw std::invalid_argument("C must have full row rank (rank " + std::to_string(rank) +
                                " < p = " + std::to_string(p) + ")");
  }

  KernelBasis kb;
  kb.C = model.C;
  kb.F = model.F;
  kb.X0 = Matrix::Zero(n, q);

  // Minimum-norm X1 = -pinv(C) F.
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  Matrix coeffs = -(u.leftCols(p).transpose() * model.F);
  for (Index i = 0; i < p; ++i) coeffs.row(i) /= sv(i);
  kb.X1 = v.leftCols(p) * coeffs;

  // Column-major order so that vec(X_j) runs through e_col (x) null_k.
  const Matrix null = v.rightCols(n - p);
  kb.basis.reserve(static_cast<std::size_t>((n - p) * q));
  for (Index col = 0; col < q; ++col) {
    for (Index k = 0; k < n - p; ++k) {
      Matrix xj = Matrix::Zero(n, q);
      xj.col(col) = null.col(k);
      kb.basis.push_back(std::move(xj));
    }
  }
  return kb;
}

double regulator_tolerance(const StateSpaceModel& model) {
  return 1e-8 * (1.0 + model.D.norm() + model.F.norm());
}

double trace_cost(const Matrix& X, const Matrix& U, const Matrix& Qbar, const Matrix& Rbar) {
  return (X.transpose() * Qbar * X).trace() + (U.transpose() * Rbar * U).trace();
}

Vector minimize_quadratic_on_affine(const AffineSet& set, const Matrix& W, const Matrix& G,
                                    const Vector& g) {
  const Vector r0 = G * set.particular + g;
  if (set.null_basis.cols() == 0) return set.particular;
  const Matrix gn = G * set.null_basis;
  const Matrix hessian = gn.transpose() * W * gn;
  const Vector grad = gn.transpose() * W * r0;
  const Vector y = Eigen::CompleteOrthogonalDecomposition<Matrix>(hessian).solve(-grad);
  return set.particular + set.null_basis * y;
}

RegulatorSolution solve_regulator_exact(const StateSpaceModel& model, const Exosystem& exo,
                                        const Matrix& Qbar, const Matrix& Rbar) {
  model.validate();
  exo.validate();
  const Index n = model.n();
  const Index m = model.m();
  const Index p = model.p();
  const Index q = model.q();
  if (exo.q() != q) throw std::invalid_argument("exosystem dimension must match model q");
  if (Qbar.rows() != n || Qbar.cols() != n || Rbar.rows() != m || Rbar.cols() != m) {
    throw std::invalid_argument("Qbar must be n x n and Rbar m x m");
  }

  const Matrix Iq = Matrix::Identity(q, q);
  const Matrix In = Matrix::Identity(n, n);

  // vec(XE - AX - BU) = vec(D);  vec(CX) = -vec(F).
  Matrix M = Matrix::Zero(n * q + p * q, n * q + m * q);
  M.topLeftCorner(n * q, n * q) = kron(exo.E.transpose(), In) - kron(Iq, model.A);
  M.topRightCorner(n * q, m * q) = -kron(Iq, model.B);
  M.bottomLeftCorner(p * q, n * q) = kron(Iq, model.C);
  Vector b(n * q + p * q);
  b << vec(model.D), -vec(model.F);

  const AffineSet set = solve_affine(M, b);
  if (set.residual > regulator_tolerance(model)) {
    throw RegulatorNoSolutionError(set.residual);
  }

  Matrix W = Matrix::Zero(n * q + m * q, n * q + m * q);
  W.topLeftCorner(n * q, n * q) = kron(Iq, Qbar);
  W.bottomRightCorner(m * q, m * q) = kron(Iq, Rbar);
  const Index dim = n * q + m * q;
  const Vector z =
      minimize_quadratic_on_affine(set, W, Matrix::Identity(dim, dim), Vector::Zero(dim));

  RegulatorSolution sol;
  sol.X = unvec(z.head(n * q), n, q);
  sol.U = unvec(z.tail(m * q), m, q);
  sol.residual_dyn = (sol.X * exo.E - model.A * sol.X - model.B * sol.U - model.D).norm();
  sol.residual_out = (model.C * sol.X + model.F).norm();
  sol.trace_cost = trace_cost(sol.X, sol.U, Qbar, Rbar);
  return sol;
}

RegulatorSolution solve_regulator_exact(const StateSpaceModel& model, const Exosystem& exo) {
  return solve_regulator_exact(model, exo, Matrix::Identity(model.n(), model.n()),
                               Matrix::Identity(model.m(), model.m()));
}

Matrix feedforward_gain(const RegulatorSolution& sol, const Matrix& K) {
  if (K.cols() != sol.X.rows() || K.rows() != sol.U.rows()) {
    throw std::invalid_argument("feedforward_gain: K must be m x n");
  }
  return sol.U + K * sol.X;
}

}  // namespace adpdock
