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

#include <vector>

#include "adpdock/matops.hpp"
#include "adpdock/sysmodels.hpp"

namespace adpdock {

/// A pair (X, U) of the regulator equations
///   X E = A X + B U + D,   0 = C X + F
/// with its residuals and the cost Tr(X' Qbar X + U' Rbar U).
struct RegulatorSolution {
  Matrix X;
  Matrix U;
  double residual_dyn = 0.0;
  double residual_out = 0.0;
  double trace_cost = 0.0;
};

/// X0 = 0, X1 with C X1 + F = 0, and X2..X_{h+1} whose vectorizations are an
/// orthonormal basis of ker(I_q (x) C), h = (n - p) q.
struct KernelBasis {
  Matrix X0;
  Matrix X1;
  std::vector<Matrix> basis;
  Matrix C;
  Matrix F;

  Index h() const { return static_cast<Index>(basis.size()); }
  /// X_j for j in [0, h + 1].
  const Matrix& member(Index j) const;
  /// Number of members, h + 2.
  Index size() const { return h() + 2; }
};

class RegulatorNoSolutionError : public Error {
 public:
  explicit RegulatorNoSolutionError(double residual);
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Throws std::invalid_argument if C lacks full row rank.
KernelBasis kernel_basis(const StateSpaceModel& model);

/// 1e-8 * (1 + |D| + |F|).
double regulator_tolerance(const StateSpaceModel& model);

double trace_cost(const Matrix& X, const Matrix& U, const Matrix& Qbar, const Matrix& Rbar);

/// Minimizes |G z + g|_W^2 over the affine set {particular + null_basis * y}.
/// Uses the minimum-norm y when the reduced Hessian is singular.
Vector minimize_quadratic_on_affine(const AffineSet& set, const Matrix& W, const Matrix& G,
                                    const Vector& g);

/// Cost-minimizing solution of the regulator equations. The constraints are
/// stacked as one linear system in (vec X, vec U); when the solution set has
/// positive dimension the trace cost is minimized over it. Throws
/// RegulatorNoSolutionError when the system is inconsistent.
RegulatorSolution solve_regulator_exact(const StateSpaceModel& model, const Exosystem& exo,
                                        const Matrix& Qbar, const Matrix& Rbar);
/// Qbar = I_n, Rbar = I_m.
RegulatorSolution solve_regulator_exact(const StateSpaceModel& model, const Exosystem& exo);

/// L = U + K X.
Matrix feedforward_gain(const RegulatorSolution& sol, const Matrix& K);

}  // namespace adpdock
