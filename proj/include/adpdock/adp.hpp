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

#include <cstdint>
#include <vector>

#include "adpdock/matops.hpp"
#include "adpdock/regulator.hpp"
#include "adpdock/riccati.hpp"
#include "adpdock/sysmodels.hpp"

// Data-driven value iteration for optimal output regulation.
//
// Everything below works from recorded (x, u, v) samples plus the known output
// map (C, F); the plant matrices A, B and D are never read. For each kernel
// member X_j, with xbar = x - X_j v, the identity
//
//   Theta_j [vecs(H_k); vec(K_{k+1}); vec((D - S(X_j))' P_k)] = delta_j vecs(P_k)
//
// holds over every sampling interval, where H_k = A'P_k + P_k A,
// K_{k+1} = R^-1 B' P_k, S(X) = X E - A X and
// Theta_j = [I_xx, 2 G_xu (I_n (x) R), 2 G_xv].

namespace adpdock {

/// Regression matrices for one kernel member X_j over rho sampling intervals.
struct RegressionBundle {
  Index j = 0;
  Index n = 0;
  Index m = 0;
  Index q = 0;
  /// rows: integral of vecv(xbar) per interval
  Matrix Ixx;
  /// rows: integral of xbar (x) u per interval
  Matrix Gxu;
  /// rows: integral of xbar (x) v per interval
  Matrix Gxv;
  /// rows: vecv(xbar(t_l)) - vecv(xbar(t_{l-1}))
  Matrix Dxx;
  Matrix Theta;

  Index rows() const { return Theta.rows(); }
  /// n(n+1)/2 + (m + q) n
  Index required_rank() const { return triangular_size(n) + (m + q) * n; }
};

struct RankReport {
  bool ok = false;
  Index rank = 0;
  Index required = 0;
};

/// Simulates the plant under u = -K0 x + eta(t) (K0 need not be stabilizing)
/// on the fine dt grid. horizon / sample_interval and sample_interval / dt must
/// both be integers.
TrajectoryLog collect_data(const StateSpaceModel& model, const Exosystem& exo, const Matrix& K0,
                           const NoiseSpec& noise, const Vector& x0, double horizon, double dt,
                           double sample_interval);

/// Builds the bundle for a single kernel member X_j. Integrals use the
/// trapezoidal rule on the fine grid; the input is treated as held over each
/// fine step, matching how the data were generated.
RegressionBundle assemble_bundle(const TrajectoryLog& log, const Matrix& Xj, Index j,
                                 const Matrix& R, double sample_interval);

/// Bundles for j = 0..h+1, assembled concurrently.
std::vector<RegressionBundle> assemble_regression(const TrajectoryLog& log,
                                                  const KernelBasis& basis, const Matrix& R,
                                                  double sample_interval);

/// Numerical rank of [I_xx, G_xu, G_xv] against n(n+1)/2 + (m + q) n.
RankReport check_rank(const RegressionBundle& bundle);

/// Least-squares solution of the regression identity at a given P.
struct RegressionSolution {
  Matrix H;       // n x n
  Matrix K_next;  // m x n
  Matrix M;       // q x n, (D - S(X_j))' P
};

RegressionSolution solve_regression(const RegressionBundle& bundle, const Matrix& P);

struct DataDrivenViResult {
  Matrix P;
  /// Gain solved from the regression at the final P.
  Matrix K;
  std::int64_t iterations = 0;
  std::int64_t resets = 0;
  RankReport rank;
  ConvergenceHistory history;
};

/// Paper-scenario learning defaults: harmonic steps, balls 10 (r + 1),
/// tolerance 1e-3, stop test on accepted iterates.
ValueIterationOptions data_driven_defaults();

/// Value iteration driven by the j = 0 regression:
///   P~ = P + eps_k (H_k + Q - K_{k+1}' R K_{k+1})
/// with the same ball-reset rule as the model-based loop. Theta is factored
/// once; each iteration only maps vecs(P_k) through the fixed pseudo-inverse.
/// Throws RankDeficientError when the bundle fails the rank check.
/// The default stop test compares accepted iterates.
DataDrivenViResult vi_learn(const RegressionBundle& bundle_j0, const Matrix& Q, const Matrix& R,
                            ValueIterationOptions options = data_driven_defaults());

/// Quantities recovered from the regressions at the final value matrix.
struct ModelRecovery {
  Matrix D_hat;
  Matrix B_hat;
  /// S(X_j) for j = 1..h+1 (index 0 holds S(X_1)).
  std::vector<Matrix> S_values;
};

/// D_hat from the j = 0 bundle (S(X_0) = 0), B_hat = P^-1 K_next' R, and
/// S(X_j) = D_hat - P^-1 M_j' for j >= 1. Throws std::invalid_argument for a
/// singular P_final.
ModelRecovery recover_model_artifacts(const std::vector<RegressionBundle>& bundles,
                                      const Matrix& P_final, const Matrix& K_next_final,
                                      const Matrix& R);

/// Cost-minimizing regulator pair from recovered data. X ranges over
/// X_1 + span{X_2..X_{h+1}} so C X + F = 0 holds by construction; the
/// recovered regulator equation S(X) = B_hat U + D_hat is imposed as a linear
/// constraint on (alpha, U) and Tr(X'Qbar X + U'Rbar U) is minimized over the
/// resulting affine set. residual_dyn is measured with the recovered
/// quantities.
RegulatorSolution solve_problem1_datadriven(const ModelRecovery& recovery,
                                            const KernelBasis& basis, const Matrix& Qbar,
                                            const Matrix& Rbar);

/// Output of the complete learning pipeline.
struct LearnedController {
  Matrix K;
  Matrix L;
  Matrix P;
  std::int64_t iterations = 0;
  std::int64_t resets = 0;
  bool rank_checked = false;
  Index rank = 0;
  Index rank_required = 0;
  ConvergenceHistory history;
};

}  // namespace adpdock
