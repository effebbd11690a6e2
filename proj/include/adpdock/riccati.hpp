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
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "adpdock/matops.hpp"
#include "adpdock/sysmodels.hpp"

namespace adpdock {

class NotHurwitzError : public Error {
 public:
  NotHurwitzError(const std::string& what, double abscissa);
  double abscissa() const { return abscissa_; }

 private:
  double abscissa_;
};

/// Solves a_cl' P + P a_cl + m = 0 through the Kronecker-form linear system.
/// Throws NotHurwitzError unless a_cl is Hurwitz.
Matrix lyapunov_solve(const Matrix& a_cl, const Matrix& m);

/// K = R^-1 B' P.
Matrix optimal_gain(const Matrix& B, const Matrix& R, const Matrix& P);

/// Frobenius norm of A'P + PA + Q - P B R^-1 B' P.
double are_residual(const StateSpaceModel& model, const Matrix& Q, const Matrix& R,
                    const Matrix& P);

/// A stabilizing gain for a controllable (A, B) via Bass's shifted-Gramian
/// construction. Used to seed policy iteration when no gain is known.
Matrix stabilizing_gain(const Matrix& A, const Matrix& B, double shift = 1.0);

/// Step sizes eps_k, evaluated for k = 1, 2, ...
struct StepSchedule {
  std::function<double(std::int64_t)> rule;

  double operator()(std::int64_t k) const { return rule(k); }
  /// scale / k.
  static StepSchedule harmonic(double scale = 1.0);
};

/// Radii of the nested Frobenius-norm balls, evaluated for r = 0, 1, ...
/// Strictly increasing in r.
struct BallSchedule {
  std::function<double(std::int64_t)> rule;

  double operator()(std::int64_t r) const { return rule(r); }
  /// base + slope * r; the default gives 10 (r + 1).
  static BallSchedule linear(double base = 10.0, double slope = 10.0);
};

struct IterationRecord {
  std::int64_t k = 0;
  double eps_k = 0.0;
  /// |P_k - P_{k-1}|_F
  double increment = 0.0;
  /// |P_k - P_ref|_F when a reference was supplied, NaN otherwise.
  double error_to_reference = 0.0;
  std::int64_t resets = 0;
};

using ConvergenceHistory = std::vector<IterationRecord>;

/// k,eps_k,frob_P_increment,reset_count
void write_increment_history_csv(std::ostream& os, const ConvergenceHistory& history);
/// k,eps_k,frob(P_k - P_star),reset_count
void write_error_history_csv(std::ostream& os, const ConvergenceHistory& history);

/// Which pair of matrices the stop test compares.
enum class StopTest {
  /// |P~_k - P_{k-1}| / eps_k: the candidate before any ball reset.
  kCandidate,
  /// |P_k - P_{k-1}| / eps_k on accepted iterates; reset steps never stop.
  kAccepted,
};

struct ValueIterationOptions {
  /// Initial value matrix; empty means identity.
  Matrix P0;
  double tolerance = 1e-3;
  StepSchedule steps = StepSchedule::harmonic();
  BallSchedule balls = BallSchedule::linear();
  std::int64_t max_iterations = 200000;
  StopTest stop_test = StopTest::kCandidate;
  /// Optional P* for error tracking in the history.
  Matrix reference;
  bool record_history = true;
};

struct ValueIterationResult {
  Matrix P;
  Matrix K;
  std::int64_t iterations = 0;
  std::int64_t resets = 0;
  ConvergenceHistory history;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(std::int64_t iterations, Matrix last_P, ConvergenceHistory history);
  std::int64_t iterations() const { return iterations_; }
  const Matrix& last_P() const { return last_P_; }
  const ConvergenceHistory& history() const { return history_; }

 private:
  std::int64_t iterations_;
  Matrix last_P_;
  ConvergenceHistory history_;
};

/// Update direction evaluated at the current value matrix.
using ValueDirection = std::function<Matrix(const Matrix& P)>;

/// Stochastic-approximation loop shared by the model-based and data-driven
/// variants: P~ = P + eps_k * direction(P), reset to P0 (and r += 1) when
/// |P~|_F exceeds the current ball radius, stop when the configured increment
/// ratio drops below the tolerance. Returns P only; K is left empty.
ValueIterationResult run_value_iteration(const ValueDirection& direction, Index n,
                                         const ValueIterationOptions& options);

/// Model-based value iteration with direction P A + A' P + Q - P B R^-1 B' P.
ValueIterationResult model_based_vi(const StateSpaceModel& model, const Matrix& Q,
                                    const Matrix& R, const ValueIterationOptions& options = {});

struct PolicyIterationResult {
  Matrix P;
  Matrix K;
  /// P_1, P_2, ... and K_0, K_1, ...
  std::vector<Matrix> P_iterates;
  std::vector<Matrix> K_iterates;
  /// Policy evaluations performed before the stop test confirmed convergence.
  Index iterations = 0;
};

/// Kleinman policy iteration from a stabilizing K0. Stops when
/// |P_k - P_{k-1}|_F < tol. Throws NotHurwitzError for a non-stabilizing K0
/// and std::invalid_argument when (A, sqrt(Q)) is not observable.
PolicyIterationResult kleinman_pi(const StateSpaceModel& model, const Matrix& Q, const Matrix& R,
                                  const Matrix& K0, double tol = 1e-10, Index max_iterations = 100);

}  // namespace adpdock
