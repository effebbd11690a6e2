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

#include "adpdock/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace adpdock {

NotHurwitzError::NotHurwitzError(const std::string& what, double abscissa)
    : Error([&] {
        std::ostringstream s;
        s << what << " (spectral abscissa " << abscissa << ")";
        return s.str();
      }()),
      abscissa_(abscissa) {}

NonConvergenceError::NonConvergenceError(std::int64_t iterations, Matrix last_P,
                                         ConvergenceHistory history)
    : Error("value iteration did not converge within " + std::to_string(iterations) +
            " iterations"),
      iterations_(iterations),
      last_P_(std::move(last_P)),
      history_(std::move(history)) {}

Matrix lyapunov_solve(const Matrix& a_cl, const Matrix& m) {
  if (a_cl.rows() != a_cl.cols() || m.rows() != a_cl.rows() || m.cols() != a_cl.cols()) {
    throw std::invalid_argument("lyapunov_solve: dimension mismatch");
  }
  const double abscissa = all_finite(a_cl) ? spectral_abscissa(a_cl)
                                           : std::numeric_limits<double>::infinity();
  if (!(abscissa < 0.0)) {
    throw NotHurwitzError("Lyapunov equation requires a Hurwitz matrix", abscissa);
  }
  const Index n = a_cl.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix at = a_cl.transpose();
  const Matrix op = kron(I, at) + kron(at, I);
  const Vector p = op.partialPivLu().solve(-vec(m));
  const Matrix P = unvec(p, n, n);
  return 0.5 * (P + P.transpose());
}

Matrix optimal_gain(const Matrix& B, const Matrix& R, const Matrix& P) {
  return R.ldlt().solve(B.transpose() * P);
}

double are_residual(const StateSpaceModel& model, const Matrix& Q, const Matrix& R,
                    const Matrix& P) {
  const Matrix& A = model.A;
  const Matrix& B = model.B;
  const Matrix res =
      A.transpose() * P + P * A + Q - P * B * R.ldlt().solve(B.transpose() * P);
  return res.norm();
}

Matrix stabilizing_gain(const Matrix& A, const Matrix& B, double shift) {
  const Index n = A.rows();
  const double alpha = std::max(0.0, spectral_abscissa(A)) + shift;
  const Matrix shifted = -(A + alpha * Matrix::Identity(n, n));
  // shifted W + W shifted' + 2 B B' = 0
  const Matrix W = lyapunov_solve(shifted.transpose(), 2.0 * B * B.transpose());
  Eigen::LDLT<Matrix> ldlt(W);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw std::invalid_argument("stabilizing_gain: (A, B) is not controllable");
  }
  const Matrix K = B.transpose() * ldlt.solve(Matrix::Identity(n, n));
  const double abscissa = spectral_abscissa(A - B * K);
  if (!(abscissa < 0.0)) {
    throw NotHurwitzError("stabilizing_gain failed to stabilize (A, B)", abscissa);
  }
  return K;
}

StepSchedule StepSchedule::harmonic(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("step scale must be positive");
  return {[scale](std::int64_t k) { return scale / static_cast<double>(k); }};
}

BallSchedule BallSchedule::linear(double base, double slope) {
  if (!(base > 0.0) || !(slope > 0.0)) {
    throw std::invalid_argument("ball radii must be positive and strictly increasing");
  }
  return {[base, slope](std::int64_t r) { return base + slope * static_cast<double>(r); }};
}

void write_increment_history_csv(std::ostream& os, const ConvergenceHistory& history) {
  os << "k,eps_k,frob_P_increment,reset_count\n";
  os << std::setprecision(17);
  for (const auto& r : history) {
    os << r.k << ',' << r.eps_k << ',' << r.increment << ',' << r.resets << '\n';
  }
}

void write_error_history_csv(std::ostream& os, const ConvergenceHistory& history) {
  os << "k,eps_k,frob(P_k - P_star),reset_count\n";
  os << std::setprecision(17);
  for (const auto& r : history) {
    os << r.k << ',' << r.eps_k << ',' << r.error_to_reference << ',' << r.resets << '\n';
  }
}

ValueIterationResult run_value_iteration(const ValueDirection& direction, Index n,
                                         const ValueIterationOptions& options) {
  if (!(options.tolerance > 0.0) || options.max_iterations <= 0) {
    throw std::invalid_argument("value iteration needs a positive tolerance and iteration cap");
  }
  const Matrix P0 = options.P0.size() == 0 ? Matrix::Identity(n, n) : symmetrized(options.P0);
  if (P0.rows() != n) throw std::invalid_argument("P0 must be n x n");
  Eigen::LLT<Matrix> llt(P0);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("P0 must be positive definite");
  const bool track_error = options.reference.size() > 0;

  ValueIterationResult out;
  Matrix P = P0;
  std::int64_t resets = 0;
  // eps_k is indexed from k = 1, so the ratio test is defined from the first step.
  for (std::int64_t k = 1; k <= options.max_iterations; ++k) {
    const double eps = options.steps(k);
    Matrix candidate = P + eps * direction(P);
    candidate = 0.5 * (candidate + candidate.transpose());

    Matrix next;
    const bool reset = !candidate.allFinite() || candidate.norm() > options.balls(resets);
    if (reset) {
      next = P0;
      ++resets;
    } else {
      next = candidate;
    }

    const double increment = (next - P).norm();
    // A reset step never counts as convergence, even when P was already P0.
    double tested = std::numeric_limits<double>::infinity();
    if (options.stop_test == StopTest::kAccepted) {
      if (!reset) tested = increment;
    } else if (candidate.allFinite()) {
      tested = (candidate - P).norm();
    }
    if (options.record_history) {
      IterationRecord rec;
      rec.k = k;
      rec.eps_k = eps;
      rec.increment = increment;
      rec.error_to_reference = track_error ? (next - options.reference).norm()
                                           : std::numeric_limits<double>::quiet_NaN();
      rec.resets = resets;
      out.history.push_back(rec);
    }
    P = std::move(next);
    if (tested / eps < options.tolerance) {
      out.P = P;
      out.iterations = k;
      out.resets = resets;
      return out;
    }
  }
  throw NonConvergenceError(options.max_iterations, P, std::move(out.history));
}

ValueIterationResult model_based_vi(const StateSpaceModel& model, const Matrix& Q,
                                    const Matrix& R, const ValueIterationOptions& options) {
  const Matrix& A = model.A;
  const Matrix G = model.B * R.ldlt().solve(model.B.transpose());
  auto direction = [&](const Matrix& P) -> Matrix {
    return P * A + A.transpose() * P + Q - P * G * P;
  };
  ValueIterationResult out = run_value_iteration(direction, model.n(), options);
  out.K = optimal_gain(model.B, R, out.P);
  return out;
}

PolicyIterationResult kleinman_pi(const StateSpaceModel& model, const Matrix& Q, const Matrix& R,
                                  const Matrix& K0, double tol, Index max_iterations) {
  const Matrix& A = model.A;
  const Matrix& B = model.B;
  const Index n = model.n();

  const Matrix sqrt_q = Eigen::SelfAdjointEigenSolver<Matrix>(symmetrized(Q)).operatorSqrt();
  StateSpaceModel obs_model = StateSpaceModel::from_ab(A, B);
  obs_model.C = sqrt_q;
  obs_model.F = Matrix::Zero(n, 0);
  Exosystem none{Matrix::Zero(0, 0), Vector::Zero(0)};
  if (!check_assumptions(obs_model, none).observable()) {
    throw std::invalid_argument("kleinman_pi: (A, sqrt(Q)) must be observable");
  }

  PolicyIterationResult out;
  Matrix K = K0;
  out.K_iterates.push_back(K);
  Matrix P_prev;
  for (Index k = 1; k <= max_iterations; ++k) {
    const Matrix a_cl = A - B * K;
    if (!is_hurwitz(a_cl)) {
      throw NotHurwitzError(k == 1 ? "K0 is not stabilizing" : "policy iterate lost stability",
                            spectral_abscissa(a_cl));
    }
    const Matrix P = lyapunov_solve(a_cl, Q + K.transpose() * R * K);
    K = optimal_gain(B, R, P);
    out.P_iterates.push_back(P);
    out.K_iterates.push_back(K);
    if (P_prev.size() > 0 && (P - P_prev).norm() < tol) {
      out.P = P;
      out.K = K;
      out.iterations = k - 1;
      return out;
    }
    P_prev = P;
  }
  throw NonConvergenceError(max_iterations, P_prev, {});
}

}  // namespace adpdock
