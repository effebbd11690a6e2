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

#include "adpdock/adp.hpp"

#include <cmath>
#include <future>

#include <Eigen/LU>

namespace adpdock {

namespace {

Index integer_ratio(double num, double den, const char* what) {
  const auto r = static_cast<Index>(std::llround(num / den));
  if (r <= 0 || std::abs(static_cast<double>(r) * den - num) > 1e-9 * num) {
    throw std::invalid_argument(what);
  }
  return r;
}

// a (x) b for column vectors, written into out.
void kron_into(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
               Eigen::Ref<Vector> out) {
  const Index nb = b.size();
  for (Index i = 0; i < a.size(); ++i) out.segment(i * nb, nb) = a(i) * b;
}

}  // namespace

TrajectoryLog collect_data(const StateSpaceModel& model, const Exosystem& exo, const Matrix& K0,
                           const NoiseSpec& noise, const Vector& x0, double horizon, double dt,
                           double sample_interval) {
  if (K0.rows() != model.m() || K0.cols() != model.n()) {
    throw std::invalid_argument("K0 must be m x n");
  }
  noise.validate();
  if (noise.channels() != model.m()) {
    throw std::invalid_argument("noise needs one channel per input");
  }
  integer_ratio(horizon, sample_interval, "horizon must be a multiple of the sampling interval");
  integer_ratio(sample_interval, dt, "sampling interval must be a multiple of dt");

  auto behavior = [&](const Vector& x, const Vector&, double t) -> Vector {
    return -K0 * x + exploration_noise(noise, t);
  };
  return simulate(model, exo, behavior, x0, 0.0, horizon, dt);
}

RegressionBundle assemble_bundle(const TrajectoryLog& log, const Matrix& Xj, Index j,
                                 const Matrix& R, double sample_interval) {
  log.validate();
  const double dt = log.uniform_step();
  const Index stride = integer_ratio(sample_interval, dt, "sampling interval must be a multiple of the log step");
  const Index samples = log.size();
  if ((samples - 1) % stride != 0) {
    throw std::invalid_argument("log length must cover a whole number of sampling intervals");
  }
  const Index rho = (samples - 1) / stride;

  const Index n = log.x.rows();
  const Index m = log.u.rows();
  const Index q = log.v.rows();
  if (Xj.rows() != n || Xj.cols() != q) throw std::invalid_argument("X_j must be n x q");
  if (R.rows() != m || R.cols() != m) throw std::invalid_argument("R must be m x m");
  const Index nn = triangular_size(n);

  const Matrix xbar = log.x - Xj * log.v;

  Matrix quad(nn, samples);
  Matrix xv(n * q, samples);
  for (Index i = 0; i < samples; ++i) {
    quad.col(i) = vecv(xbar.col(i)).entries;
    kron_into(xbar.col(i), log.v.col(i), xv.col(i));
  }

  RegressionBundle b;
  b.j = j;
  b.n = n;
  b.m = m;
  b.q = q;
  b.Ixx.resize(rho, nn);
  b.Gxu.resize(rho, n * m);
  b.Gxv.resize(rho, n * q);
  b.Dxx.resize(rho, nn);

  Vector xu(n * m);
  for (Index l = 0; l < rho; ++l) {
    const Index a = l * stride;
    const Index e = a + stride;
    b.Ixx.row(l) = dt * (quad.middleCols(a, stride + 1).rowwise().sum() -
                         0.5 * (quad.col(a) + quad.col(e)))
                            .transpose();
    b.Gxv.row(l) = dt * (xv.middleCols(a, stride + 1).rowwise().sum() -
                         0.5 * (xv.col(a) + xv.col(e)))
                            .transpose();
    Vector acc = Vector::Zero(n * m);
    for (Index i = a; i < e; ++i) {
      kron_into(0.5 * (xbar.col(i) + xbar.col(i + 1)), log.u.col(i), xu);
      acc += xu;
    }
    b.Gxu.row(l) = dt * acc.transpose();
    b.Dxx.row(l) = (quad.col(e) - quad.col(a)).transpose();
  }

  b.Theta.resize(rho, nn + n * m + n * q);
  b.Theta << b.Ixx, 2.0 * b.Gxu * kron(Matrix::Identity(n, n), R), 2.0 * b.Gxv;
  return b;
}

std::vector<RegressionBundle> assemble_regression(const TrajectoryLog& log,
                                                  const KernelBasis& basis, const Matrix& R,
                                                  double sample_interval) {
  std::vector<std::future<RegressionBundle>> jobs;
  jobs.reserve(static_cast<std::size_t>(basis.size()));
  for (Index j = 0; j < basis.size(); ++j) {
    jobs.push_back(std::async(std::launch::async, [&, j] {
      return assemble_bundle(log, basis.member(j), j, R, sample_interval);
    }));
  }
  std::vector<RegressionBundle> out;
  out.reserve(jobs.size());
  for (auto& f : jobs) out.push_back(f.get());
  return out;
}

RankReport check_rank(const RegressionBundle& bundle) {
  RankReport r;
  r.required = bundle.required_rank();
  Matrix stacked(bundle.Ixx.rows(), bundle.Ixx.cols() + bundle.Gxu.cols() + bundle.Gxv.cols());
  stacked << bundle.Ixx, bundle.Gxu, bundle.Gxv;
  r.rank = numerical_rank(stacked);
  r.ok = bundle.rows() >= r.required && r.rank == r.required;
  return r;
}

namespace {

RegressionSolution unpack(const RegressionBundle& b, const Eigen::Ref<const Vector>& theta) {
  const Index nn = triangular_size(b.n);
  RegressionSolution s;
  s.H = unvecs(theta.head(nn), b.n);
  s.K_next = unvec(theta.segment(nn, b.n * b.m), b.m, b.n);
  s.M = unvec(theta.tail(b.n * b.q), b.q, b.n);
  return s;
}

}  // namespace

RegressionSolution solve_regression(const RegressionBundle& bundle, const Matrix& P) {
  const Vector rhs = bundle.Dxx * vecs(P).entries;
  const LeastSquaresResult ls = lstsq(bundle.Theta, rhs);
  return unpack(bundle, ls.solution.col(0));
}

ValueIterationOptions data_driven_defaults() {
  ValueIterationOptions o;
  o.tolerance = 1e-3;
  o.steps = StepSchedule::harmonic();
  o.balls = BallSchedule::linear(10.0, 10.0);
  o.max_iterations = 200000;
  o.stop_test = StopTest::kAccepted;
  return o;
}

DataDrivenViResult vi_learn(const RegressionBundle& bundle_j0, const Matrix& Q, const Matrix& R,
                            ValueIterationOptions options) {
  DataDrivenViResult out;
  out.rank = check_rank(bundle_j0);
  if (!out.rank.ok) throw RankDeficientError(out.rank.rank, out.rank.required);

  const Index n = bundle_j0.n;
  // The regression is linear in vecs(P_k): solve once for all right-hand sides.
  const Matrix gain_map = lstsq(bundle_j0.Theta, bundle_j0.Dxx).solution;

  auto direction = [&](const Matrix& P) -> Matrix {
    const Vector theta = gain_map * vecs(P).entries;
    const RegressionSolution s = unpack(bundle_j0, theta);
    return s.H + Q - s.K_next.transpose() * R * s.K_next;
  };
  ValueIterationResult vi = run_value_iteration(direction, n, options);

  out.P = std::move(vi.P);
  out.K = unpack(bundle_j0, gain_map * vecs(out.P).entries).K_next;
  out.iterations = vi.iterations;
  out.resets = vi.resets;
  out.history = std::move(vi.history);
  return out;
}

ModelRecovery recover_model_artifacts(const std::vector<RegressionBundle>& bundles,
                                      const Matrix& P_final, const Matrix& K_next_final,
                                      const Matrix& R) {
  if (bundles.empty()) throw std::invalid_argument("no regression bundles");
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    if (bundles[i].j != static_cast<Index>(i)) {
      throw std::invalid_argument("bundles must be ordered by j starting at 0");
    }
  }
  Eigen::FullPivLU<Matrix> lu(P_final);
  if (!lu.isInvertible()) throw std::invalid_argument("P_final is singular");
  const Matrix P_inv = lu.inverse();

  ModelRecovery rec;
  const RegressionSolution s0 = solve_regression(bundles.front(), P_final);
  rec.D_hat = P_inv * s0.M.transpose();
  rec.B_hat = P_inv * K_next_final.transpose() * R;
  rec.S_values.reserve(bundles.size() - 1);
  for (std::size_t i = 1; i < bundles.size(); ++i) {
    const RegressionSolution s = solve_regression(bundles[i], P_final);
    rec.S_values.push_back(rec.D_hat - P_inv * s.M.transpose());
  }
  return rec;
}

RegulatorSolution solve_problem1_datadriven(const ModelRecovery& recovery,
                                            const KernelBasis& basis, const Matrix& Qbar,
                                            const Matrix& Rbar) {
  const Index n = recovery.D_hat.rows();
  const Index q = recovery.D_hat.cols();
  const Index m = recovery.B_hat.cols();
  const Index h = basis.h();
  if (static_cast<Index>(recovery.S_values.size()) != h + 1) {
    throw std::invalid_argument("recovery must hold S(X_j) for j = 1..h+1");
  }
  if (numerical_rank(recovery.B_hat) < m) {
    throw RankDeficientError(numerical_rank(recovery.B_hat), m);
  }

  // Unknowns z = [alpha (h); vec U (mq)].
  //   sum_i alpha_i vec S(X_{i+2}) - (I_q (x) B_hat) vec U = vec(D_hat - S(X_1))
  Matrix M(n * q, h + m * q);
  for (Index i = 0; i < h; ++i) M.col(i) = vec(recovery.S_values[static_cast<std::size_t>(i + 1)]);
  M.rightCols(m * q) = -kron(Matrix::Identity(q, q), recovery.B_hat);
  const Vector b = vec(recovery.D_hat - recovery.S_values.front());
  const AffineSet set = solve_affine(M, b);

  // [vec X; vec U] = G z + g
  Matrix G = Matrix::Zero(n * q + m * q, h + m * q);
  for (Index i = 0; i < h; ++i) G.col(i).head(n * q) = vec(basis.member(i + 2));
  G.bottomRightCorner(m * q, m * q).setIdentity();
  Vector g = Vector::Zero(n * q + m * q);
  g.head(n * q) = vec(basis.X1);
  Matrix W = Matrix::Zero(n * q + m * q, n * q + m * q);
  W.topLeftCorner(n * q, n * q) = kron(Matrix::Identity(q, q), Qbar);
  W.bottomRightCorner(m * q, m * q) = kron(Matrix::Identity(q, q), Rbar);

  const Vector z = minimize_quadratic_on_affine(set, W, G, g);
  const Vector xu = G * z + g;

  RegulatorSolution sol;
  sol.X = unvec(xu.head(n * q), n, q);
  sol.U = unvec(xu.tail(m * q), m, q);
  Matrix S = recovery.S_values.front();
  for (Index i = 0; i < h; ++i) S += z(i) * recovery.S_values[static_cast<std::size_t>(i + 1)];
  sol.residual_dyn = (S - recovery.B_hat * sol.U - recovery.D_hat).norm();
  sol.residual_out = (basis.C * sol.X + basis.F).norm();
  sol.trace_cost = trace_cost(sol.X, sol.U, Qbar, Rbar);
  return sol;
}

}  // namespace adpdock
