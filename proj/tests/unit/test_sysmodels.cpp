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
#include <numbers>
#include <sstream>

#include "adpdock/regulator.hpp"
#include "adpdock/riccati.hpp"
#include "adpdock/sysmodels.hpp"
#include "support/fixtures.hpp"

namespace adpdock {
namespace {

constexpr double kNbar = 0.00108;

Controller zero_input(Index m) {
  return [m](const Vector&, const Vector&, double) -> Vector { return Vector::Zero(m); };
}

Exosystem no_exo() { return {Matrix::Zero(0, 0), Vector::Zero(0)}; }

TEST(CwPlant, J2Coupling) {
  const CwParams params;
  EXPECT_NEAR(params.s(), testing::kJ2s, 1e-15);
  const double c = std::sqrt(1.0 + testing::kJ2s);
  EXPECT_DOUBLE_EQ(params.c(), c);

  const StateSpaceModel m = build_cw_plant(params);
  EXPECT_NEAR(m.A(3, 0), (5 * c * c - 2) * kNbar * kNbar, 1e-18);
  EXPECT_NEAR(m.A(3, 4), 2 * kNbar * c, 1e-15);
  EXPECT_DOUBLE_EQ(m.A(4, 3), -2 * kNbar);
  EXPECT_DOUBLE_EQ(m.A(5, 2), -kNbar * kNbar);
  EXPECT_EQ(m.A.topRightCorner(3, 3), Matrix::Identity(3, 3));
  EXPECT_EQ(m.B.topRows(3), Matrix::Zero(3, 3));
  EXPECT_EQ(m.B.bottomRows(3), Matrix::Identity(3, 3));
  EXPECT_EQ(m.C.rows(), 3);
  EXPECT_TRUE(m.C.isZero());
}

TEST(CwPlant, PlainHillEquations) {
  CwParams params;
  params.include_j2 = false;
  EXPECT_EQ(params.s(), 0.0);
  const Matrix a = build_cw_plant(params).A;
  EXPECT_DOUBLE_EQ(a(3, 0), 3 * kNbar * kNbar);
  EXPECT_DOUBLE_EQ(a(3, 4), 2 * kNbar);
  EXPECT_DOUBLE_EQ(a(4, 3), -2 * kNbar);
  EXPECT_DOUBLE_EQ(a(5, 2), -kNbar * kNbar);
}

TEST(CwPlant, ZeroRateLimit) {
  CwParams params;
  params.mean_motion = 1e-12;
  const Matrix a = build_cw_plant(params).A;
  EXPECT_LE(a.bottomRows(3).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_EQ(a.topRightCorner(3, 3), Matrix::Identity(3, 3));
}

TEST(CwPlant, InvalidParams) {
  CwParams p;
  p.mean_motion = 0.0;
  EXPECT_THROW(build_cw_plant(p), std::invalid_argument);
  p = CwParams{};
  p.r_ref = 6000.0;
  EXPECT_THROW(build_cw_plant(p), std::invalid_argument);
  p = CwParams{};
  p.j2 = 1.5;
  EXPECT_THROW(build_cw_plant(p), std::invalid_argument);
}

TEST(DockingScenario, Defaults) {
  const auto [model, exo] = build_docking_scenario(CwParams{});
  ASSERT_EQ(exo.q(), 8);
  for (Index k = 0; k < 4; ++k) {
    const double w = 0.1 * static_cast<double>(k + 1);
    EXPECT_NEAR(exo.E(2 * k, 2 * k + 1), w, 1e-15);
    EXPECT_NEAR(exo.E(2 * k + 1, 2 * k), -w, 1e-15);
  }
  EXPECT_EQ(exo.v0, (Vector(8) << 1, 0, 1, 0, 1, 0, 1, 0).finished());
  EXPECT_EQ(model.C.leftCols(3), Matrix::Identity(3, 3));
  EXPECT_EQ(model.F.leftCols(3), Matrix::Identity(3, 3));
  EXPECT_TRUE(model.F.rightCols(5).isZero());

  const double g = testing::kJ2Disturbance;
  EXPECT_NEAR(CwParams{}.j2_disturbance(), g, 1e-18);
  Matrix d = Matrix::Zero(6, 8);
  d(3, 2) = d(3, 5) = d(4, 4) = d(5, 0) = d(5, 6) = g;
  EXPECT_LE((model.D - d).norm(), 1e-18);
}

TEST(DockingScenario, NoDisturbance) {
  EXPECT_TRUE(build_docking_scenario(CwParams{}, kDefaultExoFrequencies, 0.0).first.D.isZero());
  CwParams no_j2;
  no_j2.include_j2 = false;
  EXPECT_TRUE(build_docking_scenario(no_j2).first.D.isZero());
}

TEST(DockingScenario, X1Substitution) {
  const auto [model, exo] = build_docking_scenario(CwParams{});
  Matrix x1 = Matrix::Zero(6, 8);
  x1.topRows(3) = -model.F;
  EXPECT_TRUE((model.C * x1 + model.F).isZero());
}

TEST(DockingScenario, BadFrequencies) {
  EXPECT_THROW(build_docking_scenario(CwParams{}, {0.1, 0.1, 0.3, 0.4}), std::invalid_argument);
  EXPECT_THROW(build_docking_scenario(CwParams{}, {0.1, -0.2, 0.3, 0.4}), std::invalid_argument);
  EXPECT_THROW(build_docking_scenario(CwParams{}, {0.1, 0.2, 0.3}), std::invalid_argument);
  EXPECT_NO_THROW(build_docking_scenario(CwParams{}, {0.1, 0.2, 0.3, 0.4, 0.5}));
}

TEST(Simulate, FrozenDynamics) {
  StateSpaceModel m = StateSpaceModel::from_ab(Matrix::Zero(2, 2), Matrix::Zero(2, 1));
  const Vector x0 = Eigen::Vector2d(0.3, -1.2);
  const TrajectoryLog log = simulate(m, no_exo(), zero_input(1), x0, 0.0, 1.0, 0.01);
  EXPECT_EQ(log.size(), 101);
  for (Index i = 0; i < log.size(); ++i) EXPECT_EQ(log.x.col(i), x0);
}

TEST(Simulate, ScalarExponential) {
  StateSpaceModel m = StateSpaceModel::from_ab(-Matrix::Identity(1, 1), Matrix::Zero(1, 1));
  const TrajectoryLog log = simulate(m, no_exo(), zero_input(1), Vector::Ones(1), 0.0, 1.0, 1e-3);
  EXPECT_NEAR(log.x(0, log.size() - 1), std::exp(-1.0), 1e-8);
  EXPECT_NEAR(log.times(log.size() - 1), 1.0, 1e-12);
}

TEST(Simulate, Rk4OrderFour) {
  StateSpaceModel m = StateSpaceModel::from_ab(-Matrix::Identity(1, 1), Matrix::Zero(1, 1));
  auto err = [&](double dt) {
    const TrajectoryLog log = simulate(m, no_exo(), zero_input(1), Vector::Ones(1), 0.0, 2.0, dt);
    return std::abs(log.x(0, log.size() - 1) - std::exp(-2.0));
  };
  const double ratio = err(0.1) / err(0.05);
  EXPECT_GT(ratio, 8.0);
  EXPECT_LT(ratio, 32.0);
}

TEST(Simulate, ExosystemRotation) {
  StateSpaceModel m = StateSpaceModel::from_ab(Matrix::Zero(1, 1), Matrix::Zero(1, 1));
  m.D = Matrix::Zero(1, 2);
  m.C = Matrix::Zero(0, 1);
  m.F = Matrix::Zero(0, 2);
  const Exosystem exo{rotation_generator(0.1), Eigen::Vector2d(1.0, 0.0)};
  const TrajectoryLog log = simulate(m, exo, zero_input(1), Vector::Zero(1), 0.0, 10.0, 1e-3);
  for (Index i = 0; i < log.size(); i += 997) {
    const double t = log.times(i);
    // v' = [[0, w], [-w, 0]] v from (1, 0) gives (cos wt, -sin wt).
    EXPECT_NEAR(log.v(0, i), std::cos(0.1 * t), 1e-8);
    EXPECT_NEAR(log.v(1, i), -std::sin(0.1 * t), 1e-8);
  }
}

TEST(Simulate, ExosystemNormPreserved) {
  const auto [model, exo] = build_docking_scenario(CwParams{}, {1.0, 2.0, 3.0, 4.0});
  const TrajectoryLog log = simulate(model, exo, zero_input(3), Vector::Zero(6), 0.0, 25.0, 1e-3);
  const double v0 = exo.v0.norm();
  for (Index i = 0; i < log.size(); ++i) EXPECT_NEAR(log.v.col(i).norm(), v0, 1e-6);
}

TEST(Simulate, Errors) {
  StateSpaceModel m = StateSpaceModel::from_ab(Matrix::Identity(1, 1), Matrix::Identity(1, 1));
  EXPECT_THROW(simulate(m, no_exo(), zero_input(1), Vector::Ones(2), 0, 1, 0.1),
               std::invalid_argument);
  EXPECT_THROW(simulate(m, no_exo(), zero_input(1), Vector::Ones(1), 0, 1, 0.3),
               std::invalid_argument);
  EXPECT_THROW(simulate(m, no_exo(), zero_input(2), Vector::Ones(1), 0, 1, 0.1),
               std::invalid_argument);

  StateSpaceModel fast = StateSpaceModel::from_ab(1e3 * Matrix::Identity(1, 1), Matrix::Zero(1, 1));
  try {
    simulate(fast, no_exo(), zero_input(1), Vector::Ones(1), 0.0, 10.0, 0.01);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), 10.0);
  }
}

TEST(TrajectoryCsv, Schema) {
  const auto [model, exo] = build_docking_scenario(CwParams{});
  const TrajectoryLog log = simulate(model, exo, zero_input(3), Vector::Zero(6), 0.0, 0.01, 1e-3);
  std::ostringstream os;
  write_csv(os, log);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header,
            "t,x1,x2,x3,x4,x5,x6,u1,u2,u3,v1,v2,v3,v4,v5,v6,v7,v8,e1,e2,e3");
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 20);
  }
  EXPECT_EQ(rows, 11);
  EXPECT_NEAR(log.uniform_step(), 1e-3, 1e-15);
}

TEST(Noise, SingleTermPeak) {
  const NoiseSpec spec = NoiseSpec::single(3, 1.0, 1.0, 0.0);
  EXPECT_LE((exploration_noise(spec, std::numbers::pi / 2) - Vector::Ones(3)).norm(), 1e-15);
  EXPECT_TRUE(exploration_noise(NoiseSpec::single(2, 0.0, 1.0, 0.3), 1.7).isZero());
}

TEST(Noise, DeterministicAndBounded) {
  const NoiseSpec a = NoiseSpec::sinusoids(3, 10, 0.1, 0.1, 10.0, 42);
  const NoiseSpec b = NoiseSpec::sinusoids(3, 10, 0.1, 0.1, 10.0, 42);
  const NoiseSpec c = NoiseSpec::sinusoids(3, 10, 0.1, 0.1, 10.0, 43);
  EXPECT_EQ(a.frequencies, b.frequencies);
  EXPECT_EQ(a.phases, b.phases);
  EXPECT_NE(a.frequencies, c.frequencies);
  EXPECT_GE(a.frequencies.minCoeff(), 0.1);
  EXPECT_LE(a.frequencies.maxCoeff(), 10.0);
  for (double t = 0.0; t < 25.0; t += 0.37) {
    const Vector eta = exploration_noise(a, t);
    EXPECT_EQ(eta, exploration_noise(b, t));
    EXPECT_LE(eta.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
  }
}

TEST(Noise, RepeatedFrequencyRejected) {
  NoiseSpec spec = NoiseSpec::sinusoids(1, 2, 0.1, 0.1, 10.0, 1);
  spec.frequencies(0, 1) = spec.frequencies(0, 0);
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(Assumptions, DockingScenarioPasses) {
  const auto [model, exo] = build_docking_scenario(CwParams{});
  const AssumptionReport r = check_assumptions(model, exo);
  EXPECT_TRUE(r.stabilizable());
  EXPECT_TRUE(r.observable());
  EXPECT_TRUE(r.regulator_solvable());
  EXPECT_EQ(r.regulator_rank.size(), 8u);
  EXPECT_EQ(r.observability.size(), 6u);
  for (const auto& t : r.regulator_rank) EXPECT_EQ(t.required, 9);
}

TEST(Assumptions, UncontrollableUnstable) {
  StateSpaceModel m = StateSpaceModel::from_ab(Matrix::Identity(2, 2), Matrix::Zero(2, 1));
  m.C = Matrix::Identity(2, 2);
  m.F = Matrix::Zero(2, 0);
  const AssumptionReport r = check_assumptions(m, no_exo());
  EXPECT_FALSE(r.stabilizable());
  EXPECT_TRUE(r.observable());
  EXPECT_FALSE(r.all_passed());
}

TEST(Assumptions, ZeroOutputMap) {
  auto [model, exo] = build_docking_scenario(CwParams{});
  model.C.setZero();
  const AssumptionReport r = check_assumptions(model, exo);
  EXPECT_FALSE(r.observable());
  EXPECT_FALSE(r.regulator_solvable());
}

// Closed loop under the model-based optimal gains on the default scenario.
TEST(ClosedLoop, OracleGainsTrack) {
  const auto [model, exo] = build_docking_scenario(CwParams{});
  const Matrix Q = 0.05 * Matrix::Identity(6, 6);
  const Matrix R = 10.0 * Matrix::Identity(3, 3);
  const PolicyIterationResult pi =
      kleinman_pi(model, Q, R, stabilizing_gain(model.A, model.B));
  const Matrix L = feedforward_gain(solve_regulator_exact(model, exo), pi.K);
  auto policy = [&](const Vector& x, const Vector& v, double) -> Vector {
    return -pi.K * x + L * v;
  };
  const TrajectoryLog log = simulate(model, exo, policy, Vector::Zero(6), 0.0, 25.0, 1e-3);
  const double e0 = log.e.col(0).norm();
  EXPECT_LT(log.e.col(log.size() - 1).norm(), 1e-2 * e0);

  // Window maxima shrink once the first 5 s transient has passed.
  double previous = 1e300;
  for (Index w = 1; w < 5; ++w) {
    const double peak = log.e.middleCols(w * 5000, 5001).colwise().norm().maxCoeff();
    EXPECT_LT(peak, previous);
    previous = peak;
  }
}

}  // namespace
}  // namespace adpdock
