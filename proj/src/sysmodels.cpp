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

#include "adpdock/sysmodels.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace adpdock {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

void StateSpaceModel::validate() const {
  require(A.rows() == A.cols() && A.rows() > 0, "A must be square and nonempty");
  require(B.rows() == n(), "B must have n rows");
  require(C.cols() == n(), "C must have n columns");
  require(D.rows() == n(), "D must have n rows");
  require(F.rows() == p() && F.cols() == q(), "F must be p x q");
  require(all_finite(A) && all_finite(B) && all_finite(C) && all_finite(D) && all_finite(F),
          "model matrices must be finite");
}

StateSpaceModel StateSpaceModel::from_ab(Matrix a, Matrix b) {
  StateSpaceModel m;
  const Index n = a.rows();
  m.A = std::move(a);
  m.B = std::move(b);
  m.C = Matrix::Zero(0, n);
  m.D = Matrix::Zero(n, 0);
  m.F = Matrix::Zero(0, 0);
  m.validate();
  return m;
}

void Exosystem::validate() const {
  require(E.rows() == E.cols(), "E must be square");
  require(v0.size() == E.rows(), "v0 must have q entries");
  require(all_finite(E) && v0.allFinite(), "exosystem entries must be finite");
}

void CwParams::validate() const {
  require(mean_motion > 0.0, "mean motion must be positive");
  require(earth_radius > 0.0 && r_ref > earth_radius, "require r_ref > Re > 0");
  require(j2 >= 0.0 && j2 < 1.0, "require 0 <= J2 < 1");
  require(std::isfinite(inclination), "inclination must be finite");
}

double CwParams::s() const {
  if (!include_j2) return 0.0;
  return 3.0 * j2 * earth_radius * earth_radius / (8.0 * r_ref * r_ref) *
         (1.0 + 3.0 * std::cos(2.0 * inclination));
}

double CwParams::c() const { return std::sqrt(1.0 + s()); }

double CwParams::j2_disturbance() const {
  return -3.0 * mean_motion * mean_motion * j2 * earth_radius * earth_radius / r_ref;
}

StateSpaceModel build_cw_plant(const CwParams& params) {
  params.validate();
  const double nb = params.mean_motion;
  const double c = params.c();

  Matrix a = Matrix::Zero(6, 6);
  a.topRightCorner(3, 3).setIdentity();
  a(3, 0) = (5.0 * c * c - 2.0) * nb * nb;
  a(3, 4) = 2.0 * nb * c;
  a(4, 3) = -2.0 * nb;
  // z'' + n^2 z = 0
  a(5, 2) = -nb * nb;

  Matrix b = Matrix::Zero(6, 3);
  b.bottomRows(3).setIdentity();

  StateSpaceModel m;
  m.A = std::move(a);
  m.B = std::move(b);
  m.C = Matrix::Zero(3, 6);
  m.D = Matrix::Zero(6, 0);
  m.F = Matrix::Zero(3, 0);
  return m;
}

Matrix rotation_generator(double omega) {
  Matrix g(2, 2);
  g << 0.0, omega, -omega, 0.0;
  return g;
}

std::pair<StateSpaceModel, Exosystem> build_docking_scenario(
    const CwParams& params, const std::vector<double>& exo_frequencies,
    double disturbance_gain) {
  std::set<double> distinct(exo_frequencies.begin(), exo_frequencies.end());
  if (distinct.size() != exo_frequencies.size()) {
    throw std::invalid_argument("exosystem frequencies must be distinct");
  }
  if (std::any_of(exo_frequencies.begin(), exo_frequencies.end(),
                  [](double w) { return !(w > 0.0); })) {
    throw std::invalid_argument("exosystem frequencies must be positive");
  }
  const Index q = 2 * static_cast<Index>(exo_frequencies.size());
  if (q < 8) {
    throw std::invalid_argument(
        "disturbance pattern needs q >= 8 exostates (four frequencies); got q = " +
        std::to_string(q));
  }

  StateSpaceModel model = build_cw_plant(params);

  std::vector<Matrix> blocks;
  blocks.reserve(exo_frequencies.size());
  for (double w : exo_frequencies) blocks.push_back(rotation_generator(w));

  Exosystem exo;
  exo.E = bdiag(blocks);
  exo.v0 = Vector::Zero(q);
  for (Index i = 0; i < q; i += 2) exo.v0(i) = 1.0;

  model.C = Matrix::Zero(3, 6);
  model.C.leftCols(3).setIdentity();
  model.F = Matrix::Zero(3, q);
  model.F.leftCols(3).setIdentity();

  const double g = params.include_j2 ? disturbance_gain * params.j2_disturbance() : 0.0;
  model.D = Matrix::Zero(6, q);
  model.D(3, 2) = g;
  model.D(3, 5) = g;
  model.D(4, 4) = g;
  model.D(5, 0) = g;
  model.D(5, 6) = g;

  model.validate();
  exo.validate();
  return {std::move(model), std::move(exo)};
}

double TrajectoryLog::uniform_step(double rel_tol) const {
  if (times.size() < 2) throw std::invalid_argument("trajectory needs at least two samples");
  const double span = times(times.size() - 1) - times(0);
  const double h = span / static_cast<double>(times.size() - 1);
  if (!(h > 0.0)) throw std::invalid_argument("trajectory times must be increasing");
  for (Index i = 1; i < times.size(); ++i) {
    if (std::abs((times(i) - times(i - 1)) - h) > rel_tol * h) {
      throw std::invalid_argument("trajectory grid is not uniform");
    }
  }
  return h;
}

void TrajectoryLog::validate() const {
  const Index n = times.size();
  require(x.cols() == n && u.cols() == n && v.cols() == n && e.cols() == n,
          "trajectory columns must match sample count");
  for (Index i = 1; i < n; ++i) require(times(i) > times(i - 1), "times must increase");
}

void write_csv(std::ostream& os, const TrajectoryLog& log) {
  os << "t";
  for (Index i = 0; i < log.x.rows(); ++i) os << ",x" << i + 1;
  for (Index i = 0; i < log.u.rows(); ++i) os << ",u" << i + 1;
  for (Index i = 0; i < log.v.rows(); ++i) os << ",v" << i + 1;
  for (Index i = 0; i < log.e.rows(); ++i) os << ",e" << i + 1;
  os << '\n';

  std::ostringstream row;
  row << std::setprecision(17);
  for (Index k = 0; k < log.size(); ++k) {
    row.str("");
    row << log.times(k);
    for (const Matrix* m : {&log.x, &log.u, &log.v, &log.e}) {
      for (Index i = 0; i < m->rows(); ++i) row << ',' << (*m)(i, k);
    }
    os << row.str() << '\n';
  }
}

DivergenceError::DivergenceError(double time)
    : Error([time] {
        std::ostringstream s;
        s << "state became non-finite at t = " << std::setprecision(17) << time;
        return s.str();
      }()),
      time_(time) {}

TrajectoryLog simulate(const StateSpaceModel& model, const Exosystem& exo,
                       const Controller& controller, const Vector& x0, double t_begin,
                       double t_end, double dt) {
  model.validate();
  exo.validate();
  require(exo.q() == model.q(), "exosystem dimension must match model q");
  require(x0.size() == model.n(), "x0 must have n entries");
  require(dt > 0.0 && std::isfinite(t_begin) && std::isfinite(t_end) && t_end > t_begin,
          "require dt > 0 and a finite, nonempty time span");

  const double span = t_end - t_begin;
  const auto steps = static_cast<Index>(std::llround(span / dt));
  require(steps > 0 && std::abs(static_cast<double>(steps) * dt - span) <= 1e-9 * span,
          "time span must be an integer number of steps");

  const Index n = model.n();
  const Index m = model.m();
  const Index q = model.q();
  const Index p = model.p();

  TrajectoryLog log;
  log.times.resize(steps + 1);
  log.x.resize(n, steps + 1);
  log.u.resize(m, steps + 1);
  log.v.resize(q, steps + 1);
  log.e.resize(p, steps + 1);

  const Matrix& A = model.A;
  const Matrix& B = model.B;
  const Matrix& D = model.D;
  const Matrix& E = exo.E;

  Vector x = x0;
  Vector v = exo.v0;
  for (Index k = 0; k <= steps; ++k) {
    const double t = t_begin + static_cast<double>(k) * dt;
    Vector u = controller(x, v, t);
    if (u.size() != m) throw std::invalid_argument("controller must return an m-vector");
    if (!x.allFinite() || !v.allFinite() || !u.allFinite()) throw DivergenceError(t);

    log.times(k) = t;
    log.x.col(k) = x;
    log.u.col(k) = u;
    log.v.col(k) = v;
    log.e.col(k) = model.C * x + model.F * v;
    if (k == steps) break;

    // u held over [t, t + dt).
    const Vector bu = B * u;
    const Vector kx1 = A * x + bu + D * v;
    const Vector kv1 = E * v;
    const Vector x2 = x + 0.5 * dt * kx1;
    const Vector v2 = v + 0.5 * dt * kv1;
    const Vector kx2 = A * x2 + bu + D * v2;
    const Vector kv2 = E * v2;
    const Vector x3 = x + 0.5 * dt * kx2;
    const Vector v3 = v + 0.5 * dt * kv2;
    const Vector kx3 = A * x3 + bu + D * v3;
    const Vector kv3 = E * v3;
    const Vector x4 = x + dt * kx3;
    const Vector v4 = v + dt * kv3;
    const Vector kx4 = A * x4 + bu + D * v4;
    const Vector kv4 = E * v4;
    x += dt / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
    v += dt / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
  }
  return log;
}

void NoiseSpec::validate() const {
  require(frequencies.rows() == amplitudes.rows() && phases.rows() == amplitudes.rows() &&
              frequencies.cols() == amplitudes.cols() && phases.cols() == amplitudes.cols(),
          "noise amplitude, frequency and phase lists must have equal shape");
  for (Index i = 0; i < frequencies.rows(); ++i) {
    std::set<double> seen;
    for (Index k = 0; k < frequencies.cols(); ++k) {
      if (!seen.insert(frequencies(i, k)).second) {
        throw std::invalid_argument("noise frequencies must be distinct within a channel");
      }
    }
  }
}

NoiseSpec NoiseSpec::sinusoids(Index channels, Index terms, double amplitude, double freq_min,
                               double freq_max, std::uint64_t seed) {
  require(channels > 0 && terms >= 0, "noise needs at least one channel");
  require(freq_max > freq_min, "noise frequency range must be nonempty");
  std::mt19937_64 rng(seed);
  // 53 random mantissa bits; independent of the standard library's distributions.
  auto uniform01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  NoiseSpec spec;
  spec.seed = seed;
  spec.amplitudes = Matrix::Constant(channels, terms, amplitude);
  spec.frequencies.resize(channels, terms);
  spec.phases.resize(channels, terms);
  std::set<double> used;
  for (Index i = 0; i < channels; ++i) {
    for (Index k = 0; k < terms; ++k) {
      double w = 0.0;
      do {
        w = freq_min + (freq_max - freq_min) * uniform01();
      } while (!used.insert(w).second);
      spec.frequencies(i, k) = w;
      spec.phases(i, k) = 2.0 * std::numbers::pi * uniform01();
    }
  }
  return spec;
}

NoiseSpec NoiseSpec::single(Index channels, double amplitude, double frequency, double phase) {
  NoiseSpec spec;
  spec.amplitudes = Matrix::Constant(channels, 1, amplitude);
  spec.frequencies = Matrix::Constant(channels, 1, frequency);
  spec.phases = Matrix::Constant(channels, 1, phase);
  return spec;
}

Vector exploration_noise(const NoiseSpec& spec, double t) {
  Vector out = Vector::Zero(spec.channels());
  for (Index i = 0; i < spec.channels(); ++i) {
    for (Index k = 0; k < spec.terms(); ++k) {
      out(i) += spec.amplitudes(i, k) * std::sin(spec.frequencies(i, k) * t + spec.phases(i, k));
    }
  }
  return out;
}

namespace {

using CMatrix = Eigen::MatrixXcd;

RankTest pbh_test(std::string name, std::complex<double> lambda, const CMatrix& m,
                  Index required) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const Vector sv = svd.singularValues();
  const double tol = rank_threshold(sv, m.rows(), m.cols());
  RankTest t;
  t.name = std::move(name);
  t.lambda = lambda;
  t.rank = sv.size() == 0 ? 0 : static_cast<Index>((sv.array() > tol).count());
  t.required = required;
  t.margin = (required > 0 && required <= sv.size()) ? sv(required - 1) : 0.0;
  if (t.rank < required) t.margin = 0.0;
  return t;
}

Eigen::VectorXcd eigenvalues(const Matrix& a) {
  if (a.size() == 0) return {};
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues();
}

}  // namespace

bool AssumptionReport::stabilizable() const {
  return std::all_of(stabilizability.begin(), stabilizability.end(),
                     [](const RankTest& t) { return t.passed(); });
}

bool AssumptionReport::observable() const {
  return std::all_of(observability.begin(), observability.end(),
                     [](const RankTest& t) { return t.passed(); });
}

bool AssumptionReport::regulator_solvable() const {
  return std::all_of(regulator_rank.begin(), regulator_rank.end(),
                     [](const RankTest& t) { return t.passed(); });
}

AssumptionReport check_assumptions(const StateSpaceModel& model, const Exosystem& exo) {
  model.validate();
  const Index n = model.n();
  const Index m = model.m();
  const Index p = model.p();
  const CMatrix a = model.A.cast<std::complex<double>>();
  const CMatrix b = model.B.cast<std::complex<double>>();
  const CMatrix c = model.C.cast<std::complex<double>>();
  const CMatrix eye = CMatrix::Identity(n, n);

  AssumptionReport report;
  for (const auto& l : eigenvalues(model.A)) {
    if (l.real() >= 0.0) {
      CMatrix pbh(n, n + m);
      pbh << a - l * eye, b;
      report.stabilizability.push_back(pbh_test("stabilizability", l, pbh, n));
    }
    CMatrix obs(n + p, n);
    obs << a - l * eye, c;
    report.observability.push_back(pbh_test("observability", l, obs, n));
  }
  for (const auto& l : eigenvalues(exo.E)) {
    CMatrix reg = CMatrix::Zero(n + p, n + m);
    reg.topLeftCorner(n, n) = a - l * eye;
    reg.topRightCorner(n, m) = b;
    reg.bottomLeftCorner(p, n) = c;
    report.regulator_rank.push_back(pbh_test("regulator_rank", l, reg, n + p));
  }
  return report;
}

}  // namespace adpdock
