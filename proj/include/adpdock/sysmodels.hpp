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

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "adpdock/matops.hpp"

namespace adpdock {

/// Plant x' = A x + B u + D v with tracking error e = C x + F v.
///
/// Dimensions: n states, m inputs, p outputs, q exostates. A plant built
/// without an exosystem has q = 0.
struct StateSpaceModel {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;
  Matrix F;

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  Index p() const { return C.rows(); }
  Index q() const { return D.cols(); }

  /// Throws std::invalid_argument on inconsistent dimensions or non-finite entries.
  void validate() const;

  /// (A, B) pair with no output and no exosystem coupling.
  static StateSpaceModel from_ab(Matrix a, Matrix b);
};

/// Autonomous signal generator v' = E v, v(0) = v0.
struct Exosystem {
  Matrix E;
  Vector v0;

  Index q() const { return E.rows(); }
  void validate() const;
};

/// Circular reference orbit parameters for the Hill-frame relative motion model.
struct CwParams {
  double mean_motion = 0.00108;       // 1/s
  double r_ref = 7000.0;              // km
  double earth_radius = 6378.14;      // km
  double j2 = 1.08263e-3;
  double inclination = std::numbers::pi / 4.0;  // rad
  bool include_j2 = true;

  void validate() const;
  /// s = 3 J2 Re^2 / (8 r_ref^2) (1 + 3 cos 2i); zero when J2 is excluded.
  double s() const;
  /// c = sqrt(1 + s).
  double c() const;
  /// Magnitude -3 n^2 J2 Re^2 / r_ref of every nonzero disturbance entry.
  double j2_disturbance() const;
};

/// Relative motion of a deputy about the chief, state [x, y, z, vx, vy, vz],
/// input = thrust acceleration in each axis. C, D, F are empty (p = 3 zero rows,
/// q = 0).
StateSpaceModel build_cw_plant(const CwParams& params);

/// 2x2 rotation generator [[0, w], [-w, 0]].
Matrix rotation_generator(double omega);

inline const std::vector<double> kDefaultExoFrequencies{0.1, 0.2, 0.3, 0.4};

/// Docking scenario: E = bdiag of rotation generators, C = [I3 0], F = [I3 0],
/// and the J2 disturbance matrix D scaled by disturbance_gain. Requires at
/// least four frequencies (q >= 8) so that the disturbance pattern fits.
/// v0 defaults to [1, 0, 1, 0, ...].
std::pair<StateSpaceModel, Exosystem> build_docking_scenario(
    const CwParams& params, const std::vector<double>& exo_frequencies = kDefaultExoFrequencies,
    double disturbance_gain = 1.0);

/// Samples along a simulation, one column per sample.
struct TrajectoryLog {
  Vector times;
  Matrix x;
  Matrix u;
  Matrix v;
  Matrix e;

  Index size() const { return times.size(); }
  /// Constant step between samples. Throws if the grid is not uniform.
  double uniform_step(double rel_tol = 1e-9) const;
  void validate() const;
};

/// Header t,x1..xn,u1..um,v1..vq,e1..ep followed by one row per sample.
void write_csv(std::ostream& os, const TrajectoryLog& log);

class DivergenceError : public Error {
 public:
  explicit DivergenceError(double time);
  double time() const { return time_; }

 private:
  double time_;
};

/// u = controller(x, v, t); evaluated at step boundaries and held over the step.
using Controller = std::function<Vector(const Vector& x, const Vector& v, double t)>;

/// Fixed-step RK4 propagation of the joint (x, v) dynamics over
/// [t_begin, t_end]. The span must be an integer number of steps.
TrajectoryLog simulate(const StateSpaceModel& model, const Exosystem& exo,
                       const Controller& controller, const Vector& x0, double t_begin,
                       double t_end, double dt);

/// Sum of sinusoids per input channel: eta_i(t) = sum_k a_ik sin(w_ik t + phi_ik).
/// All three matrices are channels x terms.
struct NoiseSpec {
  Matrix amplitudes;
  Matrix frequencies;
  Matrix phases;
  std::uint64_t seed = 0;

  Index channels() const { return amplitudes.rows(); }
  Index terms() const { return amplitudes.cols(); }
  /// Frequencies must be pairwise distinct within each channel.
  void validate() const;

  /// Draws terms-per-channel frequencies uniformly from [freq_min, freq_max]
  /// (distinct across all channels) and phases from [0, 2pi) with a
  /// platform-independent generator.
  static NoiseSpec sinusoids(Index channels, Index terms, double amplitude, double freq_min,
                             double freq_max, std::uint64_t seed);
  /// The same single term on every channel.
  static NoiseSpec single(Index channels, double amplitude, double frequency, double phase);
};

Vector exploration_noise(const NoiseSpec& spec, double t);

struct RankTest {
  std::string name;
  std::complex<double> lambda;
  Index rank = 0;
  Index required = 0;
  /// Smallest of the first `required` singular values; zero when the rank is short.
  double margin = 0.0;
  bool passed() const { return rank >= required; }
};

struct AssumptionReport {
  std::vector<RankTest> stabilizability;
  std::vector<RankTest> observability;
  std::vector<RankTest> regulator_rank;

  bool stabilizable() const;
  bool observable() const;
  bool regulator_solvable() const;
  bool all_passed() const { return stabilizable() && observable() && regulator_solvable(); }
};

/// PBH tests: stabilizability of (A, B) at every eigenvalue with Re >= 0,
/// observability of (C, A) at every eigenvalue, and
/// rank [[A - lI, B], [C, 0]] = n + p for every l in the spectrum of E.
AssumptionReport check_assumptions(const StateSpaceModel& model, const Exosystem& exo);

}  // namespace adpdock
