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

#include <random>

#include "adpdock/matops.hpp"

namespace adpdock::testing {

/// Uniform entries in [-1, 1]; deterministic per seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  Index integer(Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(gen_);
  }
  Matrix matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = uniform();
    return m;
  }
  Vector vector(Index n) { return matrix(n, 1); }
  Matrix symmetric(Index n) {
    const Matrix a = matrix(n, n);
    return 0.5 * (a + a.transpose());
  }
  /// Symmetric positive definite with eigenvalues at least `floor`.
  Matrix spd(Index n, double floor = 0.5) {
    const Matrix a = matrix(n, n);
    return a * a.transpose() + floor * Matrix::Identity(n, n);
  }

 private:
  std::mt19937_64 gen_;
};

// Reference values computed offline with an independent CARE solver and a
// direct Kronecker solve of the regulator equations.

inline const double kJ2Disturbance = -2.2016023420636796e-05;
inline const double kJ2s = 0.0003370569919140211;

/// Q = 0.05 I, R = 10 I, exosystem frequencies 0.1..0.4.
inline Matrix paper_P_star() {
  Matrix p(6, 6);
  p << 2.705834170301e-01, -3.781896175420e-08, 0, 7.071305259219e-01, 3.991858275722e-03, 0,
      -3.781896175420e-08, 2.705769482533e-01, 0, -3.991858270830e-03, 7.070955133980e-01, 0,
      0, 0, 2.705725628148e-01, 0, 0, 7.070951172827e-01,
      7.071305259219e-01, -3.991858270830e-03, 0, 3.826566401966e+00, 2.078165573369e-06, 0,
      3.991858275722e-03, 7.070955133980e-01, 0, 2.078165573369e-06, 3.826474925796e+00, 0,
      0, 0, 7.070951172827e-01, 0, 0, 3.826473878867e+00;
  return p;
}

inline Matrix paper_L_star() {
  Matrix l(3, 8);
  l << -6.092556704391e-02, -3.786647819258e-02, 2.201602342064e-05, 0, 0, 2.201602342064e-05, 0, 0,
      3.786556343039e-02, -6.092557212145e-02, 0, 0, 2.201602342064e-05, 0, 0, 0,
      2.201602342064e-05, 0, -3.071067812827e-02, -7.652947757735e-02, 0, 0, 2.201602342064e-05, 0;
  return l;
}

/// Q = I, R = 0.1 I, exosystem frequencies 1..4.
inline Matrix reconciled_P_star() {
  Matrix p(6, 6);
  p << 1.277676253374e+00, -3.781895011880e-10, 0, 3.162280709366e-01, 1.690712664713e-04, 0,
      -3.781895011880e-10, 1.277675979408e+00, 0, -1.690712664710e-04, 3.162277208198e-01, 0,
      0, 0, 1.277675740849e+00, 0, 0, 3.162276493769e-01,
      3.162280709366e-01, -1.690712664710e-04, 0, 4.040366495498e-01, 1.822270391224e-08, 0,
      1.690712664713e-04, 3.162277208198e-01, 0, 1.822270391224e-08, 4.040365629146e-01, 0,
      0, 0, 3.162276493769e-01, 0, 0, 4.040365452225e-01;
  return p;
}

inline Matrix reconciled_L_star() {
  Matrix l(3, 8);
  l << -2.164437389964e+00, -4.038675782834e+00, 2.201602342064e-05, 0, 0, 2.201602342064e-05, 0, 0,
      4.038674916481e+00, -2.164437390425e+00, 0, 0, 2.201602342064e-05, 0, 0, 0,
      2.201602342064e-05, 0, 8.377223398314e-01, -8.080730904451e+00, 0, 0, 2.201602342064e-05, 0;
  return l;
}

/// Feedforward gain as printed alongside the docking results (zeros elsewhere).
inline Matrix published_L_star() {
  Matrix l = Matrix::Zero(3, 8);
  l(0, 0) = -2.1644;
  l(0, 1) = -4.0387;
  l(1, 0) = 4.0387;
  l(1, 1) = -2.1644;
  l(2, 2) = 0.8377;
  l(2, 3) = -8.0807;
  return l;
}

}  // namespace adpdock::testing
