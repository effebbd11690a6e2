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
#include <iosfwd>
#include <string>
#include <vector>

#include "adpdock/matops.hpp"
#include "adpdock/sysmodels.hpp"

namespace adpdock {

/// Every knob of a docking experiment. Defaults reproduce the published
/// scenario parameters.
struct ExperimentConfig {
  CwParams orbit;
  std::vector<double> exo_frequencies = kDefaultExoFrequencies;
  double disturbance_gain = 1.0;
  /// Empty means [1, 0, 1, 0, ...].
  Vector v0;
  /// Empty means zero.
  Vector x0;

  Matrix Q = 0.05 * Matrix::Identity(6, 6);
  Matrix R = 10.0 * Matrix::Identity(3, 3);
  Matrix Qbar = Matrix::Identity(6, 6);
  Matrix Rbar = Matrix::Identity(3, 3);

  Index noise_terms = 10;
  double noise_amplitude = 0.1;
  double noise_freq_min = 0.1;
  double noise_freq_max = 10.0;
  /// Behavior-policy gain; empty means zero.
  Matrix K0;

  double horizon = 25.0;
  double dt = 1e-3;
  double sample_interval = 0.1;

  double tolerance = 1e-3;
  std::int64_t max_iterations = 200000;
  double step_scale = 1.0;
  double ball_base = 10.0;
  double ball_slope = 10.0;
  /// Empty means identity.
  Matrix P0;

  double eval_horizon = 25.0;
  double gain_tolerance = 1e-2;
  double tracking_ratio = 1e-2;
  bool skip_assumption_check = false;

  std::uint64_t seed = 42;
  std::string output_dir;
  /// Trajectory CSVs keep every csv_stride-th integration sample.
  Index csv_stride = 10;

  /// Throws std::invalid_argument for non-positive schedule or tolerance values.
  void validate() const;
};

/// Reads an INI-style file: [section] headers and `key = value` lines.
/// Matrices accept a scalar (times identity), a comma list (diagonal) or
/// `;`-separated rows of comma-separated entries.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Renders a config in the format accepted by parse_config.
void write_config(std::ostream& out, const ExperimentConfig& config);

/// Parses the matrix notation described above into a rows x cols matrix.
Matrix parse_matrix(const std::string& text, Index rows, Index cols);
std::vector<double> parse_list(const std::string& text);

}  // namespace adpdock
