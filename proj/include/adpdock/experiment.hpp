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

#include <optional>
#include <string>
#include <vector>

#include "adpdock/adp.hpp"
#include "adpdock/config.hpp"
#include "adpdock/matops.hpp"
#include "adpdock/regulator.hpp"
#include "adpdock/riccati.hpp"
#include "adpdock/sysmodels.hpp"

namespace adpdock {

enum class Stage {
  kConfig,
  kAssumptions,
  kOracle,
  kDataCollection,
  kRank,
  kConvergence,
  kRecovery,
  kEvaluation,
};

const char* stage_name(Stage stage);
/// Process exit code reported by the CLI for a failure in this stage.
int stage_exit_code(Stage stage);
/// Exit code for a completed run whose gain or tracking comparison failed.
inline constexpr int kComparisonFailedExitCode = 9;

struct MatrixError {
  double max_abs = 0.0;
  double frob = 0.0;
  bool passed = false;
};

struct GainComparison {
  MatrixError K;
  MatrixError L;
  MatrixError P;
  double threshold = 0.0;
  bool passed() const { return K.passed && L.passed && P.passed; }
};

/// Elementwise max and Frobenius norms of learned - oracle for K, L and P.
/// Each passes when its max-abs error is at most threshold. Throws
/// std::invalid_argument on a dimension mismatch.
GainComparison compare_gains(const LearnedController& learned, const Matrix& oracle_K,
                             const Matrix& oracle_L, const Matrix& oracle_P, double threshold);

struct OracleController {
  Matrix K;
  Matrix L;
  Matrix P;
  RegulatorSolution regulator;
  Index pi_iterations = 0;
  double are_residual = 0.0;
};

/// K*, P* from Kleinman PI seeded with a stabilizing gain, and L* = U* + K* X*
/// from the exact regulator solver.
OracleController model_based_oracle(const StateSpaceModel& model, const Exosystem& exo,
                                    const Matrix& Q, const Matrix& R, const Matrix& Qbar,
                                    const Matrix& Rbar);

struct TrackingSummary {
  double e0 = 0.0;
  double e_final = 0.0;
  double ratio = 0.0;
  /// max |e| over consecutive windows of window_length seconds
  std::vector<double> window_max;
  double window_length = 5.0;
  bool closed_loop_hurwitz = false;
  double spectral_abscissa = 0.0;
};

/// Closed-loop run under u = -K x + L v over [0, horizon].
TrajectoryLog simulate_closed_loop(const StateSpaceModel& model, const Exosystem& exo,
                                   const Matrix& K, const Matrix& L, const Vector& x0,
                                   double horizon, double dt);
TrackingSummary summarize_tracking(const StateSpaceModel& model, const Matrix& K,
                                   const TrajectoryLog& log, double window_length = 5.0);

struct StageCheck {
  std::string stage;
  std::string check;
  bool passed = false;
  double value = 0.0;
};

/// Everything a run produced. Fields belonging to stages that did not run are
/// left empty.
struct ExperimentReport {
  std::string config_text;
  StateSpaceModel model;
  Exosystem exo;
  std::optional<AssumptionReport> assumptions;
  std::optional<RankReport> rank;
  std::optional<OracleController> oracle;
  std::optional<LearnedController> learned;
  std::optional<ModelRecovery> recovery;
  std::optional<RegulatorSolution> learned_regulator;
  std::optional<GainComparison> comparison;
  std::optional<TrackingSummary> tracking;
  double tracking_threshold = 0.0;
  std::vector<StageCheck> checks;
  std::vector<std::string> files;
  std::optional<Stage> failed_stage;
  std::string failure_message;

  bool tracking_passed() const;
};

/// Deterministic JSON rendering (no timestamps or absolute paths).
std::string report_json(const ExperimentReport& report);

class StageError : public Error {
 public:
  StageError(Stage stage, const std::string& message, ExperimentReport partial);
  Stage stage() const { return stage_; }
  int exit_code() const { return stage_exit_code(stage_); }
  const ExperimentReport& partial() const { return partial_; }

 private:
  Stage stage_;
  ExperimentReport partial_;
};

/// Full pipeline: assumptions, oracle, data collection, regression assembly,
/// rank check, value iteration, recovery, data-driven regulator solve,
/// feedforward gain, closed-loop evaluation. Writes trajectory_learning.csv,
/// trajectory_eval.csv, convergence.csv, convergence_error.csv,
/// learned_gains.json, oracle_gains.json and report.json into
/// config.output_dir when it is set. On failure, whatever was produced so far
/// is written and StageError is thrown.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Assumption and rank checks only. Throws StageError like run_experiment.
ExperimentReport run_check(const ExperimentConfig& config);

/// Scenario and data generation shared by run_experiment and tests.
std::pair<StateSpaceModel, Exosystem> scenario_from_config(const ExperimentConfig& config);
Vector initial_state(const ExperimentConfig& config, const StateSpaceModel& model);
NoiseSpec noise_from_config(const ExperimentConfig& config, Index channels);
ValueIterationOptions learning_options(const ExperimentConfig& config);

struct GainSet {
  Matrix K;
  Matrix L;
  Matrix P;
};

/// Reads K, L, P from a gains file or from the "learned" / "oracle" member of
/// a report. Throws std::invalid_argument on malformed input.
GainSet load_gains(const std::string& path, const std::string& report_member);
std::string gains_json(const GainSet& gains);

}  // namespace adpdock
