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

#include "adpdock/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace adpdock {

using nlohmann::json;

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::kConfig: return "config";
    case Stage::kAssumptions: return "assumptions";
    case Stage::kOracle: return "oracle";
    case Stage::kDataCollection: return "data_collection";
    case Stage::kRank: return "rank";
    case Stage::kConvergence: return "convergence";
    case Stage::kRecovery: return "recovery";
    case Stage::kEvaluation: return "evaluation";
  }
  return "unknown";
}

int stage_exit_code(Stage stage) {
  switch (stage) {
    case Stage::kConfig: return 2;
    case Stage::kAssumptions: return 3;
    case Stage::kRank: return 4;
    case Stage::kConvergence: return 5;
    case Stage::kDataCollection: return 6;
    case Stage::kRecovery: return 7;
    case Stage::kEvaluation: return 8;
    case Stage::kOracle: return 10;
  }
  return 1;
}

StageError::StageError(Stage stage, const std::string& message, ExperimentReport partial)
    : Error(std::string(stage_name(stage)) + ": " + message),
      stage_(stage),
      partial_(std::move(partial)) {}

namespace {

MatrixError matrix_error(const Matrix& a, const Matrix& b, double threshold, const char* name) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string("dimension mismatch in ") + name);
  }
  MatrixError e;
  const Matrix d = a - b;
  e.max_abs = max_abs(d);
  e.frob = frobenius(d);
  e.passed = e.max_abs <= threshold;
  return e;
}

}  // namespace

GainComparison compare_gains(const LearnedController& learned, const Matrix& oracle_K,
                             const Matrix& oracle_L, const Matrix& oracle_P, double threshold) {
  GainComparison c;
  c.threshold = threshold;
  c.K = matrix_error(learned.K, oracle_K, threshold, "K");
  c.L = matrix_error(learned.L, oracle_L, threshold, "L");
  c.P = matrix_error(learned.P, oracle_P, threshold, "P");
  return c;
}

OracleController model_based_oracle(const StateSpaceModel& model, const Exosystem& exo,
                                    const Matrix& Q, const Matrix& R, const Matrix& Qbar,
                                    const Matrix& Rbar) {
  OracleController o;
  const Matrix K0 = stabilizing_gain(model.A, model.B);
  const PolicyIterationResult pi = kleinman_pi(model, Q, R, K0);
  o.P = pi.P;
  o.K = pi.K;
  o.pi_iterations = pi.iterations;
  o.are_residual = are_residual(model, Q, R, o.P);
  o.regulator = solve_regulator_exact(model, exo, Qbar, Rbar);
  o.L = feedforward_gain(o.regulator, o.K);
  return o;
}

TrajectoryLog simulate_closed_loop(const StateSpaceModel& model, const Exosystem& exo,
                                   const Matrix& K, const Matrix& L, const Vector& x0,
                                   double horizon, double dt) {
  auto policy = [&](const Vector& x, const Vector& v, double) -> Vector {
    return -K * x + L * v;
  };
  return simulate(model, exo, policy, x0, 0.0, horizon, dt);
}

TrackingSummary summarize_tracking(const StateSpaceModel& model, const Matrix& K,
                                   const TrajectoryLog& log, double window_length) {
  if (log.size() == 0) throw std::invalid_argument("empty trajectory");
  if (!(window_length > 0.0)) throw std::invalid_argument("window length must be positive");
  TrackingSummary s;
  s.window_length = window_length;
  s.e0 = log.e.col(0).norm();
  s.e_final = log.e.col(log.size() - 1).norm();
  s.ratio = s.e0 > 0.0 ? s.e_final / s.e0 : s.e_final;
  const double t0 = log.times(0);
  for (Index i = 0; i < log.size(); ++i) {
    const auto w = static_cast<std::size_t>(std::floor((log.times(i) - t0) / window_length + 1e-9));
    if (w >= s.window_max.size()) s.window_max.resize(w + 1, 0.0);
    s.window_max[w] = std::max(s.window_max[w], log.e.col(i).norm());
  }
  const Matrix a_cl = model.A - model.B * K;
  s.spectral_abscissa = spectral_abscissa(a_cl);
  s.closed_loop_hurwitz = s.spectral_abscissa < 0.0;
  return s;
}

bool ExperimentReport::tracking_passed() const {
  return tracking && tracking->closed_loop_hurwitz && tracking->ratio <= tracking_threshold;
}

namespace {

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const std::vector<RankTest>& tests) {
  json out = json::array();
  for (const auto& t : tests) {
    out.push_back({{"name", t.name},
                   {"lambda", {t.lambda.real(), t.lambda.imag()}},
                   {"rank", t.rank},
                   {"required", t.required},
                   {"margin", t.margin},
                   {"passed", t.passed()}});
  }
  return out;
}

json to_json(const MatrixError& e) {
  return {{"max_abs", e.max_abs}, {"frob", e.frob}, {"passed", e.passed}};
}

Matrix from_json(const json& j, const char* name) {
  if (!j.is_array()) throw std::invalid_argument(std::string(name) + " must be an array of rows");
  const auto rows = static_cast<Index>(j.size());
  const Index cols = rows ? static_cast<Index>(j.front().size()) : 0;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw std::invalid_argument(std::string(name) + " has ragged rows");
    }
    for (Index c = 0; c < cols; ++c) {
      const json& x = row[static_cast<std::size_t>(c)];
      if (!x.is_number()) throw std::invalid_argument(std::string(name) + " has a non-numeric entry");
      m(i, c) = x.get<double>();
    }
  }
  return m;
}

}  // namespace

std::string report_json(const ExperimentReport& r) {
  json j;
  j["config"] = r.config_text;
  j["status"] = r.failed_stage ? "failed" : "ok";
  if (r.failed_stage) {
    j["failure"] = {{"stage", stage_name(*r.failed_stage)},
                    {"exit_code", stage_exit_code(*r.failed_stage)},
                    {"message", r.failure_message}};
  }
  if (r.assumptions) {
    const auto& a = *r.assumptions;
    j["assumptions"] = {{"stabilizable", a.stabilizable()},
                        {"observable", a.observable()},
                        {"regulator_solvable", a.regulator_solvable()},
                        {"stabilizability", to_json(a.stabilizability)},
                        {"observability", to_json(a.observability)},
                        {"regulator_rank", to_json(a.regulator_rank)}};
  }
  if (r.rank) {
    j["rank"] = {{"rank", r.rank->rank}, {"required", r.rank->required}, {"ok", r.rank->ok}};
  }
  if (r.oracle) {
    const auto& o = *r.oracle;
    j["oracle"] = {{"K", to_json(o.K)},
                   {"L", to_json(o.L)},
                   {"P", to_json(o.P)},
                   {"X", to_json(o.regulator.X)},
                   {"U", to_json(o.regulator.U)},
                   {"pi_iterations", o.pi_iterations},
                   {"are_residual", o.are_residual},
                   {"regulator_residual_dyn", o.regulator.residual_dyn},
                   {"regulator_residual_out", o.regulator.residual_out},
                   {"trace_cost", o.regulator.trace_cost}};
  }
  if (r.learned) {
    const auto& l = *r.learned;
    j["learned"] = {{"K", to_json(l.K)},
                    {"L", to_json(l.L)},
                    {"P", to_json(l.P)},
                    {"iterations", l.iterations},
                    {"resets", l.resets},
                    {"rank", l.rank},
                    {"rank_required", l.rank_required}};
    if (r.learned_regulator) {
      j["learned"]["X"] = to_json(r.learned_regulator->X);
      j["learned"]["U"] = to_json(r.learned_regulator->U);
      j["learned"]["trace_cost"] = r.learned_regulator->trace_cost;
    }
  }
  if (r.recovery) {
    const auto& rec = *r.recovery;
    json block = {{"D_hat", to_json(rec.D_hat)},
                  {"B_hat", to_json(rec.B_hat)},
                  {"D", to_json(r.model.D)},
                  {"B", to_json(r.model.B)},
                  {"D_hat_error", frobenius(rec.D_hat - r.model.D)},
                  {"B_hat_error", frobenius(rec.B_hat - r.model.B)}};
    if (r.learned_regulator) {
      block["residual_dyn"] = r.learned_regulator->residual_dyn;
      block["residual_out"] = r.learned_regulator->residual_out;
    }
    j["recovery"] = std::move(block);
  }
  if (r.comparison) {
    const auto& c = *r.comparison;
    j["gain_errors"] = {{"threshold", c.threshold},
                        {"K", to_json(c.K)},
                        {"L", to_json(c.L)},
                        {"P", to_json(c.P)},
                        {"passed", c.passed()}};
  }
  if (r.tracking) {
    const auto& t = *r.tracking;
    j["tracking"] = {{"e0_norm", t.e0},
                     {"e_final_norm", t.e_final},
                     {"ratio", t.ratio},
                     {"threshold", r.tracking_threshold},
                     {"window_length", t.window_length},
                     {"window_max", t.window_max},
                     {"closed_loop_hurwitz", t.closed_loop_hurwitz},
                     {"spectral_abscissa", t.spectral_abscissa},
                     {"passed", r.tracking_passed()}};
  }
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back(
        {{"stage", c.stage}, {"check", c.check}, {"passed", c.passed}, {"value", c.value}});
  }
  j["checks"] = std::move(checks);
  j["files"] = r.files;
  return j.dump(2) + "\n";
}

std::string gains_json(const GainSet& g) {
  json j = {{"K", to_json(g.K)}, {"L", to_json(g.L)}, {"P", to_json(g.P)}};
  return j.dump(2) + "\n";
}

GainSet load_gains(const std::string& path, const std::string& report_member) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument("'" + path + "': " + e.what());
  }
  if (!report_member.empty() && j.contains(report_member)) j = j[report_member];
  if (!j.is_object() || !j.contains("K") || !j.contains("L")) {
    throw std::invalid_argument("'" + path + "' holds no K and L matrices");
  }
  GainSet g;
  g.K = from_json(j["K"], "K");
  g.L = from_json(j["L"], "L");
  if (j.contains("P")) g.P = from_json(j["P"], "P");
  return g;
}

std::pair<StateSpaceModel, Exosystem> scenario_from_config(const ExperimentConfig& config) {
  auto scenario = build_docking_scenario(config.orbit, config.exo_frequencies,
                                         config.disturbance_gain);
  if (config.v0.size() > 0) {
    if (config.v0.size() != scenario.second.q()) {
      throw std::invalid_argument("v0 must have one entry per exosystem state");
    }
    scenario.second.v0 = config.v0;
  }
  return scenario;
}

Vector initial_state(const ExperimentConfig& config, const StateSpaceModel& model) {
  if (config.x0.size() == 0) return Vector::Zero(model.n());
  if (config.x0.size() != model.n()) throw std::invalid_argument("x0 must have n entries");
  return config.x0;
}

NoiseSpec noise_from_config(const ExperimentConfig& config, Index channels) {
  if (config.noise_terms == 0 || config.noise_amplitude == 0.0) {
    return NoiseSpec::single(channels, 0.0, 1.0, 0.0);
  }
  return NoiseSpec::sinusoids(channels, config.noise_terms, config.noise_amplitude,
                              config.noise_freq_min, config.noise_freq_max, config.seed);
}

ValueIterationOptions learning_options(const ExperimentConfig& config) {
  ValueIterationOptions o = data_driven_defaults();
  o.P0 = config.P0;
  o.tolerance = config.tolerance;
  o.steps = StepSchedule::harmonic(config.step_scale);
  o.balls = BallSchedule::linear(config.ball_base, config.ball_slope);
  o.max_iterations = config.max_iterations;
  return o;
}

namespace {

class Pipeline {
 public:
  explicit Pipeline(const ExperimentConfig& config) : config_(config) {
    ExperimentConfig echo = config;
    echo.output_dir.clear();
    std::ostringstream os;
    write_config(os, echo);
    report_.config_text = os.str();
  }

  ExperimentReport run(bool check_only) {
    try {
      config_.validate();
      std::tie(report_.model, report_.exo) = scenario_from_config(config_);
      x0_ = initial_state(config_, report_.model);
      if (!config_.output_dir.empty()) std::filesystem::create_directories(config_.output_dir);
    } catch (const std::exception& e) {
      fail(Stage::kConfig, e.what());
    }
    const StateSpaceModel& model = report_.model;
    const Exosystem& exo = report_.exo;

    report_.assumptions = check_assumptions(model, exo);
    check(Stage::kAssumptions, "stabilizable", report_.assumptions->stabilizable(), 0.0);
    check(Stage::kAssumptions, "observable", report_.assumptions->observable(), 0.0);
    check(Stage::kAssumptions, "regulator_solvable", report_.assumptions->regulator_solvable(),
          0.0);
    if (!report_.assumptions->all_passed() && !config_.skip_assumption_check) {
      fail(Stage::kAssumptions, "standing assumptions violated (set skip_assumption_check to override)");
    }

    TrajectoryLog data;
    try {
      const Matrix K0 = config_.K0.size() ? config_.K0 : Matrix::Zero(model.m(), model.n());
      data = collect_data(model, exo, K0, noise_from_config(config_, model.m()), x0_,
                          config_.horizon, config_.dt, config_.sample_interval);
      check(Stage::kDataCollection, "finite_log", all_finite(data.x) && all_finite(data.u), 0.0);
      write_trajectory("trajectory_learning.csv", data);
    } catch (const std::exception& e) {
      fail(Stage::kDataCollection, e.what());
    }

    KernelBasis basis;
    std::vector<RegressionBundle> bundles;
    try {
      basis = kernel_basis(model);
      bundles = check_only ? std::vector<RegressionBundle>{assemble_bundle(
                                 data, basis.member(0), 0, config_.R, config_.sample_interval)}
                           : assemble_regression(data, basis, config_.R, config_.sample_interval);
    } catch (const std::exception& e) {
      fail(Stage::kDataCollection, e.what());
    }
    report_.rank = check_rank(bundles.front());
    check(Stage::kRank, "full_column_rank", report_.rank->ok,
          static_cast<double>(report_.rank->rank));
    if (!report_.rank->ok) {
      fail(Stage::kRank, "rank " + std::to_string(report_.rank->rank) + "/" +
                             std::to_string(report_.rank->required) +
                             " (insufficient excitation)");
    }
    if (check_only) return finish();

    try {
      report_.oracle = model_based_oracle(model, exo, config_.Q, config_.R, config_.Qbar,
                                          config_.Rbar);
      const auto& o = *report_.oracle;
      check(Stage::kOracle, "are_residual", o.are_residual <= 1e-8 * (1.0 + frobenius(o.P)),
            o.are_residual);
      check(Stage::kOracle, "regulator_residual",
            std::max(o.regulator.residual_dyn, o.regulator.residual_out) <=
                regulator_tolerance(model),
            std::max(o.regulator.residual_dyn, o.regulator.residual_out));
      write_text("oracle_gains.json", gains_json({o.K, o.L, o.P}));
    } catch (const std::exception& e) {
      fail(Stage::kOracle, e.what());
    }

    LearnedController learned;
    learned.rank_checked = true;
    learned.rank = report_.rank->rank;
    learned.rank_required = report_.rank->required;
    try {
      ValueIterationOptions options = learning_options(config_);
      options.reference = report_.oracle->P;
      DataDrivenViResult vi = vi_learn(bundles.front(), config_.Q, config_.R, options);
      learned.P = std::move(vi.P);
      learned.K = std::move(vi.K);
      learned.iterations = vi.iterations;
      learned.resets = vi.resets;
      learned.history = std::move(vi.history);
    } catch (const NonConvergenceError& e) {
      learned.P = e.last_P();
      learned.iterations = e.iterations();
      learned.history = e.history();
      if (!learned.history.empty()) learned.resets = learned.history.back().resets;
      report_.learned = learned;
      write_history(learned.history);
      fail(Stage::kConvergence, e.what());
    } catch (const std::exception& e) {
      fail(Stage::kConvergence, e.what());
    }
    write_history(learned.history);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(learned.P);
    check(Stage::kConvergence, "P_positive_definite", eig.eigenvalues().minCoeff() > 0.0,
          eig.eigenvalues().minCoeff());
    report_.learned = learned;

    try {
      report_.recovery = recover_model_artifacts(bundles, learned.P, learned.K, config_.R);
      check(Stage::kRecovery, "B_hat_full_rank",
            numerical_rank(report_.recovery->B_hat) == model.m(),
            static_cast<double>(numerical_rank(report_.recovery->B_hat)));
      report_.learned_regulator =
          solve_problem1_datadriven(*report_.recovery, basis, config_.Qbar, config_.Rbar);
      const auto& sol = *report_.learned_regulator;
      check(Stage::kRecovery, "output_residual", sol.residual_out <= regulator_tolerance(model),
            sol.residual_out);
      check(Stage::kRecovery, "recovered_regulator_residual",
            sol.residual_dyn <= 1e-6 * (1.0 + frobenius(report_.recovery->D_hat)),
            sol.residual_dyn);
      learned.L = feedforward_gain(sol, learned.K);
      report_.learned = learned;
      write_text("learned_gains.json", gains_json({learned.K, learned.L, learned.P}));
    } catch (const std::exception& e) {
      fail(Stage::kRecovery, e.what());
    }

    report_.comparison = compare_gains(learned, report_.oracle->K, report_.oracle->L,
                                       report_.oracle->P, config_.gain_tolerance);

    try {
      const TrajectoryLog eval = simulate_closed_loop(model, exo, learned.K, learned.L, x0_,
                                                      config_.eval_horizon, config_.dt);
      write_trajectory("trajectory_eval.csv", eval);
      report_.tracking = summarize_tracking(model, learned.K, eval);
      report_.tracking_threshold = config_.tracking_ratio;
      check(Stage::kEvaluation, "closed_loop_hurwitz", report_.tracking->closed_loop_hurwitz,
            report_.tracking->spectral_abscissa);
      check(Stage::kEvaluation, "tracking_ratio",
            report_.tracking->ratio <= config_.tracking_ratio, report_.tracking->ratio);
    } catch (const std::exception& e) {
      fail(Stage::kEvaluation, e.what());
    }
    return finish();
  }

 private:
  void check(Stage stage, std::string name, bool passed, double value) {
    report_.checks.push_back({stage_name(stage), std::move(name), passed, value});
  }

  [[noreturn]] void fail(Stage stage, const std::string& message) {
    report_.failed_stage = stage;
    report_.failure_message = message;
    try {
      finish();
    } catch (const std::exception&) {
      // The stage error is the more useful diagnostic.
    }
    throw StageError(stage, message, report_);
  }

  ExperimentReport finish() {
    if (!config_.output_dir.empty()) {
      report_.files.push_back("report.json");
      write_file("report.json", report_json(report_));
    }
    return report_;
  }

  void write_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::path(config_.output_dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error("cannot write '" + path.string() + "'");
  }

  void write_text(const std::string& name, const std::string& content) {
    if (config_.output_dir.empty()) return;
    write_file(name, content);
    report_.files.push_back(name);
  }

  void write_trajectory(const std::string& name, const TrajectoryLog& log) {
    if (config_.output_dir.empty()) return;
    TrajectoryLog thin;
    const Index count = (log.size() - 1) / config_.csv_stride + 1;
    thin.times.resize(count);
    thin.x.resize(log.x.rows(), count);
    thin.u.resize(log.u.rows(), count);
    thin.v.resize(log.v.rows(), count);
    thin.e.resize(log.e.rows(), count);
    for (Index i = 0; i < count; ++i) {
      const Index s = i * config_.csv_stride;
      thin.times(i) = log.times(s);
      thin.x.col(i) = log.x.col(s);
      thin.u.col(i) = log.u.col(s);
      thin.v.col(i) = log.v.col(s);
      thin.e.col(i) = log.e.col(s);
    }
    std::ostringstream os;
    write_csv(os, thin);
    write_text(name, os.str());
  }

  void write_history(const ConvergenceHistory& history) {
    if (config_.output_dir.empty() || history_written_) return;
    history_written_ = true;
    std::ostringstream inc;
    write_increment_history_csv(inc, history);
    write_text("convergence.csv", inc.str());
    std::ostringstream err;
    write_error_history_csv(err, history);
    write_text("convergence_error.csv", err.str());
  }

  ExperimentConfig config_;
  ExperimentReport report_;
  Vector x0_;
  bool history_written_ = false;
};

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  return Pipeline(config).run(false);
}

ExperimentReport run_check(const ExperimentConfig& config) { return Pipeline(config).run(true); }

}  // namespace adpdock
