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

// dockcli: run, check and compare docking-controller learning experiments.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "adpdock/experiment.hpp"

namespace {

using namespace adpdock;

void print_summary(const ExperimentReport& r) {
  if (r.rank) {
    std::printf("rank: %ld/%ld (%s)\n", static_cast<long>(r.rank->rank),
                static_cast<long>(r.rank->required), r.rank->ok ? "ok" : "deficient");
  }
  if (r.learned) {
    std::printf("learning: %ld iterations, %ld resets\n", static_cast<long>(r.learned->iterations),
                static_cast<long>(r.learned->resets));
  }
  if (r.comparison) {
    const auto& c = *r.comparison;
    std::printf("gain error (max abs): K %.3e  L %.3e  P %.3e  threshold %.1e  %s\n", c.K.max_abs,
                c.L.max_abs, c.P.max_abs, c.threshold, c.passed() ? "PASS" : "FAIL");
  }
  if (r.tracking) {
    const auto& t = *r.tracking;
    std::printf("tracking: |e(T)|/|e(0)| = %.3e  abscissa %.3e  %s\n", t.ratio,
                t.spectral_abscissa, r.tracking_passed() ? "PASS" : "FAIL");
  }
}

ExperimentConfig load(const std::string& path) {
  try {
    return load_config(path);
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << '\n';
    std::exit(stage_exit_code(Stage::kConfig));
  }
}

int run_stage(const ExperimentConfig& config, bool check_only) {
  try {
    const ExperimentReport report = check_only ? run_check(config) : run_experiment(config);
    print_summary(report);
    if (check_only) {
      std::printf("assumptions: %s\n", report.assumptions->all_passed() ? "ok" : "violated");
      return 0;
    }
    const bool ok = report.comparison->passed() && report.tracking_passed();
    return ok ? 0 : kComparisonFailedExitCode;
  } catch (const StageError& e) {
    print_summary(e.partial());
    std::cerr << "stage failed: " << e.what() << '\n';
    return e.exit_code();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn and evaluate spacecraft docking controllers from trajectory data"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "run the full learning pipeline");
  run->add_option("--config", config_path, "scenario config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (overrides run.output_dir)");
  run->add_option("--seed", seed, "exploration-noise seed (overrides run.seed)");

  std::string check_path;
  auto* check = app.add_subcommand("check", "assumption and rank checks only");
  check->add_option("--config", check_path, "scenario config file")->required()->check(CLI::ExistingFile);

  std::string learned_path;
  std::string oracle_path;
  double tolerance = 1e-2;
  auto* compare = app.add_subcommand("compare", "compare learned gains with oracle gains");
  compare->add_option("--learned", learned_path, "learned gains or report JSON")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--oracle", oracle_path, "oracle gains or report JSON")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--tol", tolerance, "max-abs threshold")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    ExperimentConfig config = load(config_path);
    if (out_dir) config.output_dir = *out_dir;
    if (config.output_dir.empty()) config.output_dir = "out";
    if (seed) config.seed = *seed;
    return run_stage(config, false);
  }
  if (*check) {
    ExperimentConfig config = load(check_path);
    config.output_dir.clear();
    return run_stage(config, true);
  }

  try {
    const GainSet learned = load_gains(learned_path, "learned");
    const GainSet oracle = load_gains(oracle_path, "oracle");
    LearnedController lc;
    lc.K = learned.K;
    lc.L = learned.L;
    lc.P = learned.P;
    const GainComparison c = compare_gains(lc, oracle.K, oracle.L, oracle.P, tolerance);
    std::printf("K: max_abs %.17g frob %.17g %s\n", c.K.max_abs, c.K.frob, c.K.passed ? "PASS" : "FAIL");
    std::printf("L: max_abs %.17g frob %.17g %s\n", c.L.max_abs, c.L.frob, c.L.passed ? "PASS" : "FAIL");
    std::printf("P: max_abs %.17g frob %.17g %s\n", c.P.max_abs, c.P.frob, c.P.passed ? "PASS" : "FAIL");
    return c.passed() ? 0 : kComparisonFailedExitCode;
  } catch (const std::exception& e) {
    std::cerr << "compare: " << e.what() << '\n';
    return 2;
  }
}
