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

#include "adpdock/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace adpdock {

namespace {

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const std::string t = boost::trim_copy(s);
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + t + "'");
  }
  if (pos != t.size()) throw std::invalid_argument("not a number: '" + t + "'");
  return v;
}

bool to_bool(const std::string& s) {
  const std::string t = boost::to_lower_copy(boost::trim_copy(s));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

std::string format_list(const Eigen::Ref<const Vector>& v) {
  std::ostringstream s;
  s << std::setprecision(17);
  for (Index i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v(i);
  return s.str();
}

std::string format_matrix(const Matrix& m) {
  std::ostringstream s;
  s << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    if (i) s << "; ";
    for (Index j = 0; j < m.cols(); ++j) s << (j ? ", " : "") << m(i, j);
  }
  return s.str();
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<std::string> parts;
  const std::string t = boost::trim_copy(text);
  if (t.empty()) return {};
  boost::split(parts, t, boost::is_any_of(","));
  std::vector<double> out;
  out.reserve(parts.size());
  for (const auto& p : parts) out.push_back(to_double(p));
  return out;
}

Matrix parse_matrix(const std::string& text, Index rows, Index cols) {
  const std::string t = boost::trim_copy(text);
  if (t.find(';') != std::string::npos) {
    std::vector<std::string> row_text;
    boost::split(row_text, t, boost::is_any_of(";"));
    if (static_cast<Index>(row_text.size()) != rows) {
      throw std::invalid_argument("matrix needs " + std::to_string(rows) + " rows");
    }
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      const auto r = parse_list(row_text[static_cast<std::size_t>(i)]);
      if (static_cast<Index>(r.size()) != cols) {
        throw std::invalid_argument("matrix row needs " + std::to_string(cols) + " entries");
      }
      for (Index j = 0; j < cols; ++j) m(i, j) = r[static_cast<std::size_t>(j)];
    }
    return m;
  }
  const auto values = parse_list(t);
  if (values.size() == 1) return values.front() * Matrix::Identity(rows, cols);
  if (rows == cols && static_cast<Index>(values.size()) == rows) {
    return to_vector(values).asDiagonal();
  }
  throw std::invalid_argument("cannot read a " + std::to_string(rows) + "x" +
                              std::to_string(cols) + " matrix from '" + t + "'");
}

void ExperimentConfig::validate() const {
  orbit.validate();
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be positive");
    }
  };
  positive(horizon, "data horizon");
  positive(dt, "dt");
  positive(sample_interval, "sample_interval");
  positive(tolerance, "tolerance");
  positive(step_scale, "step_scale");
  positive(ball_base, "ball_base");
  positive(eval_horizon, "evaluation horizon");
  positive(gain_tolerance, "gain_tolerance");
  positive(tracking_ratio, "tracking_ratio");
  if (ball_slope <= 0.0) throw std::invalid_argument("ball_slope must be positive");
  if (max_iterations <= 0) throw std::invalid_argument("max_iterations must be positive");
  if (csv_stride <= 0) throw std::invalid_argument("csv_stride must be positive");
  if (noise_terms < 0) throw std::invalid_argument("noise terms must be non-negative");
  if (!(noise_freq_max > noise_freq_min)) {
    throw std::invalid_argument("noise frequency range must be nonempty");
  }
  if (Q.rows() != 6 || Q.cols() != 6 || Qbar.rows() != 6 || Qbar.cols() != 6) {
    throw std::invalid_argument("Q and Qbar must be 6 x 6");
  }
  if (R.rows() != 3 || R.cols() != 3 || Rbar.rows() != 3 || Rbar.cols() != 3) {
    throw std::invalid_argument("R and Rbar must be 3 x 3");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  ExperimentConfig c;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"orbit.mean_motion", [&](const std::string& v) { c.orbit.mean_motion = to_double(v); }},
      {"orbit.r_ref", [&](const std::string& v) { c.orbit.r_ref = to_double(v); }},
      {"orbit.earth_radius", [&](const std::string& v) { c.orbit.earth_radius = to_double(v); }},
      {"orbit.j2", [&](const std::string& v) { c.orbit.j2 = to_double(v); }},
      {"orbit.inclination_deg",
       [&](const std::string& v) { c.orbit.inclination = to_double(v) * std::numbers::pi / 180.0; }},
      {"orbit.include_j2", [&](const std::string& v) { c.orbit.include_j2 = to_bool(v); }},
      {"exosystem.frequencies", [&](const std::string& v) { c.exo_frequencies = parse_list(v); }},
      {"exosystem.disturbance_gain", [&](const std::string& v) { c.disturbance_gain = to_double(v); }},
      {"exosystem.v0", [&](const std::string& v) { c.v0 = to_vector(parse_list(v)); }},
      {"plant.x0", [&](const std::string& v) { c.x0 = to_vector(parse_list(v)); }},
      {"cost.Q", [&](const std::string& v) { c.Q = parse_matrix(v, 6, 6); }},
      {"cost.R", [&](const std::string& v) { c.R = parse_matrix(v, 3, 3); }},
      {"cost.Qbar", [&](const std::string& v) { c.Qbar = parse_matrix(v, 6, 6); }},
      {"cost.Rbar", [&](const std::string& v) { c.Rbar = parse_matrix(v, 3, 3); }},
      {"noise.terms", [&](const std::string& v) { c.noise_terms = static_cast<Index>(to_double(v)); }},
      {"noise.amplitude", [&](const std::string& v) { c.noise_amplitude = to_double(v); }},
      {"noise.freq_min", [&](const std::string& v) { c.noise_freq_min = to_double(v); }},
      {"noise.freq_max", [&](const std::string& v) { c.noise_freq_max = to_double(v); }},
      {"data.horizon", [&](const std::string& v) { c.horizon = to_double(v); }},
      {"data.dt", [&](const std::string& v) { c.dt = to_double(v); }},
      {"data.sample_interval", [&](const std::string& v) { c.sample_interval = to_double(v); }},
      {"data.K0", [&](const std::string& v) { c.K0 = parse_matrix(v, 3, 6); }},
      {"learning.tolerance", [&](const std::string& v) { c.tolerance = to_double(v); }},
      {"learning.max_iterations",
       [&](const std::string& v) { c.max_iterations = static_cast<std::int64_t>(to_double(v)); }},
      {"learning.step_scale", [&](const std::string& v) { c.step_scale = to_double(v); }},
      {"learning.ball_base", [&](const std::string& v) { c.ball_base = to_double(v); }},
      {"learning.ball_slope", [&](const std::string& v) { c.ball_slope = to_double(v); }},
      {"learning.P0", [&](const std::string& v) { c.P0 = parse_matrix(v, 6, 6); }},
      {"evaluation.horizon", [&](const std::string& v) { c.eval_horizon = to_double(v); }},
      {"evaluation.gain_tolerance", [&](const std::string& v) { c.gain_tolerance = to_double(v); }},
      {"evaluation.tracking_ratio", [&](const std::string& v) { c.tracking_ratio = to_double(v); }},
      {"evaluation.skip_assumption_check",
       [&](const std::string& v) { c.skip_assumption_check = to_bool(v); }},
      {"run.seed", [&](const std::string& v) { c.seed = std::stoull(boost::trim_copy(v)); }},
      {"run.output_dir", [&](const std::string& v) { c.output_dir = boost::trim_copy(v); }},
      {"run.csv_stride", [&](const std::string& v) { c.csv_stride = static_cast<Index>(to_double(v)); }},
  };

  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw std::invalid_argument("config: key '" + section + "' must be inside a section");
    }
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const auto it = setters.find(full);
      if (it == setters.end()) throw std::invalid_argument("config: unknown key '" + full + "'");
      try {
        it->second(node.data());
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config: " + full + ": " + e.what());
      }
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << std::setprecision(17) << std::boolalpha;
  out << "[orbit]\n"
      << "mean_motion = " << c.orbit.mean_motion << '\n'
      << "r_ref = " << c.orbit.r_ref << '\n'
      << "earth_radius = " << c.orbit.earth_radius << '\n'
      << "j2 = " << c.orbit.j2 << '\n'
      << "inclination_deg = " << c.orbit.inclination * 180.0 / std::numbers::pi << '\n'
      << "include_j2 = " << c.orbit.include_j2 << "\n\n";
  out << "[exosystem]\n"
      << "frequencies = " << format_list(to_vector(c.exo_frequencies)) << '\n'
      << "disturbance_gain = " << c.disturbance_gain << '\n';
  if (c.v0.size() > 0) out << "v0 = " << format_list(c.v0) << '\n';
  out << '\n';
  if (c.x0.size() > 0) out << "[plant]\nx0 = " << format_list(c.x0) << "\n\n";
  out << "[cost]\n"
      << "Q = " << format_matrix(c.Q) << '\n'
      << "R = " << format_matrix(c.R) << '\n'
      << "Qbar = " << format_matrix(c.Qbar) << '\n'
      << "Rbar = " << format_matrix(c.Rbar) << "\n\n";
  out << "[noise]\n"
      << "terms = " << c.noise_terms << '\n'
      << "amplitude = " << c.noise_amplitude << '\n'
      << "freq_min = " << c.noise_freq_min << '\n'
      << "freq_max = " << c.noise_freq_max << "\n\n";
  out << "[data]\n"
      << "horizon = " << c.horizon << '\n'
      << "dt = " << c.dt << '\n'
      << "sample_interval = " << c.sample_interval << '\n';
  if (c.K0.size() > 0) out << "K0 = " << format_matrix(c.K0) << '\n';
  out << '\n';
  out << "[learning]\n"
      << "tolerance = " << c.tolerance << '\n'
      << "max_iterations = " << c.max_iterations << '\n'
      << "step_scale = " << c.step_scale << '\n'
      << "ball_base = " << c.ball_base << '\n'
      << "ball_slope = " << c.ball_slope << '\n';
  if (c.P0.size() > 0) out << "P0 = " << format_matrix(c.P0) << '\n';
  out << '\n';
  out << "[evaluation]\n"
      << "horizon = " << c.eval_horizon << '\n'
      << "gain_tolerance = " << c.gain_tolerance << '\n'
      << "tracking_ratio = " << c.tracking_ratio << '\n'
      << "skip_assumption_check = " << c.skip_assumption_check << "\n\n";
  out << "[run]\n"
      << "seed = " << c.seed << '\n'
      << "csv_stride = " << c.csv_stride << '\n';
  if (!c.output_dir.empty()) out << "output_dir = " << c.output_dir << '\n';
}

}  // namespace adpdock
