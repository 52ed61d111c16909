#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "starkloop/model.hpp"

namespace starkloop {

enum class Experiment {
  kPhaseLaw,
  kResponseMap,
  kThetaSweep,
  kRmseUniform,
  kRmseNonuniform,
  kGainCurve,
  kValidate,
};

const char* experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);

// Flat key-value experiment configuration. Optional fields have
// experiment-dependent defaults filled in by finalize(); everything else
// defaults to the nominal operating point. Unknown keys are hard errors.
struct ExperimentConfig {
  std::optional<Experiment> experiment;

  // Operating point.
  double omega_p = 0.2;
  double omega_c = 1.0;
  double omega_s_rabi = 0.12;
  double delta_p = 0.0;
  double delta_c = 0.0;
  double delta_s = 0.0;
  double omega_s_drive = 6.89;
  double theta = 0.56;
  double gamma21 = 1.0;
  double gamma32 = 0.01;
  double gamma42 = 0.01;
  double deph3 = 0.01;
  double deph4 = 0.01;

  // Solver and harness.
  int n_max = 3;
  int n_ref = 8;
  std::uint64_t seed = 1;
  int trials = 30000;
  int threads = 0;  // 0 = hardware concurrency
  std::optional<std::string> out_dir;

  // Static-bias scale and nonuniformity.
  std::string detuning = "local";  // "fixed" | "local"
  double delta34 = 3.0;
  double dipole_z = 1.0;
  double hbar = 1.0;
  std::optional<double> beta0;  // default tan(2 theta)
  int node_count = 41;
  std::vector<double> rel_spreads = {0.01, 0.02, 0.05};
  double spread_min = 0.005;
  double spread_max = 0.08;
  int spread_points = 13;

  // Grids.
  std::optional<double> design_level;  // default omega_s_rabi
  int phi_points = 64;
  std::optional<double> omega_s_min;
  std::optional<double> omega_s_max;
  std::optional<int> omega_s_points;
  double theta_min = 0.01;
  std::optional<double> theta_max;  // default pi/4 - 0.01
  int theta_points = 49;
  std::optional<std::vector<double>> snr_grid;

  // Time-domain validation.
  int burn_in_periods = 180;
  int eval_periods = 6;
  int samples_per_period = 400;
  double integrator_tol = 1e-12;

  bool operator==(const ExperimentConfig&) const = default;

  OperatingPoint operating_point() const;
  StarkConfig stark_config() const;

  // Binds the config to an experiment, fills experiment-dependent defaults,
  // and validates every referenced grid. Throws ConfigError naming the field.
  void finalize(Experiment e);
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace starkloop
