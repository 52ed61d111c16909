#pragma once

#include <vector>

#include "starkloop/model.hpp"
#include "starkloop/types.hpp"

namespace starkloop {

// Sampled density-matrix trajectory over the evaluation window.
struct Trajectory {
  std::vector<double> times;
  std::vector<Mat4> states;
  double omega_s_drive = 0.0;
};

struct IntegrationWindow {
  int burn_in_periods = 180;
  int eval_periods = 6;
  int samples_per_period = 400;

  void validate() const;
};

struct IntegratorOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
};

Mat4 ground_state();

// Integrates d rho/dt = -i [H(t, phi_s), rho] + D[rho] with an adaptive
// embedded Runge-Kutta pair, starting from rho0, and returns the evaluation
// window sampled uniformly after the burn-in. Throws IntegrationError on
// step-size underflow or trace drift beyond 1e-8.
Trajectory integrate_master(const OperatingPoint& op, double phi_s, const IntegrationWindow& window,
                            const Mat4& rho0, const IntegratorOptions& opts = {});

Trajectory integrate_master(const OperatingPoint& op, double phi_s = 0.0,
                            const IntegrationWindow& window = {},
                            const IntegratorOptions& opts = {});

// Synchronous demodulation of the probe coherence rho21(t): the trapezoidal
// approximation of (1/T_int) * integral y(t) exp(-i n omega_s t) dt. The
// trajectory must span an integer number of drive periods.
Complex demodulate(const Trajectory& traj, int n);

}  // namespace starkloop
