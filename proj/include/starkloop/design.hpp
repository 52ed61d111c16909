#pragma once

#include <span>
#include <vector>

#include "starkloop/model.hpp"
#include "starkloop/types.hpp"

namespace starkloop {

// Relative weighting of squared phase and squared relative-amplitude RMSE in
// the joint design cost. Normalized so the weights sum to 1 when both are
// nonzero.
struct DesignWeights {
  double w_phase = 0.5;
  double w_amp = 0.5;

  DesignWeights normalized() const;
  void validate() const;
};

// Design metrics sampled on a mixing-angle grid at a fixed design signal
// level: m_phi = m(omega_s0, theta), m_amp = omega_s0 |dm/d omega_s|, and the
// signed local log-log slope s.
struct ThetaSweep {
  std::vector<double> thetas;
  std::vector<double> m_phi;
  std::vector<double> m_amp;
  std::vector<double> s_values;
  std::vector<unsigned char> failed;  // per-point solver failures
  double design_level = 0.0;
  OperatingPoint base;
  int n_max = 3;
};

struct BalancedResult {
  double theta = 0.0;
  bool crossing_found = false;
  double d_phase = 0.0;  // degradation factors at the returned angle
  double d_amp = 0.0;
};

std::vector<double> default_theta_grid();

ThetaSweep sweep_theta(const OperatingPoint& base, double design_level,
                       std::span<const double> theta_grid, int n_max = 3, int threads = 1);

// Grid argmax refined by golden-section search on the continuous objective.
double theta_phase_star(const ThetaSweep& sweep);
double theta_amp_star(const ThetaSweep& sweep);

// J(theta) = sigma^2 / m^2 * (w_phase + w_amp / s^2) on the sweep grid.
std::vector<double> joint_cost(const ThetaSweep& sweep, const DesignWeights& weights, double sigma);
double theta_joint_star(const ThetaSweep& sweep, const DesignWeights& weights, double sigma);

// Minimax angle equalizing the fractional phase and amplitude degradations;
// refined by bisection on D_phase - D_amp when an interior crossing exists.
BalancedResult theta_balanced(const ThetaSweep& sweep);

// Weak-coupling angular factor sin(theta) cos(theta) cos(2 theta).
double perturbative_f(double theta);

struct PerturbativeSeed {
  double theta;
  double beta;
};

// (pi/8, 1): the argmax of the weak-coupling factor and its mixing parameter.
PerturbativeSeed perturbative_seed();

}  // namespace starkloop
