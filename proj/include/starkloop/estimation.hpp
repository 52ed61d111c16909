#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "starkloop/model.hpp"
#include "starkloop/types.hpp"

namespace starkloop {

// Circular complex Gaussian noise after demodulation: independent N(0, sigma^2)
// per quadrature, generated deterministically from (seed, draw index).
struct NoiseModel {
  double sigma = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Sampled first-harmonic magnitude versus the signal Rabi scale, with the
// detected strictly monotone branch containing the design level.
struct ResponseMap {
  std::vector<double> omega_grid;
  std::vector<double> magnitudes;
  int branch_lo = 0;  // inclusive grid indices of the monotone branch
  int branch_hi = 0;
  double design_level = 0.0;
};

struct InversionResult {
  double omega_s = 0.0;
  bool clamped = false;  // measurement fell outside the branch range
};

struct RmseCurve {
  std::vector<double> snr_grid;
  std::vector<double> rmse_phase;
  std::vector<double> rmse_amp_rel;
  std::vector<double> theory_phase;
  std::vector<double> theory_amp_rel;
  std::vector<double> clamped_fraction;  // per SNR point
  int trials = 0;
  bool clamp_warning = false;  // > 1% clamped trials at some SNR point
};

// SNR_n = |P21^(n)|^2 / (2 sigma^2); independent of the signal phase.
double snr(double magnitude, const NoiseModel& noise);

// z plus independent per-quadrature Gaussian noise; deterministic per
// (noise.seed, draw_index).
Complex add_noise(Complex z, const NoiseModel& noise, std::uint64_t draw_index);

// phi0 + arg(z_meas / z_ref) / n, defined modulo 2 pi / n. The ratio removes
// any fixed complex gain shared by measurement and reference.
double estimate_phase(Complex z_meas, Complex z_ref, double phi0, int n);

// Solves the periodic steady state at every grid point (all settings except
// omega_s_rabi fixed) and detects the maximal strictly monotone branch
// containing design_level. Throws BranchError when no such branch exists.
ResponseMap build_response_map(const OperatingPoint& op_base, std::span<const double> omega_grid,
                               double design_level, int n_max = 3, int threads = 1);

// Branch detection on externally supplied magnitudes (shared with the
// spatially averaged response maps).
ResponseMap make_response_map(std::vector<double> omega_grid, std::vector<double> magnitudes,
                              double design_level);

// Piecewise-linear magnitude on the branch hull.
double response_magnitude(const ResponseMap& map, double omega_s);

// Local log-log slope d ln m / d ln omega_s via central differences on the
// log-transformed grid values, linearly interpolated inside the branch.
double log_sensitivity(const ResponseMap& map, double omega_s);

// Unique preimage of m_meas on the monotone piecewise-linear interpolant of
// the branch, by bisection to relative tolerance 1e-10. Out-of-range
// measurements are clamped to the nearer branch endpoint and flagged.
InversionResult invert_response(const ResponseMap& map, double m_meas);

// A_S = 2 hbar omega_s / |mu|.
double rabi_to_field(double omega_s, double dipole, double hbar);

// High-SNR laws: 1 / (n sqrt(2 SNR)) and 1 / (|s| sqrt(2 SNR)).
double rmse_phase_theory(int n, double snr_value);
double rmse_amp_theory(double sensitivity, double snr_value);

// Monte-Carlo harness for the harmonic-domain observation model
// z = p_signal e^{i Phi} + eta, with Phi uniform per trial and sigma set from
// each SNR value. Phase errors are wrapped to (-pi, pi]; amplitude estimates
// invert the response map at |z|.
RmseCurve monte_carlo_rmse(const ResponseMap& map, Complex p_signal, double sensitivity,
                           std::span<const double> snr_grid, int trials, std::uint64_t seed,
                           int threads = 1);

}  // namespace starkloop
