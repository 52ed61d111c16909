#pragma once

#include "starkloop/types.hpp"

namespace starkloop {

// Static-bias configuration of the near-degenerate upper pair. All angular
// frequencies are in units of the probe decay rate; hbar defaults to 1 in
// code units.
struct StarkConfig {
  double delta34 = 3.0;  // bare splitting omega3 - omega4, > 0
  double dipole_z = 1.0; // |mu34_z| >= 0
  double bias = 0.0;     // static field E_z >= 0
  double hbar = 1.0;

  double beta() const { return 2.0 * bias * dipole_z / (hbar * delta34); }
  void validate() const;
};

struct DissipationRates {
  double gamma21 = 1.0;  // probe-transition decay, fixes the rate unit
  double gamma32 = 0.01;
  double gamma42 = 0.01;
  double deph3 = 0.01;   // pure dephasing on the upper Stark states
  double deph4 = 0.01;

  void validate() const;
};

// Everything needed to define one simulation of the driven four-level system.
struct OperatingPoint {
  double omega_p_rabi = 0.2;
  double omega_c_rabi = 1.0;
  double omega_s_rabi = 0.12;  // underlying signal Rabi scale
  double delta_p = 0.0;
  double delta_c = 0.0;
  double delta_s = 0.0;
  double omega_s_drive = 6.89; // drive frequency, > 0
  double theta = 0.0;          // Stark-mixing angle, in [0, pi/4]
  DissipationRates rates;

  void validate() const;
};

struct EffectiveCouplings {
  double omega23;  // coupling tone onto the upper Stark state
  double omega24;  // bias-enabled leg, vanishes at theta = 0
  double omega34;  // effective signal coupling between the Stark states
};

// Fourier blocks of the rotating-frame Hamiltonian. h0 is Hermitian,
// hminus = hplus^dagger, and hplus has its only nonzero entry at row 2,
// column 4 (1-indexed).
struct FloquetBlocks {
  Mat4 h0;
  Mat4 hplus;
  Mat4 hminus;
};

// theta = atan(beta) / 2, in [0, pi/4). Throws DomainError for negative or
// non-finite beta.
double mixing_angle_from_beta(double beta);

// sqrt(delta34^2 + (2 E_z |mu| / hbar)^2); always >= delta34.
double dressed_splitting(const StarkConfig& cfg);

// d(dressed splitting)/dE_z at the nominal bias: (2|mu|/hbar) sin(2 theta0).
double splitting_slope(const StarkConfig& cfg, double theta0);

EffectiveCouplings effective_couplings(double omega_c, double omega_s, double theta);

FloquetBlocks build_floquet_blocks(const OperatingPoint& op);

// Default operating point used throughout the numerical experiments.
OperatingPoint nominal_point();

// Harder operating point used for convergence stress tests.
OperatingPoint stress_point();

}  // namespace starkloop
