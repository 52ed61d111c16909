#pragma once

#include <vector>

#include "starkloop/liouville.hpp"
#include "starkloop/model.hpp"
#include "starkloop/types.hpp"

namespace starkloop {

// Truncated Fourier coefficients P^(n), n in [-n_max, n_max], of the periodic
// steady state at reference signal phase 0. coeffs[k] holds P^(k - n_max).
struct HarmonicSet {
  int n_max = 0;
  std::vector<Mat4> coeffs;

  const Mat4& coeff(int n) const;
  Mat4& coeff(int n);
};

struct PssSolution {
  HarmonicSet harmonics;
  OperatingPoint op;
  double residual_norm = 0.0;
  double solve_tolerance = 0.0;
};

struct SolveOptions {
  double tolerance = 1e-9;  // max-norm residual gate for interior harmonics
  double phase = 0.0;       // explicit signal phase inserted into the +-1 blocks
};

// Solves the truncated harmonic-balance system: block-tridiagonal in the
// harmonic index, with one redundant row per block replaced by the trace
// constraint for that harmonic. Throws SolverError on a singular system and
// ResidualError if the a-posteriori residual exceeds the tolerance.
PssSolution solve_pss(const OperatingPoint& op, int n_max, const SolveOptions& opts = {});

// Multiplies each coefficient by exp(i n phi_s); magnitudes are unchanged.
HarmonicSet apply_phase(const HarmonicSet& harmonics, double phi_s);

// Probe-coherence element (row 2, column 1) of P^(n).
Complex probe_harmonic(const PssSolution& sol, int n);

// rho(t) = sum_n P^(n) exp(i n (omega_s t + phi_s)).
Mat4 reconstruct_rho(const PssSolution& sol, double t, double phi_s);

// Relative first-harmonic truncation error of the order-n solve against a
// higher-order reference. Requires 1 <= n < n_ref.
double convergence_error(const OperatingPoint& op, int n, int n_ref);

}  // namespace starkloop
