#pragma once

#include "starkloop/config.hpp"
#include "starkloop/results.hpp"

namespace starkloop {

// Each runner takes a finalized config and returns the data tables that back
// one figure or diagnostic of the receiver study.

// Signal-phase sweep: first-harmonic phasor locus and phase-law residuals for
// both the coefficient-rotation route and the explicit re-solve route, plus
// the loop-open null magnitudes at theta = 0.
ResultBundle run_phase_law(const ExperimentConfig& cfg);

// First-harmonic response map m(omega_s) with its local log-log slope and
// detected monotone branch.
ResultBundle run_response_map(const ExperimentConfig& cfg);

// Mixing-angle design landscape: phase/amplitude metrics, weak-coupling
// proxy, joint cost, and the four design angles.
ResultBundle run_theta_sweep(const ExperimentConfig& cfg);

// Monte-Carlo phase and amplitude RMSE versus harmonic SNR under uniform
// bias, with the high-SNR theory curves.
ResultBundle run_rmse_uniform(const ExperimentConfig& cfg);

// Collapse diagnostics under nonuniform bias: per-spread RMSE curves on raw
// and rescaled SNR axes plus the gain/sensitivity table.
ResultBundle run_rmse_nonuniform(const ExperimentConfig& cfg);

// Coherent-gain factor versus the relative nonuniformity level.
ResultBundle run_gain_curve(const ExperimentConfig& cfg);

// Solver validation: truncation-error table, time-domain versus harmonic
// reconstruction overlay, and demodulated-harmonic cross-checks.
ResultBundle run_validate(const ExperimentConfig& cfg);

ResultBundle run_experiment(Experiment e, const ExperimentConfig& cfg);

}  // namespace starkloop
