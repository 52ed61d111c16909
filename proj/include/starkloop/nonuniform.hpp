#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "starkloop/estimation.hpp"
#include "starkloop/model.hpp"
#include "starkloop/types.hpp"

namespace starkloop {

// Discretized Gaussian distribution of the local mixing parameter beta,
// produced by Gauss-Hermite quadrature around the nominal beta0.
struct BiasDistribution {
  double beta0 = 0.0;
  double rel_spread = 0.0;  // sigma_beta / beta0
  std::vector<double> nodes;
  std::vector<double> weights;
};

// How the per-node signal detuning follows the local bias.
enum class DetuningMode {
  kFixed,  // delta_s held at its nominal value across nodes
  kLocal,  // delta_s recomputed from the local dressed splitting
};

struct AveragedResponse {
  Complex p_bar;       // spatially averaged first-harmonic coefficient at the design level
  double gain = 0.0;   // |p_bar| / |P21^(1)(beta0)|
  ResponseMap map_avg; // response map of averaged magnitudes
  double s_avg = 0.0;  // log sensitivity of the averaged map at the design level
};

struct CollapseEntry {
  double rel_spread = 0.0;
  double gain = 0.0;
  double s_avg = 0.0;
  std::vector<double> snr0;      // baseline uniform-reference SNR axis
  std::vector<double> snr_eff;   // gain^2 * snr0
  std::vector<double> snr_a_eff; // s_avg^2 * snr_eff
  RmseCurve curve;               // Monte-Carlo RMSE against the effective SNR
};

struct CollapseResult {
  std::vector<CollapseEntry> entries;
  Complex p_uniform;  // uniform reference phasor at the design level
};

// Gauss-Hermite nodes and weights for a Gaussian in beta with mean beta0 and
// standard deviation rel_spread * beta0. rel_spread = 0 yields the single
// node beta0. Throws DistributionError if any node falls at or below zero.
BiasDistribution discretize_bias(double beta0, double rel_spread, int node_count);

// Operating point of one bias node: theta from the local beta and, in local
// mode, delta_s shifted by the local dressed-splitting change.
OperatingPoint node_operating_point(const OperatingPoint& base, double beta_node, double beta0,
                                    DetuningMode mode, const std::optional<StarkConfig>& stark);

// Weighted average sum_i w_i P21^(1)(beta_i) at the given signal level.
Complex averaged_first_harmonic(const OperatingPoint& base, const BiasDistribution& dist,
                                double omega_s_rabi, int n_max = 3,
                                DetuningMode mode = DetuningMode::kFixed,
                                const std::optional<StarkConfig>& stark = std::nullopt,
                                int threads = 1);

// |avg| / |reference|; throws UndefinedMetricError on a vanishing reference.
double coherent_gain(Complex avg, Complex reference);

AveragedResponse averaged_response_map(const OperatingPoint& base, const BiasDistribution& dist,
                                       std::span<const double> omega_grid, double design_level,
                                       int n_max = 3, DetuningMode mode = DetuningMode::kFixed,
                                       const std::optional<StarkConfig>& stark = std::nullopt,
                                       int threads = 1);

// Runs the Monte-Carlo RMSE harness against each averaged response and
// reports the raw and rescaled SNR axes used by the collapse diagnostics.
CollapseResult collapse_study(const OperatingPoint& base, const std::vector<BiasDistribution>& dists,
                              std::span<const double> omega_grid, double design_level,
                              std::span<const double> snr0_grid, int trials, std::uint64_t seed,
                              int n_max = 3, DetuningMode mode = DetuningMode::kFixed,
                              const std::optional<StarkConfig>& stark = std::nullopt,
                              int threads = 1);

}  // namespace starkloop
