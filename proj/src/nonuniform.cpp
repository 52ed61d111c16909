#include "starkloop/nonuniform.hpp"

#include <cmath>
#include <string>

#include "starkloop/errors.hpp"
#include "starkloop/pss.hpp"
#include "starkloop/rng.hpp"
#include "starkloop/util.hpp"

namespace starkloop {

namespace {

// Gauss-Hermite nodes/weights for the weight exp(-x^2), via the symmetric
// tridiagonal Jacobi matrix. Weights are returned normalized to sum 1.
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(0.5 * k);
    jacobi(k - 1, k) = off;
    jacobi(k, k - 1) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[static_cast<std::size_t>(i)] = v0 * v0;
  }
}

}  // namespace

BiasDistribution discretize_bias(double beta0, double rel_spread, int node_count) {
  if (!(beta0 > 0.0)) throw DomainError("beta0 must be > 0");
  if (rel_spread < 0.0) throw DomainError("rel_spread must be >= 0");
  BiasDistribution dist;
  dist.beta0 = beta0;
  dist.rel_spread = rel_spread;
  if (rel_spread == 0.0) {
    dist.nodes = {beta0};
    dist.weights = {1.0};
    return dist;
  }
  if (node_count < 3) throw DomainError("node_count must be >= 3");
  std::vector<double> x, w;
  gauss_hermite(node_count, x, w);
  const double sigma = rel_spread * beta0;
  dist.nodes.resize(x.size());
  dist.weights = w;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dist.nodes[i] = beta0 + std::sqrt(2.0) * sigma * x[i];
    if (dist.nodes[i] <= 0.0)
      throw DistributionError("bias node " + std::to_string(i) + " fell at beta = " +
                              std::to_string(dist.nodes[i]) +
                              "; spread too large for the Gaussian-in-beta model");
  }
  return dist;
}

OperatingPoint node_operating_point(const OperatingPoint& base, double beta_node, double beta0,
                                    DetuningMode mode, const std::optional<StarkConfig>& stark) {
  OperatingPoint op = base;
  op.theta = mixing_angle_from_beta(beta_node);
  if (mode == DetuningMode::kLocal) {
    if (!stark)
      throw DomainError("local detuning mode requires a StarkConfig for the splitting scale");
    stark->validate();
    // delta_s follows the local dressed splitting around the nominal bias.
    const double w0 = stark->delta34 * std::hypot(1.0, beta0);
    const double wi = stark->delta34 * std::hypot(1.0, beta_node);
    op.delta_s = base.delta_s + (w0 - wi);
  }
  return op;
}

Complex averaged_first_harmonic(const OperatingPoint& base, const BiasDistribution& dist,
                                double omega_s_rabi, int n_max, DetuningMode mode,
                                const std::optional<StarkConfig>& stark, int threads) {
  const std::size_t n = dist.nodes.size();
  std::vector<Complex> values(n);
  parallel_for(static_cast<int>(n), threads, [&](int i) {
    const std::size_t k = static_cast<std::size_t>(i);
    try {
      OperatingPoint op = node_operating_point(base, dist.nodes[k], dist.beta0, mode, stark);
      op.omega_s_rabi = omega_s_rabi;
      values[k] = probe_harmonic(solve_pss(op, n_max), 1);
    } catch (const Error& e) {
      throw SolverError("bias node " + std::to_string(k) + " (beta = " +
                        std::to_string(dist.nodes[k]) + "): " + e.what());
    }
  });
  Complex avg = 0.0;
  for (std::size_t k = 0; k < n; ++k) avg += dist.weights[k] * values[k];
  return avg;
}

double coherent_gain(Complex avg, Complex reference) {
  const double ref = std::abs(reference);
  if (ref == 0.0) throw UndefinedMetricError("coherent gain undefined for zero reference");
  return std::abs(avg) / ref;
}

AveragedResponse averaged_response_map(const OperatingPoint& base, const BiasDistribution& dist,
                                       std::span<const double> omega_grid, double design_level,
                                       int n_max, DetuningMode mode,
                                       const std::optional<StarkConfig>& stark, int threads) {
  std::vector<double> grid(omega_grid.begin(), omega_grid.end());
  const std::size_t npts = grid.size();
  const std::size_t nodes = dist.nodes.size();
  std::vector<Complex> sums(npts, 0.0);

  // One solve per (grid point, node); flattened for the parallel loop.
  std::vector<Complex> raw(npts * nodes);
  parallel_for(static_cast<int>(npts * nodes), threads, [&](int idx) {
    const std::size_t g = static_cast<std::size_t>(idx) / nodes;
    const std::size_t k = static_cast<std::size_t>(idx) % nodes;
    try {
      OperatingPoint op = node_operating_point(base, dist.nodes[k], dist.beta0, mode, stark);
      op.omega_s_rabi = grid[g];
      raw[static_cast<std::size_t>(idx)] = probe_harmonic(solve_pss(op, n_max), 1);
    } catch (const Error& e) {
      throw SolverError("bias node " + std::to_string(k) + " (beta = " +
                        std::to_string(dist.nodes[k]) + ") at omega_s = " + std::to_string(grid[g]) +
                        ": " + e.what());
    }
  });
  for (std::size_t g = 0; g < npts; ++g)
    for (std::size_t k = 0; k < nodes; ++k) sums[g] += dist.weights[k] * raw[g * nodes + k];

  std::vector<double> mags(npts);
  for (std::size_t g = 0; g < npts; ++g) mags[g] = std::abs(sums[g]);

  AveragedResponse out;
  out.map_avg = make_response_map(std::move(grid), std::move(mags), design_level);
  out.p_bar = averaged_first_harmonic(base, dist, design_level, n_max, mode, stark, threads);
  OperatingPoint ref_op = node_operating_point(base, dist.beta0, dist.beta0, mode, stark);
  ref_op.omega_s_rabi = design_level;
  const Complex ref = probe_harmonic(solve_pss(ref_op, n_max), 1);
  out.gain = coherent_gain(out.p_bar, ref);
  out.s_avg = log_sensitivity(out.map_avg, design_level);
  return out;
}

CollapseResult collapse_study(const OperatingPoint& base, const std::vector<BiasDistribution>& dists,
                              std::span<const double> omega_grid, double design_level,
                              std::span<const double> snr0_grid, int trials, std::uint64_t seed,
                              int n_max, DetuningMode mode, const std::optional<StarkConfig>& stark,
                              int threads) {
  if (dists.empty()) throw DomainError("collapse_study needs at least one distribution");

  CollapseResult result;
  {
    OperatingPoint ref_op =
        node_operating_point(base, dists.front().beta0, dists.front().beta0, mode, stark);
    ref_op.omega_s_rabi = design_level;
    result.p_uniform = probe_harmonic(solve_pss(ref_op, n_max), 1);
  }

  for (std::size_t d = 0; d < dists.size(); ++d) {
    const AveragedResponse avg =
        averaged_response_map(base, dists[d], omega_grid, design_level, n_max, mode, stark, threads);
    CollapseEntry entry;
    entry.rel_spread = dists[d].rel_spread;
    entry.gain = coherent_gain(avg.p_bar, result.p_uniform);
    entry.s_avg = avg.s_avg;
    entry.snr0.assign(snr0_grid.begin(), snr0_grid.end());
    for (double s0 : entry.snr0) {
      entry.snr_eff.push_back(entry.gain * entry.gain * s0);
      entry.snr_a_eff.push_back(entry.s_avg * entry.s_avg * entry.snr_eff.back());
    }
    entry.curve = monte_carlo_rmse(avg.map_avg, avg.p_bar, avg.s_avg, entry.snr_eff, trials,
                                   Rng::derive(seed, 0xD157ull, d), threads);
    result.entries.push_back(std::move(entry));
  }
  return result;
}

}  // namespace starkloop
