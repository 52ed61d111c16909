#include "starkloop/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "starkloop/errors.hpp"
#include "starkloop/pss.hpp"
#include "starkloop/rng.hpp"
#include "starkloop/util.hpp"

namespace starkloop {

void NoiseModel::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be > 0");
}

double snr(double magnitude, const NoiseModel& noise) {
  noise.validate();
  if (magnitude < 0.0) throw DomainError("magnitude must be >= 0");
  return magnitude * magnitude / (2.0 * noise.sigma * noise.sigma);
}

Complex add_noise(Complex z, const NoiseModel& noise, std::uint64_t draw_index) {
  noise.validate();
  Rng rng(Rng::derive(noise.seed, 0x6e6f697365ull, draw_index));
  return z + noise.sigma * Complex(rng.gaussian(), rng.gaussian());
}

double estimate_phase(Complex z_meas, Complex z_ref, double phi0, int n) {
  if (n < 1) throw DomainError("harmonic order must be >= 1");
  if (std::abs(z_meas) == 0.0 || std::abs(z_ref) == 0.0)
    throw EstimatorError("phase estimator requires nonzero measurement and reference phasors");
  // arg of the gain-free ratio, reduced to width 2 pi / n around phi0.
  return phi0 + std::arg(z_meas / z_ref) / static_cast<double>(n);
}

namespace {

// Maximal strictly monotone run of `mags` containing the design level.
void detect_branch(const std::vector<double>& grid, const std::vector<double>& mags,
                   double design_level, int& lo, int& hi) {
  const int n = static_cast<int>(grid.size());
  int best_lo = -1, best_hi = -1;
  int i = 0;
  while (i + 1 < n) {
    const double d0 = mags[static_cast<std::size_t>(i + 1)] - mags[static_cast<std::size_t>(i)];
    if (d0 == 0.0) {
      ++i;
      continue;
    }
    const bool up = d0 > 0.0;
    int j = i + 1;
    while (j + 1 < n) {
      const double d = mags[static_cast<std::size_t>(j + 1)] - mags[static_cast<std::size_t>(j)];
      if (d == 0.0 || (d > 0.0) != up) break;
      ++j;
    }
    // Strictly monotone on grid indices [i, j].
    if (grid[static_cast<std::size_t>(i)] <= design_level &&
        design_level <= grid[static_cast<std::size_t>(j)] &&
        (best_lo < 0 || j - i > best_hi - best_lo)) {
      best_lo = i;
      best_hi = j;
    }
    i = j;
  }
  if (best_lo < 0)
    throw BranchError("no strictly monotone branch of the response map contains the design level " +
                      std::to_string(design_level));
  lo = best_lo;
  hi = best_hi;
}

double interp_magnitude(const ResponseMap& map, double omega) {
  const auto begin = map.omega_grid.begin() + map.branch_lo;
  const auto end = map.omega_grid.begin() + map.branch_hi + 1;
  auto it = std::upper_bound(begin, end, omega);
  int idx = static_cast<int>(it - map.omega_grid.begin()) - 1;
  idx = std::clamp(idx, map.branch_lo, map.branch_hi - 1);
  const double x0 = map.omega_grid[static_cast<std::size_t>(idx)];
  const double x1 = map.omega_grid[static_cast<std::size_t>(idx + 1)];
  const double y0 = map.magnitudes[static_cast<std::size_t>(idx)];
  const double y1 = map.magnitudes[static_cast<std::size_t>(idx + 1)];
  return y0 + (y1 - y0) * (omega - x0) / (x1 - x0);
}

}  // namespace

ResponseMap make_response_map(std::vector<double> omega_grid, std::vector<double> magnitudes,
                              double design_level) {
  if (omega_grid.size() != magnitudes.size())
    throw DimensionError("omega grid and magnitudes differ in length");
  if (omega_grid.size() < 8) throw DomainError("response map grid needs at least 8 points");
  for (std::size_t i = 0; i + 1 < omega_grid.size(); ++i)
    if (!(omega_grid[i] < omega_grid[i + 1]))
      throw DomainError("omega grid must be strictly increasing");
  ResponseMap map;
  map.omega_grid = std::move(omega_grid);
  map.magnitudes = std::move(magnitudes);
  map.design_level = design_level;
  detect_branch(map.omega_grid, map.magnitudes, design_level, map.branch_lo, map.branch_hi);
  return map;
}

ResponseMap build_response_map(const OperatingPoint& op_base, std::span<const double> omega_grid,
                               double design_level, int n_max, int threads) {
  std::vector<double> grid(omega_grid.begin(), omega_grid.end());
  std::vector<double> mags(grid.size());
  parallel_for(static_cast<int>(grid.size()), threads, [&](int i) {
    OperatingPoint op = op_base;
    op.omega_s_rabi = grid[static_cast<std::size_t>(i)];
    mags[static_cast<std::size_t>(i)] = std::abs(probe_harmonic(solve_pss(op, n_max), 1));
  });
  return make_response_map(std::move(grid), std::move(mags), design_level);
}

double response_magnitude(const ResponseMap& map, double omega_s) {
  const double lo = map.omega_grid[static_cast<std::size_t>(map.branch_lo)];
  const double hi = map.omega_grid[static_cast<std::size_t>(map.branch_hi)];
  if (omega_s < lo || omega_s > hi)
    throw RangeError("omega_s " + std::to_string(omega_s) + " outside the branch [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return interp_magnitude(map, omega_s);
}

double log_sensitivity(const ResponseMap& map, double omega_s) {
  const double lo = map.omega_grid[static_cast<std::size_t>(map.branch_lo)];
  const double hi = map.omega_grid[static_cast<std::size_t>(map.branch_hi)];
  if (!(omega_s > lo && omega_s < hi))
    throw RangeError("omega_s " + std::to_string(omega_s) + " is not strictly inside the branch [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");

  // Two-point branch: only one slope is available.
  if (map.branch_hi - map.branch_lo == 1) {
    const double m0 = map.magnitudes[static_cast<std::size_t>(map.branch_lo)];
    const double m1 = map.magnitudes[static_cast<std::size_t>(map.branch_hi)];
    return (std::log(m1) - std::log(m0)) / (std::log(hi) - std::log(lo));
  }

  // Central differences of log m at interior branch points, interpolated
  // linearly in log omega.
  std::vector<double> xs, ss;
  for (int i = map.branch_lo + 1; i < map.branch_hi; ++i) {
    const double num = std::log(map.magnitudes[static_cast<std::size_t>(i + 1)]) -
                       std::log(map.magnitudes[static_cast<std::size_t>(i - 1)]);
    const double den = std::log(map.omega_grid[static_cast<std::size_t>(i + 1)]) -
                       std::log(map.omega_grid[static_cast<std::size_t>(i - 1)]);
    xs.push_back(std::log(map.omega_grid[static_cast<std::size_t>(i)]));
    ss.push_back(num / den);
  }
  const double x = std::log(omega_s);
  if (x <= xs.front()) return ss.front();
  if (x >= xs.back()) return ss.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double w = (x - xs[k]) / (xs[k + 1] - xs[k]);
  return ss[k] + w * (ss[k + 1] - ss[k]);
}

InversionResult invert_response(const ResponseMap& map, double m_meas) {
  const double omega_lo = map.omega_grid[static_cast<std::size_t>(map.branch_lo)];
  const double omega_hi = map.omega_grid[static_cast<std::size_t>(map.branch_hi)];
  const double m_lo = map.magnitudes[static_cast<std::size_t>(map.branch_lo)];
  const double m_hi = map.magnitudes[static_cast<std::size_t>(map.branch_hi)];
  const bool increasing = m_hi > m_lo;
  const double m_min = std::min(m_lo, m_hi);
  const double m_max = std::max(m_lo, m_hi);

  if (m_meas < m_min || m_meas > m_max) {
    const bool below = m_meas < m_min;
    const double omega = (below == increasing) ? omega_lo : omega_hi;
    return {omega, true};
  }

  double a = omega_lo, b = omega_hi;
  // Bisection on the monotone piecewise-linear interpolant.
  while (b - a > 1e-10 * std::max(std::abs(a), std::abs(b))) {
    const double mid = 0.5 * (a + b);
    const double val = interp_magnitude(map, mid);
    if ((val < m_meas) == increasing)
      a = mid;
    else
      b = mid;
  }
  return {0.5 * (a + b), false};
}

double rabi_to_field(double omega_s, double dipole, double hbar) {
  if (!(dipole > 0.0)) throw DomainError("dipole must be > 0");
  return 2.0 * hbar * omega_s / dipole;
}

double rmse_phase_theory(int n, double snr_value) {
  if (n < 1) throw DomainError("harmonic order must be >= 1");
  if (!(snr_value > 0.0)) throw DomainError("snr must be > 0");
  return 1.0 / (static_cast<double>(n) * std::sqrt(2.0 * snr_value));
}

double rmse_amp_theory(double sensitivity, double snr_value) {
  if (sensitivity == 0.0) throw DegenerateError("zero sensitivity: amplitude RMSE law undefined");
  if (!(snr_value > 0.0)) throw DomainError("snr must be > 0");
  return 1.0 / (std::abs(sensitivity) * std::sqrt(2.0 * snr_value));
}

RmseCurve monte_carlo_rmse(const ResponseMap& map, Complex p_signal, double sensitivity,
                           std::span<const double> snr_grid, int trials, std::uint64_t seed,
                           int threads) {
  if (trials < 1000) throw DomainError("monte_carlo_rmse requires at least 1000 trials");
  for (double s : snr_grid)
    if (!(s > 0.0)) throw DomainError("every SNR grid value must be > 0");
  const double r = std::abs(p_signal);
  if (r == 0.0) throw EstimatorError("signal phasor vanishes; nothing to estimate");
  const double omega0 = map.design_level;

  RmseCurve curve;
  curve.trials = trials;
  curve.snr_grid.assign(snr_grid.begin(), snr_grid.end());

  std::vector<double> phase_sq(static_cast<std::size_t>(trials));
  std::vector<double> amp_sq(static_cast<std::size_t>(trials));
  std::vector<unsigned char> clamped(static_cast<std::size_t>(trials));

  for (std::size_t j = 0; j < curve.snr_grid.size(); ++j) {
    const double sigma = r / std::sqrt(2.0 * curve.snr_grid[j]);
    parallel_for(trials, threads, [&, j](int i) {
      Rng rng(Rng::derive(seed, j, static_cast<std::uint64_t>(i)));
      const double phi = 2.0 * kPi * rng.uniform01();
      const Complex z =
          p_signal * std::exp(kImag * phi) + sigma * Complex(rng.gaussian(), rng.gaussian());
      const std::size_t k = static_cast<std::size_t>(i);
      const double phi_hat = estimate_phase(z, p_signal, 0.0, 1);
      const double err = wrap_to_pi(phi_hat - phi);
      phase_sq[k] = err * err;
      const InversionResult inv = invert_response(map, std::abs(z));
      const double rel = (inv.omega_s - omega0) / omega0;
      amp_sq[k] = rel * rel;
      clamped[k] = inv.clamped ? 1 : 0;
    });
    // Reduce in trial order so results are independent of the schedule.
    double sp = 0.0, sa = 0.0;
    long nclamped = 0;
    for (int i = 0; i < trials; ++i) {
      sp += phase_sq[static_cast<std::size_t>(i)];
      sa += amp_sq[static_cast<std::size_t>(i)];
      nclamped += clamped[static_cast<std::size_t>(i)];
    }
    const double frac = static_cast<double>(nclamped) / trials;
    curve.rmse_phase.push_back(std::sqrt(sp / trials));
    curve.rmse_amp_rel.push_back(std::sqrt(sa / trials));
    curve.clamped_fraction.push_back(frac);
    curve.theory_phase.push_back(rmse_phase_theory(1, curve.snr_grid[j]));
    curve.theory_amp_rel.push_back(rmse_amp_theory(sensitivity, curve.snr_grid[j]));
    if (frac > 0.01) curve.clamp_warning = true;
  }
  return curve;
}

}  // namespace starkloop
