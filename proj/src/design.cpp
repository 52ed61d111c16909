#include "starkloop/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "starkloop/errors.hpp"
#include "starkloop/pss.hpp"
#include "starkloop/util.hpp"

namespace starkloop {

namespace {

constexpr double kRefineTol = 1e-4;      // golden-section bracket width, radians
constexpr double kFdFraction = 0.02;     // central-difference step as a fraction of the design level
constexpr double kFlatThreshold = 1e-13; // below this the objective counts as identically zero

double magnitude_at(const OperatingPoint& base, double design_level, double theta, int n_max) {
  OperatingPoint op = base;
  op.theta = theta;
  op.omega_s_rabi = design_level;
  return std::abs(probe_harmonic(solve_pss(op, n_max), 1));
}

// Signed d m / d omega_s by central difference.
double slope_at(const OperatingPoint& base, double design_level, double theta, int n_max) {
  const double h = kFdFraction * design_level;
  const double mp = magnitude_at(base, design_level + h, theta, n_max);
  const double mm = magnitude_at(base, design_level - h, theta, n_max);
  return (mp - mm) / (2.0 * h);
}

// Bracket [thetas[i-1], thetas[i+1]] around a grid extremum, clamped to the
// grid ends.
std::pair<double, double> bracket_around(const ThetaSweep& sweep, std::size_t idx) {
  const std::size_t last = sweep.thetas.size() - 1;
  const double lo = sweep.thetas[idx > 0 ? idx - 1 : 0];
  const double hi = sweep.thetas[idx < last ? idx + 1 : last];
  return {lo, hi};
}

std::size_t best_valid_index(const ThetaSweep& sweep, const std::vector<double>& values,
                             bool maximize, const char* what) {
  std::size_t best = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (sweep.failed[i] || !std::isfinite(values[i])) continue;
    if (best == values.size() || (maximize ? values[i] > values[best] : values[i] < values[best]))
      best = i;
  }
  if (best == values.size()) throw DegenerateError(std::string(what) + ": no valid grid points");
  return best;
}

}  // namespace

DesignWeights DesignWeights::normalized() const {
  validate();
  DesignWeights out = *this;
  if (w_phase > 0.0 && w_amp > 0.0) {
    const double sum = w_phase + w_amp;
    out.w_phase /= sum;
    out.w_amp /= sum;
  }
  return out;
}

void DesignWeights::validate() const {
  if (w_phase < 0.0 || w_amp < 0.0) throw DomainError("design weights must be >= 0");
  if (w_phase == 0.0 && w_amp == 0.0) throw DomainError("design weights must not both be zero");
}

std::vector<double> default_theta_grid() { return linspace(0.01, kPi / 4.0 - 0.01, 49); }

ThetaSweep sweep_theta(const OperatingPoint& base, double design_level,
                       std::span<const double> theta_grid, int n_max, int threads) {
  if (theta_grid.size() < 16) throw DomainError("theta grid needs at least 16 points");
  for (double t : theta_grid)
    if (t < 0.0 || t > kPi / 4.0) throw DomainError("theta grid must lie in [0, pi/4]");
  if (!(design_level > 0.0)) throw DomainError("design level must be > 0");

  ThetaSweep sweep;
  sweep.base = base;
  sweep.n_max = n_max;
  sweep.design_level = design_level;
  sweep.thetas.assign(theta_grid.begin(), theta_grid.end());
  const std::size_t n = sweep.thetas.size();
  sweep.m_phi.assign(n, 0.0);
  sweep.m_amp.assign(n, 0.0);
  sweep.s_values.assign(n, 0.0);
  sweep.failed.assign(n, 0);

  parallel_for(static_cast<int>(n), threads, [&](int i) {
    const std::size_t k = static_cast<std::size_t>(i);
    try {
      const double theta = sweep.thetas[k];
      const double m = magnitude_at(base, design_level, theta, n_max);
      const double dm = slope_at(base, design_level, theta, n_max);
      sweep.m_phi[k] = m;
      sweep.m_amp[k] = design_level * std::abs(dm);
      sweep.s_values[k] = m > 0.0 ? design_level / m * dm : 0.0;
    } catch (const Error&) {
      sweep.failed[k] = 1;
      sweep.m_phi[k] = std::numeric_limits<double>::quiet_NaN();
      sweep.m_amp[k] = std::numeric_limits<double>::quiet_NaN();
      sweep.s_values[k] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  return sweep;
}

double theta_phase_star(const ThetaSweep& sweep) {
  const std::size_t idx = best_valid_index(sweep, sweep.m_phi, true, "theta_phase_star");
  if (sweep.m_phi[idx] < kFlatThreshold)
    throw DegenerateError("theta_phase_star: phase metric vanishes on the whole grid");
  const auto [lo, hi] = bracket_around(sweep, idx);
  return golden_section_minimize(
      [&](double theta) { return -magnitude_at(sweep.base, sweep.design_level, theta, sweep.n_max); },
      lo, hi, kRefineTol);
}

double theta_amp_star(const ThetaSweep& sweep) {
  const std::size_t idx = best_valid_index(sweep, sweep.m_amp, true, "theta_amp_star");
  if (sweep.m_amp[idx] < kFlatThreshold)
    throw DegenerateError("theta_amp_star: amplitude metric vanishes on the whole grid");
  const auto [lo, hi] = bracket_around(sweep, idx);
  return golden_section_minimize(
      [&](double theta) {
        return -sweep.design_level * std::abs(slope_at(sweep.base, sweep.design_level, theta, sweep.n_max));
      },
      lo, hi, kRefineTol);
}

std::vector<double> joint_cost(const ThetaSweep& sweep, const DesignWeights& weights, double sigma) {
  const DesignWeights w = weights.normalized();
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
  if (w.w_amp > 0.0) {
    bool any_slope = false;
    for (std::size_t i = 0; i < sweep.s_values.size(); ++i)
      if (!sweep.failed[i] && std::isfinite(sweep.s_values[i]) && sweep.s_values[i] != 0.0)
        any_slope = true;
    if (!any_slope)
      throw DegenerateError("joint_cost: sensitivity vanishes on the whole grid with w_amp > 0");
  }
  std::vector<double> cost(sweep.thetas.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < cost.size(); ++i) {
    if (sweep.failed[i]) continue;
    const double m = sweep.m_phi[i];
    const double s = sweep.s_values[i];
    cost[i] = sigma * sigma / (m * m) * (w.w_phase + (w.w_amp > 0.0 ? w.w_amp / (s * s) : 0.0));
  }
  return cost;
}

double theta_joint_star(const ThetaSweep& sweep, const DesignWeights& weights, double sigma) {
  const DesignWeights w = weights.normalized();
  const std::vector<double> cost = joint_cost(sweep, w, sigma);
  const std::size_t idx = best_valid_index(sweep, cost, false, "theta_joint_star");
  const auto [lo, hi] = bracket_around(sweep, idx);
  return golden_section_minimize(
      [&](double theta) {
        const double m = magnitude_at(sweep.base, sweep.design_level, theta, sweep.n_max);
        double term = w.w_phase;
        if (w.w_amp > 0.0) {
          const double dm = slope_at(sweep.base, sweep.design_level, theta, sweep.n_max);
          const double s = sweep.design_level / m * dm;
          term += w.w_amp / (s * s);
        }
        return sigma * sigma / (m * m) * term;
      },
      lo, hi, kRefineTol);
}

BalancedResult theta_balanced(const ThetaSweep& sweep) {
  const double theta_phi = theta_phase_star(sweep);
  const double theta_amp = theta_amp_star(sweep);
  const double m_phi_star = magnitude_at(sweep.base, sweep.design_level, theta_phi, sweep.n_max);
  const double m_amp_star =
      sweep.design_level * std::abs(slope_at(sweep.base, sweep.design_level, theta_amp, sweep.n_max));

  auto d_phase = [&](double m) { return m_phi_star / m; };
  auto d_amp = [&](double ma) { return m_amp_star / ma; };
  auto gap = [&](double theta) {
    const double m = magnitude_at(sweep.base, sweep.design_level, theta, sweep.n_max);
    const double ma =
        sweep.design_level * std::abs(slope_at(sweep.base, sweep.design_level, theta, sweep.n_max));
    return d_phase(m) - d_amp(ma);
  };

  // Grid minimax of max(D_phase, D_amp).
  std::size_t best = sweep.thetas.size();
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sweep.thetas.size(); ++i) {
    if (sweep.failed[i] || sweep.m_phi[i] <= 0.0 || sweep.m_amp[i] <= 0.0) continue;
    const double v = std::max(d_phase(sweep.m_phi[i]), d_amp(sweep.m_amp[i]));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == sweep.thetas.size())
    throw DegenerateError("theta_balanced: no valid grid points with nonzero metrics");

  // Look for a sign change of D_phase - D_amp adjacent to the grid minimax.
  const std::size_t last = sweep.thetas.size() - 1;
  const std::size_t lo_idx = best > 0 ? best - 1 : 0;
  const std::size_t hi_idx = best < last ? best + 1 : last;
  double a = sweep.thetas[lo_idx];
  double b = sweep.thetas[hi_idx];
  double ga = gap(a);
  double gb = gap(b);
  BalancedResult out;
  if (ga * gb < 0.0) {
    while (b - a > 1e-6) {
      const double mid = 0.5 * (a + b);
      const double gm = gap(mid);
      if (ga * gm <= 0.0) {
        b = mid;
        gb = gm;
      } else {
        a = mid;
        ga = gm;
      }
    }
    out.theta = 0.5 * (a + b);
    out.crossing_found = true;
  } else {
    out.theta = sweep.thetas[best];
    out.crossing_found = false;
  }
  const double m = magnitude_at(sweep.base, sweep.design_level, out.theta, sweep.n_max);
  const double ma =
      sweep.design_level * std::abs(slope_at(sweep.base, sweep.design_level, out.theta, sweep.n_max));
  out.d_phase = d_phase(m);
  out.d_amp = d_amp(ma);
  return out;
}

double perturbative_f(double theta) {
  if (theta < 0.0 || theta > kPi / 4.0) throw DomainError("theta must lie in [0, pi/4]");
  return std::sin(theta) * std::cos(theta) * std::cos(2.0 * theta);
}

PerturbativeSeed perturbative_seed() { return {kPi / 8.0, 1.0}; }

}  // namespace starkloop
