#include "starkloop/experiments.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "starkloop/design.hpp"
#include "starkloop/errors.hpp"
#include "starkloop/estimation.hpp"
#include "starkloop/nonuniform.hpp"
#include "starkloop/pss.hpp"
#include "starkloop/timedomain.hpp"
#include "starkloop/util.hpp"

namespace starkloop {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void require_finalized(const ExperimentConfig& cfg, Experiment e) {
  if (!cfg.experiment || *cfg.experiment != e)
    throw ConfigError(std::string("config must be finalized for experiment '") +
                      experiment_name(e) + "'");
}

Provenance make_provenance(const ExperimentConfig& cfg, const OperatingPoint& op, double wall) {
  Provenance p;
  p.version = kVersion;
  p.seed = cfg.seed;
  p.wall_seconds = wall;
  p.n_max = cfg.n_max;
  try {
    p.epsilon_n = convergence_error(op, cfg.n_max, cfg.n_max + 3);
  } catch (const Error&) {
    p.epsilon_n = kNaN;  // reference harmonic vanishes (open loop)
  }
  return p;
}

DetuningMode detuning_mode(const ExperimentConfig& cfg) {
  return cfg.detuning == "local" ? DetuningMode::kLocal : DetuningMode::kFixed;
}

std::vector<double> omega_grid_of(const ExperimentConfig& cfg) {
  return linspace(*cfg.omega_s_min, *cfg.omega_s_max, *cfg.omega_s_points);
}

}  // namespace

ResultBundle run_phase_law(const ExperimentConfig& cfg) {
  require_finalized(cfg, Experiment::kPhaseLaw);
  Timer timer;
  const OperatingPoint op = cfg.operating_point();
  const PssSolution sol0 = solve_pss(op, cfg.n_max);
  const Complex z0 = probe_harmonic(sol0, 1);

  DataTable phasor("phasor", {"phi_s", "re_apply", "im_apply", "magnitude", "residual_apply",
                              "re_resolve", "im_resolve", "residual_resolve"});
  for (int i = 0; i < cfg.phi_points; ++i) {
    const double phi = 2.0 * kPi * i / cfg.phi_points;
    const HarmonicSet rotated = apply_phase(sol0.harmonics, phi);
    const Complex za = rotated.coeff(1)(1, 0);
    SolveOptions opts;
    opts.phase = phi;
    const Complex zr = probe_harmonic(solve_pss(op, cfg.n_max, opts), 1);
    const double ra = std::abs(z0) > 0.0 ? std::abs(wrap_to_pi(std::arg(za / z0) - phi)) : kNaN;
    const double rr = std::abs(z0) > 0.0 ? std::abs(wrap_to_pi(std::arg(zr / z0) - phi)) : kNaN;
    phasor.add_row({phi, za.real(), za.imag(), std::abs(za), ra, zr.real(), zr.imag(), rr});
  }

  // Loop-open comparison: the same settings with the mixing angle at zero.
  OperatingPoint open = op;
  open.theta = 0.0;
  const PssSolution sol_open = solve_pss(open, cfg.n_max);
  DataTable null_table("loop_open_null", {"n", "magnitude"});
  for (int n = -cfg.n_max; n <= cfg.n_max; ++n)
    null_table.add_row({static_cast<double>(n), std::abs(probe_harmonic(sol_open, n))});

  ResultBundle bundle;
  bundle.config = cfg;
  bundle.tables = {phasor, null_table};
  bundle.provenance = make_provenance(cfg, op, timer.seconds());
  return bundle;
}

ResultBundle run_response_map(const ExperimentConfig& cfg) {
  require_finalized(cfg, Experiment::kResponseMap);
  Timer timer;
  const OperatingPoint op = cfg.operating_point();
  const std::vector<double> grid = omega_grid_of(cfg);
  const ResponseMap map = build_response_map(op, grid, *cfg.design_level, cfg.n_max, cfg.threads);

  DataTable table("response", {"omega_s_rabi", "magnitude", "log_slope", "on_branch"});
  for (std::size_t i = 0; i < map.omega_grid.size(); ++i) {
    const int idx = static_cast<int>(i);
    const bool on_branch = idx >= map.branch_lo && idx <= map.branch_hi;
    double slope = kNaN;
    if (idx > map.branch_lo && idx < map.branch_hi)
      slope = log_sensitivity(map, map.omega_grid[i]);
    table.add_row({map.omega_grid[i], map.magnitudes[i], slope, on_branch ? 1.0 : 0.0});
  }

  OperatingPoint at_design = op;
  at_design.omega_s_rabi = *cfg.design_level;
  const double m_design = std::abs(probe_harmonic(solve_pss(at_design, cfg.n_max), 1));
  DataTable design("design_point", {"design_level", "magnitude", "log_slope", "branch_lo", "branch_hi"});
  design.add_row({*cfg.design_level, m_design, log_sensitivity(map, *cfg.design_level),
                  map.omega_grid[static_cast<std::size_t>(map.branch_lo)],
                  map.omega_grid[static_cast<std::size_t>(map.branch_hi)]});

  ResultBundle bundle;
  bundle.config = cfg;
  bundle.tables = {table, design};
  bundle.provenance = make_provenance(cfg, op, timer.seconds());
  return bundle;
}

ResultBundle run_theta_sweep(const ExperimentConfig& cfg) {
  require_finalized(cfg, Experiment::kThetaSweep);
  Timer timer;
  const OperatingPoint op = cfg.operating_point();
  const std::vector<double> grid = linspace(cfg.theta_min, *cfg.theta_max, cfg.theta_points);
  const ThetaSweep sweep = sweep_theta(op, *cfg.design_level, grid, cfg.n_max, cfg.threads);

  const DesignWeights equal_weights{0.5, 0.5};
  const std::vector<double> cost = joint_cost(sweep, equal_weights, 1.0);

  DataTable landscape("landscape",
                      {"theta", "m_phi", "m_amp", "log_slope", "f_proxy", "joint_cost", "failed"});
  for (std::size_t i = 0; i < sweep.thetas.size(); ++i)
    landscape.add_row({sweep.thetas[i], sweep.m_phi[i], sweep.m_amp[i], sweep.s_values[i],
                       perturbative_f(sweep.thetas[i]), cost[i],
                       static_cast<double>(sweep.failed[i])});

  const double t_phi = theta_phase_star(sweep);
  const double t_amp = theta_amp_star(sweep);
  const double t_joint = theta_joint_star(sweep, equal_weights, 1.0);
  const BalancedResult bal = theta_balanced(sweep);
  DataTable optima("optima", {"theta_phase_star", "theta_amp_star", "theta_joint_star",
                              "theta_balanced", "crossing_found", "d_phase", "d_amp"});
  optima.add_row({t_phi, t_amp, t_joint, bal.theta, bal.crossing_found ? 1.0 : 0.0, bal.d_phase,
                  bal.d_amp});

  ResultBundle bundle;
  bundle.config = cfg;
  bundle.tables = {landscape, optima};
  bundle.provenance = make_provenance(cfg, op, timer.seconds());
  return bundle;
}

ResultBundle run_rmse_uniform(const ExperimentConfig& cfg) {
  require_finalized(cfg, Experiment::kRmseUniform);
  Timer timer;
  const OperatingPoint op = cfg.operating_point();
  const std::vector<double> grid = omega_grid_of(cfg);
  const ResponseMap map = build_response_map(op, grid, *cfg.design_level, cfg.n_max, cfg.threads);

  OperatingPoint at_design = op;
  at_design.omega_s_rabi = *cfg.design_level;
  const Complex p = probe_harmonic(solve_pss(at_design, cfg.n_max), 1);
  const double s = log_sensitivity(map, *cfg.design_level);

  const RmseCurve curve =
      monte_carlo_rmse(map, p, s, *cfg.snr_grid, cfg.trials, cfg.seed, cfg.threads);

  DataTable rmse("rmse", {"snr", "sigma", "rmse_phase", "theory_phase", "rmse_amp_rel",
                          "theory_amp_rel", "clamped_fraction"});
  for (std::size_t j = 0; j < curve.snr_grid.size(); ++j)
    rmse.add_row({curve.snr_grid[j], std::abs(p) / std::sqrt(2.0 * curve.snr_grid[j]),
                  curve.rmse_phase[j], curve.theory_phase[j], curve.rmse_amp_rel[j],
                  curve.theory_amp_rel[j], curve.clamped_fraction[j]});

  DataTable calibration("calibration", {"magnitude", "log_slope", "clamp_warning"});
  calibration.add_row({std::abs(p), s, curve.clamp_warning ? 1.0 : 0.0});

  ResultBundle bundle;
  bundle.config = cfg;
  bundle.tables = {rmse, calibration};
  bundle.provenance = make_provenance(cfg, op, timer.seconds());
  return bundle;
}

ResultBundle run_rmse_nonuniform(const ExperimentConfig& cfg) {
  require_finalized(cfg, Experiment::kRmseNonuniform);
  Timer timer;
  const OperatingPoint op = cfg.operating_point();
  const StarkConfig stark = cfg.stark_config();
  const DetuningMode mode = detuning_mode(cfg);

  std::vector<BiasDistribution> dists;
  dists.push_back(discretize_bias(*cfg.beta0, 0.0, cfg.node_count));  // uniform benchmark
  for (double s : cfg.rel_spreads) dists.push_back(discretize_bias(*cfg.beta0, s, cfg.node_count));

  const std::vector<double> grid = omega_grid_of(cfg);
  const CollapseResult result =
      collapse_study(op, dists, grid, *cfg.design_level, *cfg.snr_grid, cfg.trials, cfg.seed,
                     cfg.n_max, mode, stark, cfg.threads);

  ResultBundle bundle;
  bundle.config = cfg;

  DataTable gains("gains", {"rel_spread", "gain", "s_avg", "clamp_warning"});
  for (const CollapseEntry& e : result.entries)
    gains.add_row({e.rel_spread, e.gain, e.s_avg, e.curve.clamp_warning ? 1.0 : 0.0});
  bundle.tables.push_back(gains);

  for (std::size_t d = 0; d < result.entries.size(); ++d) {
    const CollapseEntry& e = result.entries[d];
    DataTable table("collapse_" + std::to_string(d),
                    {"rel_spread", "snr0", "snr_eff", "snr_a_eff", "rmse_phase",
                     "theory_phase_eff", "rmse_amp_rel", "theory_amp_eff", "clamped_fraction"});
    for (std::size_t j = 0; j < e.snr0.size(); ++j)
      table.add_row({e.rel_spread, e.snr0[j], e.snr_eff[j], e.snr_a_eff[j], e.curve.rmse_phase[j],
                     e.curve.theory_phase[j], e.curve.rmse_amp_rel[j], e.curve.theory_amp_rel[j],
                     e.curve.clamped_fraction[j]});
    bundle.tables.push_back(table);
  }

  bundle.provenance = make_provenance(cfg, op, timer.seconds());
  return bundle;
}

ResultBundle run_gain_curve(const ExperimentConfig& cfg) {
  require_finalized(cfg, Experiment::kGainCurve);
  Timer timer;
  const OperatingPoint op = cfg.operating_point();
  const StarkConfig stark = cfg.stark_config();
  const DetuningMode mode = detuning_mode(cfg);
  const double beta0 = *cfg.beta0;

  OperatingPoint ref_op = node_operating_point(op, beta0, beta0, mode, stark);
  ref_op.omega_s_rabi = *cfg.design_level;
  const Complex ref = probe_harmonic(solve_pss(ref_op, cfg.n_max), 1);

  const std::vector<double> spreads = logspace(cfg.spread_min, cfg.spread_max, cfg.spread_points);
  DataTable table("gain", {"rel_spread", "gain", "re_avg", "im_avg"});
  for (double s : spreads) {
    const BiasDistribution dist = discretize_bias(beta0, s, cfg.node_count);
    const Complex avg = averaged_first_harmonic(op, dist, *cfg.design_level, cfg.n_max, mode, stark,
                                                cfg.threads);
    table.add_row({s, coherent_gain(avg, ref), avg.real(), avg.imag()});
  }

  ResultBundle bundle;
  bundle.config = cfg;
  bundle.tables = {table};
  bundle.provenance = make_provenance(cfg, op, timer.seconds());
  return bundle;
}

ResultBundle run_validate(const ExperimentConfig& cfg) {
  require_finalized(cfg, Experiment::kValidate);
  Timer timer;
  const OperatingPoint nominal = cfg.operating_point();
  OperatingPoint stress = stress_point();
  stress.rates = nominal.rates;

  DataTable eps("convergence", {"n", "eps_nominal", "eps_stress"});
  const int n_top = std::min(6, cfg.n_ref - 1);
  for (int n = 1; n <= n_top; ++n)
    eps.add_row({static_cast<double>(n), convergence_error(nominal, n, cfg.n_ref),
                 convergence_error(stress, n, cfg.n_ref)});

  const IntegrationWindow window{cfg.burn_in_periods, cfg.eval_periods, cfg.samples_per_period};
  const IntegratorOptions iopts{cfg.integrator_tol, cfg.integrator_tol};

  DataTable overlay("overlay", {"t", "re_timedomain", "im_timedomain", "re_floquet", "im_floquet"});
  DataTable cross("crosscheck", {"point", "n", "re_floquet", "im_floquet", "re_timedomain",
                                 "im_timedomain", "rel_error"});
  const OperatingPoint points[] = {nominal, stress};
  for (int p = 0; p < 2; ++p) {
    const Trajectory traj = integrate_master(points[p], 0.0, window, ground_state(), iopts);
    const PssSolution sol = solve_pss(points[p], cfg.n_max);
    if (p == 0) {
      // Final drive period of the nominal trajectory against the harmonic
      // reconstruction.
      const std::size_t start = traj.times.size() - 1 - cfg.samples_per_period;
      for (std::size_t k = start; k < traj.times.size(); ++k) {
        const Complex td = traj.states[k](1, 0);
        const Complex fl = reconstruct_rho(sol, traj.times[k], 0.0)(1, 0);
        overlay.add_row({traj.times[k], td.real(), td.imag(), fl.real(), fl.imag()});
      }
    }
    for (int n = 0; n <= 2; ++n) {
      const Complex td = demodulate(traj, n);
      const Complex fl = probe_harmonic(sol, n);
      const double denom = std::max(std::abs(fl), 1e-300);
      cross.add_row({static_cast<double>(p), static_cast<double>(n), fl.real(), fl.imag(),
                     td.real(), td.imag(), std::abs(td - fl) / denom});
    }
  }

  ResultBundle bundle;
  bundle.config = cfg;
  bundle.tables = {eps, overlay, cross};
  bundle.provenance = make_provenance(cfg, nominal, timer.seconds());
  return bundle;
}

ResultBundle run_experiment(Experiment e, const ExperimentConfig& cfg) {
  switch (e) {
    case Experiment::kPhaseLaw: return run_phase_law(cfg);
    case Experiment::kResponseMap: return run_response_map(cfg);
    case Experiment::kThetaSweep: return run_theta_sweep(cfg);
    case Experiment::kRmseUniform: return run_rmse_uniform(cfg);
    case Experiment::kRmseNonuniform: return run_rmse_nonuniform(cfg);
    case Experiment::kGainCurve: return run_gain_curve(cfg);
    case Experiment::kValidate: return run_validate(cfg);
  }
  throw Error("unreachable experiment dispatch");
}

}  // namespace starkloop
