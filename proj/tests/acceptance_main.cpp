// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one pass/fail line per criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "starkloop/config.hpp"
#include "starkloop/design.hpp"
#include "starkloop/errors.hpp"
#include "starkloop/estimation.hpp"
#include "starkloop/experiments.hpp"
#include "starkloop/nonuniform.hpp"
#include "starkloop/pss.hpp"
#include "starkloop/results.hpp"
#include "starkloop/rng.hpp"
#include "starkloop/timedomain.hpp"
#include "starkloop/util.hpp"

using namespace starkloop;

namespace {

int g_failures = 0;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] %2d. %-34s %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void info(const std::string& text) {
  std::printf("[INFO]     %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

void criterion_1_phase_law() {
  Stopwatch timer;
  const OperatingPoint op = nominal_point();
  const PssSolution sol0 = solve_pss(op, 3);
  const Complex z0 = probe_harmonic(sol0, 1);
  double worst = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double phi = 2.0 * kPi * k / 64;
    const Complex za = apply_phase(sol0.harmonics, phi).coeff(1)(1, 0);
    SolveOptions opts;
    opts.phase = phi;
    const Complex zr = probe_harmonic(solve_pss(op, 3, opts), 1);
    worst = std::max(worst, std::abs(wrap_to_pi(std::arg(za / z0) - phi)));
    worst = std::max(worst, std::abs(wrap_to_pi(std::arg(zr / z0) - phi)));
  }
  const double secs = timer.seconds();
  report(1, "exact phase law", worst < 1e-10 && secs < 10.0,
         "max wrapped residual " + fmt(worst) + " (tol 1e-10), both routes", secs);
}

void criterion_2_loop_open_null() {
  Stopwatch timer;
  OperatingPoint op = nominal_point();
  op.theta = 0.0;
  const PssSolution sol = solve_pss(op, 3);
  double worst = 0.0;
  for (int n = -3; n <= 3; ++n)
    if (n != 0) worst = std::max(worst, std::abs(probe_harmonic(sol, n)));
  report(2, "loop-open null", worst < 1e-14,
         "max |P21(n!=0)| = " + fmt(worst) + " (tol 1e-14)", timer.seconds());
}

void criterion_3_structural_invariants() {
  Stopwatch timer;
  bool pass = true;
  std::string detail;
  for (const auto& [name, op] : {std::pair<const char*, OperatingPoint>{"nominal", nominal_point()},
                                 {"stress", stress_point()}}) {
    const PssSolution sol = solve_pss(op, 3);
    double trace0 = std::abs(sol.harmonics.coeff(0).trace() - 1.0);
    double trace_n = 0.0, pairing = 0.0;
    for (int n = 1; n <= 3; ++n) {
      trace_n = std::max(trace_n, std::abs(sol.harmonics.coeff(n).trace()));
      pairing = std::max(pairing, (sol.harmonics.coeff(-n) -
                                   Mat4(sol.harmonics.coeff(n).adjoint())).cwiseAbs().maxCoeff());
    }
    double min_eig = 1.0;
    Rng rng(5);
    for (int i = 0; i < 64; ++i) {
      const Mat4 rho = reconstruct_rho(sol, 2.0 * kPi * i / 64 / op.omega_s_drive,
                                       2.0 * kPi * rng.uniform01());
      Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (rho + rho.adjoint()));
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    const bool ok = trace0 < 1e-12 && trace_n < 1e-12 && pairing < 1e-11 &&
                    sol.residual_norm < 1e-10 && min_eig > -1e-8;
    pass = pass && ok;
    detail += std::string(name) + ": tr0 " + fmt(trace0) + ", trn " + fmt(trace_n) + ", pair " +
              fmt(pairing) + ", res " + fmt(sol.residual_norm) + ", eig " + fmt(min_eig) + "; ";
  }
  report(3, "structural invariants", pass, detail, timer.seconds());
}

void criterion_4_time_domain_oracle() {
  Stopwatch timer;
  const IntegrationWindow window{180, 6, 400};
  const IntegratorOptions opts{1e-12, 1e-12};
  bool pass = true;
  std::string detail;
  for (const auto& [name, op] : {std::pair<const char*, OperatingPoint>{"nominal", nominal_point()},
                                 {"stress", stress_point()}}) {
    const Trajectory traj = integrate_master(op, 0.0, window, ground_state(), opts);
    const PssSolution sol = solve_pss(op, 3);
    double worst = 0.0;
    for (int n = 0; n <= 2; ++n) {
      const double rel =
          std::abs(demodulate(traj, n) - probe_harmonic(sol, n)) / std::abs(probe_harmonic(sol, n));
      worst = std::max(worst, rel);
    }
    pass = pass && worst < 1e-6;
    detail += std::string(name) + " max rel " + fmt(worst) + "; ";
  }
  const double secs = timer.seconds();
  pass = pass && secs < 120.0;
  report(4, "time-domain oracle (as stated)", pass, detail + "tol 1e-6, 180-period burn-in", secs);

  // Supplementary (non-gating) demonstration: the stated 180-period window
  // spans only 164 of the slow upper-state relaxation times (rate ~0.012) at
  // the nominal drive frequency and leaves an e^-2 transient. With a burn-in
  // long enough for that mode to die out, the two solvers meet the stated
  // 1e-6 relative tolerance on all three harmonics at the nominal point too.
  Stopwatch timer2;
  const Trajectory settled =
      integrate_master(nominal_point(), 0.0, {2500, 6, 400}, ground_state(), opts);
  const PssSolution sol = solve_pss(nominal_point(), 3);
  double worst = 0.0;
  for (int n = 0; n <= 2; ++n)
    worst = std::max(worst, std::abs(demodulate(settled, n) - probe_harmonic(sol, n)) /
                                std::abs(probe_harmonic(sol, n)));
  info("4 supplementary (2500-period burn-in): nominal max rel over n<=2 is " + fmt(worst) +
       (worst < 1e-6 ? " < 1e-6" : " >= 1e-6") + " (" + fmt(timer2.seconds()) + " s)");
}

void criterion_5_truncation_convergence() {
  Stopwatch timer;
  bool monotone = true;
  double eps2_nom = 0.0, eps3_str = 0.0, eps4_str = 0.0;
  for (const auto& [name, op] : {std::pair<const char*, OperatingPoint>{"nominal", nominal_point()},
                                 {"stress", stress_point()}}) {
    double prev = 1e300;
    for (int n = 1; n <= 6; ++n) {
      const double eps = convergence_error(op, n, 8);
      if (eps > prev * (1.0 + 1e-6) + 1e-15) monotone = false;
      prev = eps;
      if (n == 2 && std::string(name) == "nominal") eps2_nom = eps;
      if (n == 3 && std::string(name) == "stress") eps3_str = eps;
      if (n == 4 && std::string(name) == "stress") eps4_str = eps;
    }
  }
  const bool pass = monotone && eps3_str < 1e-7 && eps4_str < 1e-9 && eps2_nom < 1e-12;
  report(5, "truncation convergence", pass,
         "nonincreasing " + std::string(monotone ? "yes" : "NO") + ", stress eps3 " +
             fmt(eps3_str) + " (<1e-7), eps4 " + fmt(eps4_str) + " (<1e-9), nominal eps2 " +
             fmt(eps2_nom) + " (<1e-12)",
         timer.seconds());
}

struct UniformMc {
  RmseCurve curve;
  double sensitivity = 0.0;
};

UniformMc run_uniform_mc() {
  const OperatingPoint op = nominal_point();
  const ResponseMap map = build_response_map(op, linspace(0.04, 0.24, 81), 0.12, 3, 0);
  OperatingPoint at_design = op;
  at_design.omega_s_rabi = 0.12;
  const Complex p = probe_harmonic(solve_pss(at_design, 3), 1);
  UniformMc out;
  out.sensitivity = log_sensitivity(map, 0.12);
  const std::vector<double> snr_grid = {1e3, 3162.2776601683795, 1e4};
  out.curve = monte_carlo_rmse(map, p, out.sensitivity, snr_grid, 30000, 424242, 0);
  return out;
}

void criteria_6_7_rmse_laws() {
  Stopwatch timer;
  const UniformMc mc = run_uniform_mc();
  double worst_phase = 0.0, worst_amp = 0.0;
  for (std::size_t j = 0; j < mc.curve.snr_grid.size(); ++j) {
    worst_phase =
        std::max(worst_phase, std::abs(mc.curve.rmse_phase[j] / mc.curve.theory_phase[j] - 1.0));
    worst_amp =
        std::max(worst_amp, std::abs(mc.curve.rmse_amp_rel[j] / mc.curve.theory_amp_rel[j] - 1.0));
  }
  const double secs = timer.seconds();
  report(6, "phase RMSE law", worst_phase < 0.05 && secs < 120.0,
         "max |MC/theory - 1| = " + fmt(worst_phase) + " (tol 0.05), 3e4 trials, SNR 1e3..1e4",
         secs);
  report(7, "amplitude RMSE law", worst_amp < 0.10,
         "max |MC/theory - 1| = " + fmt(worst_amp) + " (tol 0.10), measured |s| = " +
             fmt(std::abs(mc.sensitivity)),
         0.0);
}

void criterion_8_perturbative_seed() {
  Stopwatch timer;
  const double argmax =
      golden_section_minimize([](double t) { return -perturbative_f(t); }, 0.0, kPi / 4.0, 1e-9);
  const bool seed_ok = std::abs(argmax - kPi / 8.0) < 1e-6;

  double identity_err = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double theta = kPi / 4.0 * i / 1000.0;
    const double beta = std::tan(2.0 * theta);
    if (!std::isfinite(beta)) continue;
    identity_err = std::max(identity_err,
                            std::abs(perturbative_f(theta) - beta / (2.0 * (1.0 + beta * beta))));
  }

  OperatingPoint weak = nominal_point();
  weak.omega_p_rabi = 0.02;
  weak.omega_c_rabi = 0.05;
  weak.omega_s_rabi = 0.001;
  const auto grid = linspace(0.02, kPi / 4.0 - 0.02, 25);
  const ThetaSweep sweep = sweep_theta(weak, 0.001, grid, 3, 0);
  double max_m = 0.0, max_f = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    max_m = std::max(max_m, sweep.m_phi[i]);
    max_f = std::max(max_f, perturbative_f(grid[i]));
  }
  double shape_err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    shape_err =
        std::max(shape_err, std::abs(sweep.m_phi[i] / max_m - perturbative_f(grid[i]) / max_f));

  report(8, "perturbative seed", seed_ok && identity_err < 1e-12 && shape_err < 0.10,
         "argmax f at pi/8 +- " + fmt(std::abs(argmax - kPi / 8.0)) + ", identity err " +
             fmt(identity_err) + ", weak-drive shape err " + fmt(shape_err) + " (tol 0.10)",
         timer.seconds());
}

void criterion_9_design_landscape() {
  Stopwatch timer;
  const ThetaSweep sweep = sweep_theta(nominal_point(), 0.12, default_theta_grid(), 3, 0);
  const double tp = theta_phase_star(sweep);
  const double ta = theta_amp_star(sweep);
  const BalancedResult bal = theta_balanced(sweep);
  const bool ordering = tp < bal.theta && bal.theta < ta;
  const bool values =
      std::abs(tp - 0.49) < 0.1 && std::abs(bal.theta - 0.56) < 0.1 && std::abs(ta - 0.60) < 0.1;
  const bool crossing = bal.crossing_found && std::abs(bal.d_phase - bal.d_amp) < 1e-3;
  report(9, "design landscape", ordering && values && crossing,
         "theta* = " + fmt(tp) + " / " + fmt(bal.theta) + " / " + fmt(ta) +
             " (target 0.49 / 0.56 / 0.60, tol 0.1), |D_phi - D_A| = " +
             fmt(std::abs(bal.d_phase - bal.d_amp)),
         timer.seconds());
}

void criterion_10_nonuniform_collapse() {
  Stopwatch timer;
  const OperatingPoint base = nominal_point();
  ExperimentConfig cfg;
  cfg.finalize(Experiment::kRmseNonuniform);
  const StarkConfig stark = cfg.stark_config();
  const double beta0 = *cfg.beta0;

  std::vector<BiasDistribution> dists = {discretize_bias(beta0, 0.0, cfg.node_count)};
  for (double s : {0.01, 0.02, 0.05}) dists.push_back(discretize_bias(beta0, s, cfg.node_count));
  const CollapseResult result =
      collapse_study(base, dists, linspace(0.04, 0.24, 81), 0.12, *cfg.snr_grid, 30000, 777, 3,
                     DetuningMode::kLocal, stark, 0);

  const double target_g[3] = {0.32, 0.22, 0.10};
  bool g_decreasing = true, g_factor2 = true;
  std::string g_text;
  for (std::size_t d = 1; d < result.entries.size(); ++d) {
    const double g = result.entries[d].gain;
    if (g >= result.entries[d - 1].gain || g <= 0.0) g_decreasing = false;
    const double ratio = g / target_g[d - 1];
    if (ratio > 2.0 || ratio < 0.5) g_factor2 = false;
    g_text += fmt(g) + (d + 1 < result.entries.size() ? "/" : "");
  }

  bool phase_collapse = true;
  bool amp_collapse = true;
  for (const CollapseEntry& e : result.entries) {
    for (std::size_t j = 0; j < e.snr_eff.size(); ++j) {
      if (e.snr_eff[j] >= 1e3) {
        const double stat = e.curve.rmse_phase[j] * std::sqrt(2.0 * e.snr_eff[j]);
        if (std::abs(stat - 1.0) > 0.10) phase_collapse = false;
      }
      if (e.snr_a_eff[j] >= 1e3) {
        const double stat = e.curve.rmse_amp_rel[j] * std::sqrt(2.0 * e.snr_a_eff[j]);
        if (std::abs(stat - 1.0) > 0.15) amp_collapse = false;
      }
    }
  }

  // Without the slope correction the spread curves must not all collapse onto
  // the uniform one: compare rmse_amp * sqrt(2 snr_eff) between spread and
  // uniform entries at high effective SNR.
  auto g2_stat = [](const CollapseEntry& e) {
    double acc = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < e.snr_eff.size(); ++j)
      if (e.snr_eff[j] >= 1e3) {
        acc += e.curve.rmse_amp_rel[j] * std::sqrt(2.0 * e.snr_eff[j]);
        ++count;
      }
    return acc / count;
  };
  const double uniform_stat = g2_stat(result.entries[0]);
  double max_gap = 0.0;
  for (std::size_t d = 1; d < result.entries.size(); ++d)
    max_gap = std::max(max_gap, std::abs(g2_stat(result.entries[d]) / uniform_stat - 1.0));
  const bool needs_slope = max_gap > 0.15;

  std::string s_text;
  for (const CollapseEntry& e : result.entries) s_text += fmt(e.s_avg) + " ";
  info("10 detail: G = " + g_text + " (target 0.32/0.22/0.10, factor-2 band), s_avg = " + s_text +
       ", no-slope-correction gap " + fmt(max_gap));
  report(10, "nonuniform-bias collapse",
         g_decreasing && g_factor2 && phase_collapse && amp_collapse && needs_slope,
         std::string("G decreasing ") + (g_decreasing ? "yes" : "NO") + ", factor-2 " +
             (g_factor2 ? "yes" : "NO") + ", phase collapse " + (phase_collapse ? "yes" : "NO") +
             ", amp collapse (slope-corrected) " + (amp_collapse ? "yes" : "NO") +
             ", correction necessary " + (needs_slope ? "yes" : "NO"),
         timer.seconds());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_11_determinism() {
  Stopwatch timer;
  bool pass = true;

  ExperimentConfig phase_cfg;
  phase_cfg.phi_points = 16;
  phase_cfg.finalize(Experiment::kPhaseLaw);

  ExperimentConfig rmse_cfg;
  rmse_cfg.trials = 2000;
  rmse_cfg.snr_grid = std::vector<double>{1e2, 1e3, 1e4};
  rmse_cfg.threads = 3;  // thread count must not matter
  rmse_cfg.finalize(Experiment::kRmseUniform);

  const auto tmp = std::filesystem::temp_directory_path();
  for (int which = 0; which < 2; ++which) {
    const ResultBundle a =
        which == 0 ? run_phase_law(phase_cfg) : run_rmse_uniform(rmse_cfg);
    ExperimentConfig again_cfg = which == 0 ? phase_cfg : rmse_cfg;
    again_cfg.threads = 1;
    const ResultBundle b = which == 0 ? run_phase_law(again_cfg) : run_rmse_uniform(again_cfg);
    const auto dir_a = tmp / ("starkloop_accept_a" + std::to_string(which));
    const auto dir_b = tmp / ("starkloop_accept_b" + std::to_string(which));
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    const auto files_a = a.write(dir_a.string());
    const auto files_b = b.write(dir_b.string());
    for (std::size_t i = 0; i + 1 < files_a.size(); ++i)  // manifest carries wall clock
      if (slurp(files_a[i]) != slurp(files_b[i])) pass = false;
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
  }
  report(11, "byte-identical reruns", pass,
         "phase-law and rmse-uniform tables identical across reruns and thread counts",
         timer.seconds());
}

}  // namespace

int main() {
  std::printf("acceptance suite, version %s\n", kVersion);
  criterion_1_phase_law();
  criterion_2_loop_open_null();
  criterion_3_structural_invariants();
  criterion_4_time_domain_oracle();
  criterion_5_truncation_convergence();
  criteria_6_7_rmse_laws();
  criterion_8_perturbative_seed();
  criterion_9_design_landscape();
  criterion_10_nonuniform_collapse();
  criterion_11_determinism();
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
