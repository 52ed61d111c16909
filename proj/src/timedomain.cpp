#include "starkloop/timedomain.hpp"

#include <cmath>
#include <string>

#include "starkloop/errors.hpp"
#include "starkloop/liouville.hpp"

namespace starkloop {

void IntegrationWindow::validate() const {
  if (burn_in_periods <= 0 || eval_periods <= 0 || samples_per_period <= 0)
    throw DomainError("integration window fields must be positive");
}

Mat4 ground_state() {
  Mat4 rho = Mat4::Zero();
  rho(0, 0) = 1.0;
  return rho;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

struct MasterRhs {
  Mat4 h0, hplus, hminus;
  JumpOperatorSet jumps;
  double omega;
  double phi_s;

  Mat4 operator()(double t, const Mat4& rho) const {
    const Complex e = std::exp(kImag * (omega * t + phi_s));
    const Mat4 h = h0 + hplus * e + hminus * std::conj(e);
    return lindblad_rhs(h, jumps, rho);
  }
};

double error_norm(const Mat4& err, const Mat4& y0, const Mat4& y1, double atol, double rtol) {
  double sum = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const double scale = atol + rtol * std::max(std::abs(y0(r, c)), std::abs(y1(r, c)));
      const double e = std::abs(err(r, c)) / scale;
      sum += e * e;
    }
  return std::sqrt(sum / 16.0);
}

class Dopri5 {
 public:
  Dopri5(MasterRhs rhs, const Mat4& y0, double t0, const IntegratorOptions& opts)
      : rhs_(std::move(rhs)), y_(y0), t_(t0), opts_(opts) {
    k1_ = rhs_(t_, y_);
    h_ = 1e-3 * 2.0 * kPi / rhs_.omega;
  }

  // Advances to t_target exactly (FSAL stepping with error control).
  void advance_to(double t_target) {
    const double h_min = 1e-13 * 2.0 * kPi / rhs_.omega;
    while (t_ < t_target) {
      double h = std::min(h_, t_target - t_);
      const Mat4 k2 = rhs_(t_ + kC2 * h, y_ + h * (kA21 * k1_));
      const Mat4 k3 = rhs_(t_ + kC3 * h, y_ + h * (kA31 * k1_ + kA32 * k2));
      const Mat4 k4 = rhs_(t_ + kC4 * h, y_ + h * (kA41 * k1_ + kA42 * k2 + kA43 * k3));
      const Mat4 k5 = rhs_(t_ + kC5 * h, y_ + h * (kA51 * k1_ + kA52 * k2 + kA53 * k3 + kA54 * k4));
      const Mat4 k6 =
          rhs_(t_ + h, y_ + h * (kA61 * k1_ + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
      const Mat4 y_new = y_ + h * (kB1 * k1_ + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
      const Mat4 k7 = rhs_(t_ + h, y_new);
      const Mat4 err =
          h * (kE1 * k1_ + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
      const double norm = error_norm(err, y_, y_new, opts_.abs_tol, opts_.rel_tol);
      if (norm <= 1.0) {
        t_ += h;
        y_ = y_new;
        k1_ = k7;
        const double grow = norm == 0.0 ? 5.0 : 0.9 * std::pow(norm, -0.2);
        h_ = h * std::min(5.0, std::max(0.2, grow));
      } else {
        h_ = h * std::max(0.2, 0.9 * std::pow(norm, -0.2));
        if (h_ < h_min)
          throw IntegrationError("step size underflow at t = " + std::to_string(t_) +
                                 " (error norm " + std::to_string(norm) + ")");
      }
    }
  }

  const Mat4& state() const { return y_; }
  double time() const { return t_; }

 private:
  MasterRhs rhs_;
  Mat4 y_;
  Mat4 k1_;
  double t_;
  double h_;
  IntegratorOptions opts_;
};

}  // namespace

Trajectory integrate_master(const OperatingPoint& op, double phi_s, const IntegrationWindow& window,
                            const Mat4& rho0, const IntegratorOptions& opts) {
  op.validate();
  window.validate();
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("rho0 must be Hermitian");
  if (std::abs(rho0.trace() - 1.0) > 1e-12) throw DomainError("rho0 must have unit trace");
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (rho0 + rho0.adjoint()));
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw DomainError("rho0 must be positive semidefinite");

  const FloquetBlocks fb = build_floquet_blocks(op);
  MasterRhs rhs{fb.h0, fb.hplus, fb.hminus, jump_operators(op.rates), op.omega_s_drive, phi_s};

  const double period = 2.0 * kPi / op.omega_s_drive;
  Dopri5 stepper(rhs, rho0, 0.0, opts);
  stepper.advance_to(window.burn_in_periods * period);

  const int samples = window.eval_periods * window.samples_per_period;
  const double t0 = window.burn_in_periods * period;
  const double dt = period / window.samples_per_period;

  Trajectory traj;
  traj.omega_s_drive = op.omega_s_drive;
  traj.times.reserve(static_cast<std::size_t>(samples + 1));
  traj.states.reserve(static_cast<std::size_t>(samples + 1));
  traj.times.push_back(stepper.time());
  traj.states.push_back(stepper.state());
  for (int i = 1; i <= samples; ++i) {
    stepper.advance_to(t0 + i * dt);
    traj.times.push_back(stepper.time());
    traj.states.push_back(stepper.state());
  }

  double drift = 0.0;
  for (const Mat4& rho : traj.states)
    drift = std::max(drift, std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag()));
  if (drift > 1e-8)
    throw IntegrationError("trace drift " + std::to_string(drift) + " exceeds 1e-8");
  return traj;
}

Trajectory integrate_master(const OperatingPoint& op, double phi_s, const IntegrationWindow& window,
                            const IntegratorOptions& opts) {
  return integrate_master(op, phi_s, window, ground_state(), opts);
}

Complex demodulate(const Trajectory& traj, int n) {
  if (traj.times.size() < 2 || traj.times.size() != traj.states.size())
    throw WindowError("trajectory must hold at least two samples");
  const double span = traj.times.back() - traj.times.front();
  const double periods = span * traj.omega_s_drive / (2.0 * kPi);
  if (std::abs(periods - std::round(periods)) > 1e-6 || periods < 0.5)
    throw WindowError("demodulation window spans " + std::to_string(periods) +
                      " periods; an integer count is required");

  auto integrand = [&](std::size_t k) {
    const double t = traj.times[k];
    return traj.states[k](1, 0) * std::exp(-kImag * (static_cast<double>(n) * traj.omega_s_drive * t));
  };
  Complex acc = 0.0;
  Complex prev = integrand(0);
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    const Complex cur = integrand(k);
    acc += 0.5 * (prev + cur) * (traj.times[k] - traj.times[k - 1]);
    prev = cur;
  }
  return acc / span;
}

}  // namespace starkloop
