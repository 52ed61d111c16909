#include "starkloop/model.hpp"

#include <cmath>

#include "starkloop/errors.hpp"

namespace starkloop {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

}  // namespace

void StarkConfig::validate() const {
  require_finite(delta34, "delta34");
  require_finite(dipole_z, "dipole_z");
  require_finite(bias, "bias");
  require_finite(hbar, "hbar");
  if (delta34 <= 0.0) throw DomainError("delta34 must be > 0");
  if (dipole_z < 0.0) throw DomainError("dipole_z must be >= 0");
  if (bias < 0.0) throw DomainError("bias must be >= 0");
  if (hbar <= 0.0) throw DomainError("hbar must be > 0");
}

void DissipationRates::validate() const {
  require_finite(gamma21, "gamma21");
  require_finite(gamma32, "gamma32");
  require_finite(gamma42, "gamma42");
  require_finite(deph3, "deph3");
  require_finite(deph4, "deph4");
  if (gamma21 <= 0.0) throw DomainError("gamma21 must be > 0");
  if (gamma32 < 0.0 || gamma42 < 0.0 || deph3 < 0.0 || deph4 < 0.0)
    throw DomainError("dissipation rates must be >= 0");
}

void OperatingPoint::validate() const {
  require_finite(omega_p_rabi, "omega_p_rabi");
  require_finite(omega_c_rabi, "omega_c_rabi");
  require_finite(omega_s_rabi, "omega_s_rabi");
  require_finite(delta_p, "delta_p");
  require_finite(delta_c, "delta_c");
  require_finite(delta_s, "delta_s");
  require_finite(omega_s_drive, "omega_s_drive");
  require_finite(theta, "theta");
  if (omega_p_rabi < 0.0 || omega_c_rabi < 0.0 || omega_s_rabi < 0.0)
    throw DomainError("Rabi scales must be >= 0");
  if (omega_s_drive <= 0.0) throw DomainError("omega_s_drive must be > 0");
  if (theta < 0.0 || theta > kPi / 4.0) throw DomainError("theta must lie in [0, pi/4]");
  rates.validate();
}

double mixing_angle_from_beta(double beta) {
  if (!std::isfinite(beta) || beta < 0.0) throw DomainError("beta must be finite and >= 0");
  return 0.5 * std::atan(beta);
}

double dressed_splitting(const StarkConfig& cfg) {
  cfg.validate();
  const double drive = 2.0 * cfg.bias * cfg.dipole_z / cfg.hbar;
  return std::hypot(cfg.delta34, drive);
}

double splitting_slope(const StarkConfig& cfg, double theta0) {
  cfg.validate();
  if (theta0 < 0.0 || theta0 > kPi / 4.0) throw DomainError("theta0 must lie in [0, pi/4]");
  return (2.0 * cfg.dipole_z / cfg.hbar) * std::sin(2.0 * theta0);
}

EffectiveCouplings effective_couplings(double omega_c, double omega_s, double theta) {
  if (theta < 0.0 || theta > kPi / 4.0) throw DomainError("theta must lie in [0, pi/4]");
  return {omega_c * std::cos(theta), omega_c * std::sin(theta), omega_s * std::cos(2.0 * theta)};
}

FloquetBlocks build_floquet_blocks(const OperatingPoint& op) {
  op.validate();
  const EffectiveCouplings c = effective_couplings(op.omega_c_rabi, op.omega_s_rabi, op.theta);

  Mat4 h0 = Mat4::Zero();
  h0(0, 1) = h0(1, 0) = op.omega_p_rabi;
  h0(1, 1) = -op.delta_p;
  h0(1, 2) = h0(2, 1) = c.omega23;
  h0(2, 2) = -(op.delta_p + op.delta_c);
  h0(2, 3) = h0(3, 2) = c.omega34;
  h0(3, 3) = -(op.delta_p + op.delta_c - op.delta_s);

  Mat4 hplus = Mat4::Zero();
  hplus(1, 3) = c.omega24;

  FloquetBlocks blocks;
  blocks.h0 = h0;
  blocks.hplus = hplus;
  blocks.hminus = hplus.adjoint();
  return blocks;
}

OperatingPoint nominal_point() {
  OperatingPoint op;
  op.omega_p_rabi = 0.2;
  op.omega_c_rabi = 1.0;
  op.omega_s_rabi = 0.12;
  op.delta_p = 0.0;
  op.delta_c = 0.0;
  op.delta_s = 0.0;
  op.omega_s_drive = 6.89;
  op.theta = 0.56;
  return op;
}

OperatingPoint stress_point() {
  OperatingPoint op = nominal_point();
  op.omega_c_rabi = 1.6;
  op.omega_s_rabi = 0.25;
  op.delta_p = 0.10;
  op.delta_c = -0.10;
  op.theta = 0.60;
  op.omega_s_drive = 1.0;
  return op;
}

}  // namespace starkloop
