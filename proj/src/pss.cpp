#include "starkloop/pss.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "starkloop/errors.hpp"

namespace starkloop {

const Mat4& HarmonicSet::coeff(int n) const {
  if (n < -n_max || n > n_max)
    throw RangeError("harmonic index " + std::to_string(n) + " outside [-" +
                     std::to_string(n_max) + ", " + std::to_string(n_max) + "]");
  return coeffs[static_cast<std::size_t>(n + n_max)];
}

Mat4& HarmonicSet::coeff(int n) {
  return const_cast<Mat4&>(static_cast<const HarmonicSet&>(*this).coeff(n));
}

PssSolution solve_pss(const OperatingPoint& op, int n_max, const SolveOptions& opts) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  op.validate();

  const FloquetBlocks fb = build_floquet_blocks(op);
  const JumpOperatorSet jumps = jump_operators(op.rates);
  const LiouvillianBlocks lb = liouvillian_blocks(fb, jumps);

  const Complex phase = std::exp(kImag * opts.phase);
  const Mat16 lplus = lb.lplus * phase;
  const Mat16 lminus = lb.lminus * std::conj(phase);

  const int blocks = 2 * n_max + 1;
  const int dim = 16 * blocks;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(dim);

  for (int k = 0; k < blocks; ++k) {
    const double n = static_cast<double>(k - n_max);
    a.block<16, 16>(16 * k, 16 * k) =
        Complex(0.0, n * op.omega_s_drive) * Mat16::Identity() - lb.l0;
    if (k > 0) a.block<16, 16>(16 * k, 16 * (k - 1)) = -lplus;
    if (k < blocks - 1) a.block<16, 16>(16 * k, 16 * (k + 1)) = -lminus;
  }

  // The four population rows of each block are linearly dependent through
  // trace preservation; replace the (1,1)-element row by the trace constraint.
  for (int k = 0; k < blocks; ++k) {
    const int row = 16 * k;
    a.row(row).setZero();
    for (int d = 0; d < 4; ++d) a(row, 16 * k + 5 * d) = 1.0;
    b(row) = (k == n_max) ? 1.0 : 0.0;
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const double rcond = lu.rcond();
  // A structurally singular system (non-unique steady state) leaves exact
  // zero pivots that the norm-based estimate can miss.
  double min_pivot = std::numeric_limits<double>::infinity();
  double max_pivot = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double p = std::abs(lu.matrixLU()(i, i));
    min_pivot = std::min(min_pivot, p);
    max_pivot = std::max(max_pivot, p);
  }
  if (!(rcond > 1e-15) || !(min_pivot > 1e-14 * max_pivot))
    throw SolverError("singular constrained harmonic-balance system (rcond = " +
                      std::to_string(rcond) + ", pivot ratio = " +
                      std::to_string(max_pivot > 0.0 ? min_pivot / max_pivot : 0.0) + ")");
  const Eigen::VectorXcd x = lu.solve(b);
  if (!x.allFinite())
    throw SolverError("harmonic-balance solve produced non-finite values (rcond = " +
                      std::to_string(rcond) + ")");

  PssSolution sol;
  sol.op = op;
  sol.solve_tolerance = opts.tolerance;
  sol.harmonics.n_max = n_max;
  sol.harmonics.coeffs.resize(static_cast<std::size_t>(blocks));
  for (int k = 0; k < blocks; ++k)
    sol.harmonics.coeffs[static_cast<std::size_t>(k)] =
        unvec(Vec16(x.segment<16>(16 * k)));

  // A-posteriori residual of the harmonic-balance recursion for interior
  // harmonics, evaluated with the direct commutator/dissipator action. The
  // replaced population rows are covered too, so this also checks the
  // trace-redundancy assumption.
  const Mat4 hplus_ph = fb.hplus * phase;
  const Mat4 hminus_ph = fb.hminus * std::conj(phase);
  double residual = 0.0;
  for (int n = -(n_max - 1); n <= n_max - 1; ++n) {
    const Mat4& pn = sol.harmonics.coeff(n);
    const Mat4& pm = sol.harmonics.coeff(n - 1);
    const Mat4& pp = sol.harmonics.coeff(n + 1);
    Mat4 rhs = lindblad_rhs(fb.h0, jumps, pn);
    rhs += -kImag * (hplus_ph * pm - pm * hplus_ph);
    rhs += -kImag * (hminus_ph * pp - pp * hminus_ph);
    const Mat4 res = Complex(0.0, n * op.omega_s_drive) * pn - rhs;
    residual = std::max(residual, res.cwiseAbs().maxCoeff());
  }
  sol.residual_norm = residual;
  if (residual > opts.tolerance)
    throw ResidualError("harmonic-balance residual " + std::to_string(residual) +
                        " exceeds tolerance " + std::to_string(opts.tolerance));
  return sol;
}

HarmonicSet apply_phase(const HarmonicSet& harmonics, double phi_s) {
  HarmonicSet out = harmonics;
  for (int n = -out.n_max; n <= out.n_max; ++n)
    out.coeff(n) *= std::exp(kImag * (static_cast<double>(n) * phi_s));
  return out;
}

Complex probe_harmonic(const PssSolution& sol, int n) { return sol.harmonics.coeff(n)(1, 0); }

Mat4 reconstruct_rho(const PssSolution& sol, double t, double phi_s) {
  Mat4 rho = Mat4::Zero();
  const double arg = sol.op.omega_s_drive * t + phi_s;
  for (int n = -sol.harmonics.n_max; n <= sol.harmonics.n_max; ++n)
    rho += sol.harmonics.coeff(n) * std::exp(kImag * (static_cast<double>(n) * arg));
  return rho;
}

double convergence_error(const OperatingPoint& op, int n, int n_ref) {
  if (n < 1 || n >= n_ref) throw DomainError("convergence_error requires 1 <= n < n_ref");
  const Complex p_n = probe_harmonic(solve_pss(op, n), 1);
  const Complex p_ref = probe_harmonic(solve_pss(op, n_ref), 1);
  const double denom = std::abs(p_ref);
  if (denom == 0.0)
    throw UndefinedMetricError("reference first harmonic vanishes; relative error undefined");
  return std::abs(p_n - p_ref) / denom;
}

}  // namespace starkloop
