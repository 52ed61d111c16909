#include "starkloop/liouville.hpp"

#include <cmath>

#include "starkloop/errors.hpp"

namespace starkloop {

Vec16 vec(const Mat4& m) {
  Vec16 v;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) v(4 * c + r) = m(r, c);
  return v;
}

Mat4 unvec(const Vec16& v) {
  Mat4 m;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) m(r, c) = v(4 * c + r);
  return m;
}

Eigen::VectorXcd vec_dyn(const Eigen::MatrixXcd& m) {
  Eigen::VectorXcd v(m.size());
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) v(k++) = m(r, c);
  return v;
}

Eigen::MatrixXcd unvec_dyn(const Eigen::VectorXcd& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size())
    throw DimensionError("unvec: vector length " + std::to_string(v.size()) +
                         " is not a perfect square");
  Eigen::MatrixXcd m(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) m(r, c) = v(k++);
  return m;
}

Mat16 kron(const Mat4& a, const Mat4& b) {
  Mat16 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

Vec16 trace_vector() { return vec(Mat4::Identity()); }

JumpOperatorSet jump_operators(const DissipationRates& rates) {
  // Accepts any nonnegative rate set (the gamma21 > 0 convention is enforced
  // at the operating-point level), so an all-zero set maps to no operators.
  for (double r : {rates.gamma21, rates.gamma32, rates.gamma42, rates.deph3, rates.deph4})
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("rates must be finite and >= 0");
  JumpOperatorSet set;
  auto add = [&set](double rate, int row, int col) {
    if (rate == 0.0) return;
    Mat4 op = Mat4::Zero();
    op(row, col) = std::sqrt(rate);
    set.ops.push_back(op);
  };
  add(rates.gamma21, 0, 1);  // |1><2|
  add(rates.gamma32, 1, 2);  // |2><3|
  add(rates.gamma42, 1, 3);  // |2><4|
  add(rates.deph3, 2, 2);    // projector dephasing on the upper Stark states
  add(rates.deph4, 3, 3);
  return set;
}

Mat16 dissipator_super(const JumpOperatorSet& jumps) {
  Mat16 d = Mat16::Zero();
  const Mat4 id = Mat4::Identity();
  for (const Mat4& l : jumps.ops) {
    const Mat4 ldl = l.adjoint() * l;
    d += kron(l.conjugate(), l);
    d -= 0.5 * (kron(id, ldl) + kron(ldl.transpose(), id));
  }
  return d;
}

LiouvillianBlocks liouvillian_blocks(const FloquetBlocks& blocks, const JumpOperatorSet& jumps) {
  const Mat4 id = Mat4::Identity();
  auto commutator_super = [&id](const Mat4& h) -> Mat16 {
    return -kImag * (kron(id, h) - kron(h.transpose(), id));
  };
  LiouvillianBlocks out;
  out.l0 = commutator_super(blocks.h0) + dissipator_super(jumps);
  out.lplus = commutator_super(blocks.hplus);
  out.lminus = commutator_super(blocks.hminus);
  return out;
}

Mat4 dissipator_apply(const JumpOperatorSet& jumps, const Mat4& rho) {
  Mat4 out = Mat4::Zero();
  for (const Mat4& l : jumps.ops) {
    const Mat4 ldl = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

Mat4 lindblad_rhs(const Mat4& hamiltonian, const JumpOperatorSet& jumps, const Mat4& rho) {
  return -kImag * (hamiltonian * rho - rho * hamiltonian) + dissipator_apply(jumps, rho);
}

}  // namespace starkloop
