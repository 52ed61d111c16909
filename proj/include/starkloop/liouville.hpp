#pragma once

#include <vector>

#include "starkloop/model.hpp"
#include "starkloop/types.hpp"

namespace starkloop {

// Jump operators with rate prefactors absorbed, i.e. sqrt(gamma) * sigma.
struct JumpOperatorSet {
  std::vector<Mat4> ops;
};

// Harmonic Liouvillian superoperator blocks acting on column-stacked density
// matrices. The trace row vec(I)^T annihilates all three from the left.
struct LiouvillianBlocks {
  Mat16 l0;
  Mat16 lplus;
  Mat16 lminus;
};

// Column-stacking vectorization and its inverse.
Vec16 vec(const Mat4& m);
Mat4 unvec(const Vec16& v);

// Dynamic-size variants; unvec_dyn throws DimensionError unless the vector
// length is a perfect square matching rows*rows.
Eigen::VectorXcd vec_dyn(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd unvec_dyn(const Eigen::VectorXcd& v);

// Kronecker product of two 4x4 blocks.
Mat16 kron(const Mat4& a, const Mat4& b);

// vec(I4)^T as a row vector, for trace constraints and checks.
Vec16 trace_vector();

// sqrt(gamma21)|1><2|, sqrt(gamma32)|2><3|, sqrt(gamma42)|2><4|, plus projector
// dephasing on the two upper Stark states. Zero-rate entries are omitted.
JumpOperatorSet jump_operators(const DissipationRates& rates);

// Vectorized dissipator: sum_k [conj(L) x L - 1/2 (I x L^dag L + (L^dag L)^T x I)].
Mat16 dissipator_super(const JumpOperatorSet& jumps);

// L0 = -i(I x H0 - H0^T x I) + D, L+- = -i(I x H+- - H+-^T x I).
LiouvillianBlocks liouvillian_blocks(const FloquetBlocks& blocks, const JumpOperatorSet& jumps);

// Direct (non-vectorized) forms, used by the time-domain integrator and as
// oracles against the superoperator path.
Mat4 dissipator_apply(const JumpOperatorSet& jumps, const Mat4& rho);
Mat4 lindblad_rhs(const Mat4& hamiltonian, const JumpOperatorSet& jumps, const Mat4& rho);

}  // namespace starkloop
