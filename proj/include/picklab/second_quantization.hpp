#pragma once

#include <span>
#include <vector>

#include "picklab/operators.hpp"

namespace picklab {

/// dGamma(A) = sum_ij A_ij a+_i a_j on the sector (no 1/N factor).
Matrix second_quantize(const Matrix& A, const SectorBasis& basis);

/// sum_{ijpq} W[(i,p),(j,q)] a+_i a+_p a_q a_j, the sector restriction of
/// sum_{k != l} W acting on slots (k, l). W is d^2 x d^2 with the first slot
/// most significant, matching Eigen's Kronecker layout.
Matrix second_quantize_two_body(const Matrix& W, const SectorBasis& basis);

/// Normal-ordered m-body form
///   sum prod_k (ops_k)_{i_k j_k}  a+_{i_1}..a+_{i_m} a_{j_m}..a_{j_1}.
Matrix normal_ordered(std::span<const Matrix> ops, const SectorBasis& basis);

/// a_mode applied to a sector vector; result lives on `to` (N-1 particles).
Vector annihilate(const Vector& psi, const SectorBasis& from, const SectorBasis& to, int mode);

/// M_N^in(A) = (1/N) sum_k J_k A restricted to the symmetric sector.
SymOperator lift_mn(const OneBodyOperator& A, const BasisPtr& basis);

/// (1/N) sum_{j<k} v(x_j - x_k) for a pair potential tabulated by the
/// difference index (v[k] = v(x_k - x_0)). Rejects tables that are not even.
SymOperator lift_pair_sum(const RealVector& v_by_difference, const BasisPtr& basis);

struct SlotOperator {
  int slot;  // 1-based particle slot
  OneBodyOperator op;
};

enum class JkRoute { algebraic, first_quantized };

/// Compression of prod_k J_{slot_k}(op_k) onto the symmetric sector.
///
/// The compression does not depend on which distinct slots are named, only
/// on the multiset of operators, and equals ((N-m)!/N!) times the
/// normal-ordered form. The first-quantized route embeds into d^N and is only
/// allowed for N <= first_quantization_cap.
SymOperator lift_jk_product(std::span<const SlotOperator> ops, const BasisPtr& basis,
                            JkRoute route = JkRoute::algebraic, int first_quantization_cap = 4);

/// Serial kernels kept as the reference for the OpenMP versions above.
namespace reference {
Matrix second_quantize(const Matrix& A, const SectorBasis& basis);
Matrix second_quantize_two_body(const Matrix& W, const SectorBasis& basis);
}  // namespace reference

}  // namespace picklab
