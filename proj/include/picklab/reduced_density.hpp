#pragma once

#include "picklab/sector_basis.hpp"
#include "picklab/types.hpp"

namespace picklab {

inline constexpr int default_reduced_cap = 2;

/// m-particle reduced density F_{N:m} of a normalized sector vector, as a
/// d^m x d^m matrix in Kronecker layout (slot 1 most significant).
///
/// F[(a_1..a_m),(b_1..b_m)] = <Psi| a+_{b_1}..a+_{b_m} a_{a_m}..a_{a_1} |Psi> (N-m)!/N!
Matrix reduced_density(const Vector& Psi, const SectorBasis& basis, int m,
                       int reduced_cap = default_reduced_cap);

/// Kronecker power A^{⊗m}.
Matrix tensor_power(const Matrix& A, int m);

}  // namespace picklab
