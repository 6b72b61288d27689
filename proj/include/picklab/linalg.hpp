#pragma once

#include "picklab/types.hpp"

namespace picklab {

/// Ascending eigenvalues of a Hermitian matrix (only the lower triangle is read).
RealVector hermitian_eigenvalues(const Matrix& m);

double min_eigenvalue(const Matrix& hermitian);

/// Largest singular value.
double op_norm(const Matrix& m);

/// sum |lambda_i(A - B)| for Hermitian A, B; throws on non-Hermitian input.
double trace_norm_distance(const Matrix& A, const Matrix& B, double hermitian_tol = 1e-10);

inline constexpr double margin_floor = 1e-14;

/// lambda_min(rhs - lhs) / max(||rhs||_op, 1e-14); the operator statement
/// lhs <= rhs holds to tolerance tol iff the margin is >= -tol.
double matrix_inequality_margin(const Matrix& lhs, const Matrix& rhs, double hermitian_tol = 1e-10);

}  // namespace picklab
