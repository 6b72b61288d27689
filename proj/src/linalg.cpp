#include "picklab/linalg.hpp"

#include <algorithm>

#include "picklab/operators.hpp"

namespace picklab {

RealVector hermitian_eigenvalues(const Matrix& m) {
  if (m.size() == 0) return RealVector();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("eigensolver did not converge");
  return es.eigenvalues();
}

double min_eigenvalue(const Matrix& hermitian) { return hermitian_eigenvalues(hermitian).minCoeff(); }

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double trace_norm_distance(const Matrix& A, const Matrix& B, double tol) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw DimensionMismatch("trace_norm_distance: size mismatch");
  const Matrix a = enforce_hermitian(A, tol, "trace_norm_distance");
  const Matrix b = enforce_hermitian(B, tol, "trace_norm_distance");
  return hermitian_eigenvalues(a - b).cwiseAbs().sum();
}

double matrix_inequality_margin(const Matrix& lhs, const Matrix& rhs, double tol) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols())
    throw DimensionMismatch("matrix_inequality_margin: size mismatch");
  const Matrix l = enforce_hermitian(lhs, tol, "matrix_inequality_margin lhs");
  const Matrix r = enforce_hermitian(rhs, tol, "matrix_inequality_margin rhs");
  const double scale = hermitian_eigenvalues(r).cwiseAbs().maxCoeff();
  return min_eigenvalue(r - l) / std::max(scale, margin_floor);
}

}  // namespace picklab
