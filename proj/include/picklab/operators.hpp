#pragma once

#include "picklab/sector_basis.hpp"
#include "picklab/types.hpp"

namespace picklab {

/// Relative tolerance on Hermiticity drift (max-norm) accepted before a
/// matrix flagged Hermitian is symmetrized.
inline constexpr double hermitian_drift_tol = 1e-12;

/// max |M - M^dagger| / max |M| (0 for the zero matrix).
double hermitian_drift(const Matrix& m);
/// Symmetrize (M + M^dagger)/2 after checking the drift; throws past `tol`.
Matrix enforce_hermitian(const Matrix& m, double tol, const char* what);

/// A d x d operator on the single-particle space.
///
/// Matrices are taken in the standard grid basis; with the weighted inner
/// product this is the same matrix as in the orthonormal basis e_j/sqrt(h).
class OneBodyOperator {
 public:
  OneBodyOperator() = default;
  explicit OneBodyOperator(Matrix m, bool hermitian = false);

  static OneBodyOperator identity(int d);
  static OneBodyOperator diagonal(const Vector& diag);
  static OneBodyOperator diagonal(const RealVector& diag);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  bool hermitian() const { return hermitian_; }
  OneBodyOperator adjoint() const;

  friend OneBodyOperator operator+(const OneBodyOperator& a, const OneBodyOperator& b);
  friend OneBodyOperator operator-(const OneBodyOperator& a, const OneBodyOperator& b);
  friend OneBodyOperator operator*(const OneBodyOperator& a, const OneBodyOperator& b);
  friend OneBodyOperator operator*(cplx s, const OneBodyOperator& a);

 private:
  Matrix m_;
  bool hermitian_ = false;
};

/// Commutator [A, B].
OneBodyOperator commutator(const OneBodyOperator& a, const OneBodyOperator& b);

/// D x D operator on a bosonic sector.
class SymOperator {
 public:
  SymOperator(BasisPtr basis, Matrix m);

  static SymOperator identity(BasisPtr basis);
  static SymOperator zero(BasisPtr basis);

  const SectorBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  SymOperator adjoint() const { return {basis_, m_.adjoint()}; }
  /// Returns a copy with (M + M^dagger)/2, throwing if the drift exceeds tol.
  SymOperator hermitian_part(double tol = hermitian_drift_tol) const;

  SymOperator& operator+=(const SymOperator& o);
  SymOperator& operator-=(const SymOperator& o);
  SymOperator& operator*=(cplx s);

  friend SymOperator operator+(SymOperator a, const SymOperator& b) { return a += b; }
  friend SymOperator operator-(SymOperator a, const SymOperator& b) { return a -= b; }
  friend SymOperator operator*(const SymOperator& a, const SymOperator& b);
  friend SymOperator operator*(cplx s, SymOperator a) { return a *= s; }

 private:
  void check_same(const SymOperator& o) const;

  BasisPtr basis_;
  Matrix m_;
};

SymOperator commutator(const SymOperator& a, const SymOperator& b);

}  // namespace picklab
