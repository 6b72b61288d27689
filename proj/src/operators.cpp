#include "picklab/operators.hpp"

#include <string>

namespace picklab {

double hermitian_drift(const Matrix& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

Matrix enforce_hermitian(const Matrix& m, double tol, const char* what) {
  if (m.rows() != m.cols()) throw DimensionMismatch(std::string(what) + ": matrix not square");
  if (m.size() == 0) return m;
  const double drift = hermitian_drift(m);
  if (drift > tol)
    throw Error(std::string(what) + ": Hermiticity drift " + std::to_string(drift) +
                " exceeds tolerance");
  return 0.5 * (m + m.adjoint());
}

OneBodyOperator::OneBodyOperator(Matrix m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {
  if (m_.rows() != m_.cols()) throw DimensionMismatch("one-body operator must be square");
  if (hermitian_) m_ = enforce_hermitian(m_, hermitian_drift_tol, "one-body operator");
}

OneBodyOperator OneBodyOperator::identity(int d) { return OneBodyOperator(Matrix::Identity(d, d), true); }

OneBodyOperator OneBodyOperator::diagonal(const Vector& diag) {
  const bool real = diag.imag().cwiseAbs().maxCoeff() == 0.0;
  return OneBodyOperator(Matrix(diag.asDiagonal()), real);
}

OneBodyOperator OneBodyOperator::diagonal(const RealVector& diag) {
  return OneBodyOperator(Matrix(diag.cast<cplx>().asDiagonal()), true);
}

OneBodyOperator OneBodyOperator::adjoint() const {
  OneBodyOperator r;
  r.m_ = m_.adjoint();
  r.hermitian_ = hermitian_;
  return r;
}

namespace {
void check_dims(const OneBodyOperator& a, const OneBodyOperator& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("one-body operators of different dimension");
}
}  // namespace

OneBodyOperator operator+(const OneBodyOperator& a, const OneBodyOperator& b) {
  check_dims(a, b);
  return OneBodyOperator(a.m_ + b.m_);
}

OneBodyOperator operator-(const OneBodyOperator& a, const OneBodyOperator& b) {
  check_dims(a, b);
  return OneBodyOperator(a.m_ - b.m_);
}

OneBodyOperator operator*(const OneBodyOperator& a, const OneBodyOperator& b) {
  check_dims(a, b);
  return OneBodyOperator(a.m_ * b.m_);
}

OneBodyOperator operator*(cplx s, const OneBodyOperator& a) { return OneBodyOperator(s * a.m_); }

OneBodyOperator commutator(const OneBodyOperator& a, const OneBodyOperator& b) { return a * b - b * a; }

SymOperator::SymOperator(BasisPtr basis, Matrix m) : basis_(std::move(basis)), m_(std::move(m)) {
  if (!basis_) throw Error("sym operator: null basis");
  const auto D = static_cast<Eigen::Index>(basis_->size());
  if (m_.rows() != D || m_.cols() != D)
    throw DimensionMismatch("sym operator: matrix is " + std::to_string(m_.rows()) + "x" +
                            std::to_string(m_.cols()) + " but sector has D=" + std::to_string(D));
}

SymOperator SymOperator::identity(BasisPtr basis) {
  const auto D = static_cast<Eigen::Index>(basis->size());
  return {std::move(basis), Matrix::Identity(D, D)};
}

SymOperator SymOperator::zero(BasisPtr basis) {
  const auto D = static_cast<Eigen::Index>(basis->size());
  return {std::move(basis), Matrix::Zero(D, D)};
}

SymOperator SymOperator::hermitian_part(double tol) const {
  return {basis_, enforce_hermitian(m_, tol, "sym operator")};
}

void SymOperator::check_same(const SymOperator& o) const {
  if (basis_ != o.basis_ && (basis_->particles() != o.basis_->particles() ||
                             basis_->modes() != o.basis_->modes()))
    throw DimensionMismatch("sym operators live on different sectors");
}

SymOperator& SymOperator::operator+=(const SymOperator& o) {
  check_same(o);
  m_ += o.m_;
  return *this;
}

SymOperator& SymOperator::operator-=(const SymOperator& o) {
  check_same(o);
  m_ -= o.m_;
  return *this;
}

SymOperator& SymOperator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

SymOperator operator*(const SymOperator& a, const SymOperator& b) {
  a.check_same(b);
  return {a.basis_, a.m_ * b.m_};
}

SymOperator commutator(const SymOperator& a, const SymOperator& b) { return a * b - b * a; }

}  // namespace picklab
