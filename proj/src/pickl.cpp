#include "picklab/pickl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "picklab/linalg.hpp"
#include "picklab/second_quantization.hpp"
#include "picklab/state.hpp"

namespace picklab {

ProjectorPair projector_pair(const Vector& psi, const GridGeometry& g) {
  require_normalized(g, psi, "projector_pair");
  const Vector u = orthonormal_coefficients(g, psi);
  const Matrix R = u * u.adjoint();
  const auto d = g.d();
  return {psi, OneBodyOperator(R, true), OneBodyOperator(Matrix::Identity(d, d) - R, true)};
}

Vector product_state(const Vector& psi, const GridGeometry& g, const SectorBasis& basis) {
  if (basis.modes() != g.d()) throw DimensionMismatch("product_state: d mismatch");
  const Vector u = orthonormal_coefficients(g, psi);
  const int N = basis.particles();
  Vector out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const Occupation& n = basis.state(s);
    // log of N!/prod n_i! keeps the multinomial finite for large N
    double logc = std::lgamma(N + 1.0);
    cplx prod = 1.0;
    for (int i = 0; i < g.d(); ++i) {
      logc -= std::lgamma(n[i] + 1.0);
      for (int r = 0; r < n[i]; ++r) prod *= u(i);
    }
    out(static_cast<Eigen::Index>(s)) = std::exp(0.5 * logc) * prod;
  }
  return out;
}

double alpha_functional(const Vector& Psi, const ProjectorPair& pair, const BasisPtr& basis) {
  if (std::abs(Psi.norm() - 1.0) > 1e-10) throw Error("alpha_functional: state is not normalized");
  const SymOperator Pi = lift_mn(pair.P, basis);
  return Psi.dot(Pi.matrix() * Psi).real();
}

SymOperator pi_operator(const ProjectorPair& pair, const BasisPtr& basis) { return lift_mn(pair.P, basis); }

SymOperator pi_pseudo_inverse(const SymOperator& Pi, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Pi.hermitian_part().matrix());
  if (es.info() != Eigen::Success) throw Error("pi_pseudo_inverse: eigensolver failed");
  const RealVector& ev = es.eigenvalues();
  Vector inv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) >= tol / 10.0 && ev(i) <= 10.0 * tol) {
      std::ostringstream msg;
      msg << "pi_pseudo_inverse: eigenvalue " << ev(i) << " too close to the kernel cutoff " << tol
          << "; choose a different tolerance";
      throw Error(msg.str());
    }
    inv(i) = ev(i) < tol ? 0.0 : 1.0 / ev(i);
  }
  const Matrix& Q = es.eigenvectors();
  return SymOperator(Pi.basis_ptr(), Q * inv.asDiagonal() * Q.adjoint()).hermitian_part();
}

bool PiLemmaCheck::pass(double tol_eig, double tol_inv) const {
  return hermitian_drift <= 1e-12 && min_eig_square >= -tol_eig && min_eig_gap >= -tol_eig &&
         pseudo_inverse_err <= tol_inv && spectrum_err <= tol_eig && kernel_residual <= tol_eig;
}

PiLemmaCheck pi_lemma_check(const ProjectorPair& pair, const GridGeometry& g, const BasisPtr& basis, double tol) {
  PiLemmaCheck c;
  const SymOperator Pi = pi_operator(pair, basis);
  const int N = basis->particles();
  const Matrix& pi = Pi.matrix();
  const auto D = pi.rows();
  c.hermitian_drift = hermitian_drift(pi);
  const Vector prod = product_state(pair.psi, g, *basis);
  const Matrix Q = Matrix::Identity(D, D) - prod * prod.adjoint();
  c.min_eig_square = min_eigenvalue(pi * pi - pi / static_cast<double>(N));
  c.min_eig_gap = min_eigenvalue(pi - Q / static_cast<double>(N));
  const Matrix inv = pi_pseudo_inverse(Pi, tol).matrix();
  c.pseudo_inverse_err = std::max(op_norm(inv * pi - Q), op_norm(pi * inv - Q));
  const RealVector ev = hermitian_eigenvalues(pi);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double k = std::clamp(std::round(ev(i) * N), 0.0, static_cast<double>(N));
    c.spectrum_err = std::max(c.spectrum_err, std::abs(ev(i) - k / N));
  }
  c.kernel_residual = (pi * prod).norm();
  return c;
}

void require_product_state(const Vector& Psi0, const Vector& psi0, const GridGeometry& g, const SectorBasis& basis) {
  const Vector prod = product_state(psi0, g, basis);
  if (Psi0.size() != prod.size() || std::abs(std::abs(prod.dot(Psi0)) - 1.0) > 1e-10)
    throw Error("initial N-body state is not a product state psi^{⊗N}");
}

SeiringerCheck seiringer_bound_check(const Vector& Psi, const ProjectorPair& pair, const BasisPtr& basis, int m,
                                     int reduced_cap) {
  SeiringerCheck c;
  const Matrix F = reduced_density(Psi, *basis, m, reduced_cap);
  const Matrix Rm = tensor_power(pair.R.matrix(), m);
  const RealVector ev = hermitian_eigenvalues(F - Rm);
  c.lhs = ev.cwiseAbs().sum();
  const double alpha = std::max(0.0, alpha_functional(Psi, pair, basis));
  c.rhs = 2.0 * std::sqrt(2.0 * m * alpha);
  c.pass = c.lhs <= c.rhs + 1e-10;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) < -1e-10) ++c.negative_eigenvalues;
  c.structure_pass = c.negative_eigenvalues <= 1;
  return c;
}

BoundCheck corollary_bound(double trace_distance, int m, int N, double integral, double hbar) {
  BoundCheck b;
  b.lhs = trace_distance;
  b.rhs = 4.0 * std::sqrt(static_cast<double>(m) / N) * std::exp(3.0 * integral / hbar);
  b.pass = b.lhs <= b.rhs + bound_slack;
  return b;
}

BoundCheck gronwall_bound(double alpha, double alpha0, int N, double integral, double hbar) {
  BoundCheck b;
  const double e = std::exp(6.0 * integral / hbar);
  b.lhs = alpha;
  b.rhs = alpha0 * e + (2.0 / N) * (e - 1.0);
  b.pass = b.lhs <= b.rhs + bound_slack;
  return b;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  if (t.size() != f.size()) throw DimensionMismatch("cumulative_trapezoid: size mismatch");
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return out;
}

}  // namespace picklab
