#pragma once

#include <string>
#include <vector>

#include "picklab/geometry.hpp"
#include "picklab/operators.hpp"
#include "picklab/potentials.hpp"

namespace picklab {

/// H_N = sum_j K_j + (1/N) sum_{j<k} v(x_j - x_k) on the sector, K = -hbar^2 Laplacian / 2.
SymOperator hamiltonian_matrix(const GridGeometry& g, const PairPotential& v, const BasisPtr& basis);

/// Exact propagator exp(-i t H / hbar) from a cached Hermitian eigendecomposition.
class NBodyPropagator {
 public:
  NBodyPropagator(SymOperator H, double hbar);

  const SymOperator& hamiltonian() const { return H_; }
  const RealVector& eigenvalues() const { return eval_; }
  const Matrix& eigenvectors() const { return evec_; }
  double hbar() const { return hbar_; }
  const BasisPtr& basis() const { return H_.basis_ptr(); }

  /// ‖Q Λ Q† − H‖_max / ‖H‖_max
  double reconstruction_error() const;

  Matrix unitary(double t) const;
  Vector propagate(const Vector& Psi0, double t) const;
  /// U(t)^dagger X U(t)
  SymOperator heisenberg(const SymOperator& X, double t) const;
  /// U(t)^dagger M^in(A) U(t)
  SymOperator heisenberg_lift(const OneBodyOperator& A, double t) const;

 private:
  SymOperator H_;
  double hbar_;
  RealVector eval_;
  Matrix evec_;
};

NBodyPropagator build_hamiltonian(const GridGeometry& g, const PairPotential& v, const BasisPtr& basis);

/// (1/(i hbar)) [K psi + (v * |psi|^2) psi]
Vector hartree_rhs(const Vector& psi, const GridGeometry& g, const PairPotential& v);

/// <psi, K psi>_h + (1/2) <psi, (v * |psi|^2) psi>_h
double hartree_energy(const Vector& psi, const GridGeometry& g, const PairPotential& v);

enum class HartreeMethod { rk4, strang };
HartreeMethod parse_hartree_method(const std::string& s);

/// Single RK4 step of size dt (dt may be negative).
Vector rk4_step(const Vector& psi, double dt, const GridGeometry& g, const PairPotential& v);
/// Strang step: kinetic half step in Fourier modes, potential step, kinetic half step.
Vector strang_step(const Vector& psi, double dt, const GridGeometry& g, const PairPotential& v);

struct HartreeTrajectory {
  std::vector<double> times;
  std::vector<Vector> psi;
  std::vector<double> norm_drift;    // |‖psi(t)‖ − ‖psi(0)‖|
  std::vector<double> energy_drift;  // |E(t) − E(0)|
  double dt = 0.0;
  int stride = 1;
  double max_norm_drift = 0.0;
  double max_energy_drift = 0.0;
};

inline constexpr double hartree_instability_tol = 1e-6;

/// Integrates over [0, tmax] with fixed dt; samples every `sample_stride`
/// steps starting at t=0. tmax/dt must be an integer; no renormalization.
/// Aborts when the norm drift exceeds 1e-6.
HartreeTrajectory hartree_integrate(const Vector& psi0, const GridGeometry& g, const PairPotential& v,
                                    double tmax, double dt, HartreeMethod method, int sample_stride = 1);

/// Writes "t,norm_drift,energy_drift".
void write_trajectory_csv(const std::string& path, const std::vector<double>& t,
                          const std::vector<double>& norm_drift, const std::vector<double>& energy_drift);

}  // namespace picklab
