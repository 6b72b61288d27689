#pragma once

#include "picklab/geometry.hpp"
#include "picklab/operators.hpp"
#include "picklab/reduced_density.hpp"

namespace picklab {

/// R = |psi><psi| in the h-weighted inner product (R f = psi <psi, f>_h), P = I - R.
struct ProjectorPair {
  Vector psi;
  OneBodyOperator R;
  OneBodyOperator P;
};

/// Throws on unnormalized psi.
ProjectorPair projector_pair(const Vector& psi, const GridGeometry& g);

/// psi^{⊗N} on the sector: coefficient sqrt(N!/prod n_i!) prod u_i^{n_i}, u = sqrt(h) psi.
Vector product_state(const Vector& psi, const GridGeometry& g, const SectorBasis& basis);

/// <Psi| M^in(P) |Psi>
double alpha_functional(const Vector& Psi, const ProjectorPair& pair, const BasisPtr& basis);

/// Pi_N = M^in(P)
SymOperator pi_operator(const ProjectorPair& pair, const BasisPtr& basis);

inline constexpr double pi_kernel_tol = 1e-10;

/// Spectral pseudo-inverse: eigenvalues below tol form the kernel. Throws if
/// any eigenvalue lies in [tol/10, 10 tol], where the split would be ambiguous.
SymOperator pi_pseudo_inverse(const SymOperator& Pi, double tol = pi_kernel_tol);

struct PiLemmaCheck {
  double hermitian_drift = 0.0;
  double min_eig_square = 0.0;     // lambda_min(Pi^2 - Pi/N)
  double min_eig_gap = 0.0;        // lambda_min(Pi - (1/N)(I - R^{⊗N}))
  double pseudo_inverse_err = 0.0;  // max of the two products against I - R^{⊗N}, operator norm
  double spectrum_err = 0.0;       // max distance of an eigenvalue to {k/N}
  double kernel_residual = 0.0;    // ‖Pi psi^{⊗N}‖
  bool pass(double tol_eig = 1e-10, double tol_inv = 1e-9) const;
};

/// All Pi_N properties at one psi: PSD bounds, pseudo-inverse, spectrum, kernel.
PiLemmaCheck pi_lemma_check(const ProjectorPair& pair, const GridGeometry& g, const BasisPtr& basis,
                            double tol = pi_kernel_tol);

/// Throws unless Psi0 equals psi0^{⊗N} up to a phase.
void require_product_state(const Vector& Psi0, const Vector& psi0, const GridGeometry& g, const SectorBasis& basis);

struct SeiringerCheck {
  double lhs = 0.0;  // ‖F_{N:m} - R^{⊗m}‖_1
  double rhs = 0.0;  // 2 sqrt(2 m alpha)
  bool pass = false;
  int negative_eigenvalues = 0;  // of F_{N:m} - R^{⊗m}, below -1e-10
  bool structure_pass = false;   // at most one
};

SeiringerCheck seiringer_bound_check(const Vector& Psi, const ProjectorPair& pair, const BasisPtr& basis, int m,
                                     int reduced_cap = default_reduced_cap);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  double margin() const { return rhs - lhs; }
};

/// lhs <= 4 sqrt(m/N) exp((3/hbar) integral) with 1e-6 slack.
BoundCheck corollary_bound(double trace_distance, int m, int N, double integral, double hbar);

/// alpha <= alpha0 e^{(6/hbar) I} + (2/N)(e^{(6/hbar) I} - 1) with 1e-6 slack.
BoundCheck gronwall_bound(double alpha, double alpha0, int N, double integral, double hbar);

inline constexpr double bound_slack = 1e-6;

/// Cumulative trapezoid integral on a sample grid, out[0] = 0.
std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& f);

}  // namespace picklab
