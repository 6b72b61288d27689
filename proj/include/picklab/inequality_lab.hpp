#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "picklab/dynamics.hpp"
#include "picklab/pickl.hpp"
#include "picklab/potentials.hpp"

namespace picklab {

/// Everything the interaction-operator builders need at one sample time.
/// U is U_N(t); Heisenberg-picture operators are U^dagger X U.
struct SampleContext {
  BasisPtr basis;
  ProjectorPair pair;
  RealVector W;  // v * |psi(t)|^2
  Matrix U;
  double t = 0.0;
};

SampleContext make_context(const NBodyPropagator& prop, const GridGeometry& g, const PairPotential& v,
                           const Vector& psi, double t);

/// U^dagger X U
SymOperator conjugate(const Matrix& U, const SymOperator& X);

/// C(V, M_N(t), M_N(t))(R) via the Fourier sum
/// (1/d) sum_w vhat U^dagger [M(E*) M(E R) − M(R E) M(E*)] U.
SymOperator c_operator_full_fourier(const FourierModes& modes, const SampleContext& ctx);

/// C(V, M_N(t) − R(t), M_N(t))(R): the full operator minus the mean-field
/// piece M_N(t)([v * |psi|^2, R]).
SymOperator c_operator_fourier(const FourierModes& modes, const SampleContext& ctx);

enum class DirectRoute { second_quantized, first_quantized };

/// Same operator from the pair commutator (1/N^2) sum_{k != l} [V_kl, J_l R],
/// independent of the Fourier data. The first-quantized route works on the
/// full tensor space and is limited to N <= first_quantization_cap.
SymOperator c_operator_direct(const PairPotential& v, const SampleContext& ctx,
                              DirectRoute route = DirectRoute::second_quantized, int first_quantization_cap = 4);

struct TermDecomposition {
  double t = 0.0;
  std::vector<SymOperator> T;  // T1..T4 stored at index 0..3
  SymOperator sum() const;
};

/// T1 = S1 − S1†, S1 = (1/d) sum vhat M(P E* P) M(P E R)
/// T2 = S2† − S2, S2 = M(P) M(P W R)
/// T3 = S3 − S3†, S3 = (1/d) sum vhat M(P E* R) M(P E R)
/// T4 = (1/N) M([W, R])
TermDecomposition build_terms(const FourierModes& modes, const SampleContext& ctx);

/// Skew-adjointness drift ‖X + X†‖_max / ‖X‖_max.
double skew_drift(const SymOperator& X);

struct TermBoundMargins {
  double plus[4] = {0, 0, 0, 0};
  double minus[4] = {0, 0, 0, 0};
  /// ±iT1 against 2 ell((1 − 1/N) M(P) + 2/N), the constant the proof delivers.
  double t1_tight_plus = 0.0;
  double t1_tight_minus = 0.0;
};

/// ±iT1 <= 2 ell ((1−1/N) M(P) + 4/N), ±iT2 <= 2 ell (M(P) + 1/N),
/// ±iT3 <= 2 ell ((1−1/N) M(P) + 1/N), ±iT4 <= (2/N) ell.
TermBoundMargins verify_term_bounds(const TermDecomposition& dec, double ell, const SymOperator& MP, int N);

struct MarginPair {
  double plus = 0.0;
  double minus = 0.0;
  double worst() const { return std::min(plus, minus); }
};

/// ±iC <= 6 rate (M(P) + 2/N), rate = ell (tight) or L.
MarginPair verify_aggregate(const SymOperator& C, double rate, const SymOperator& MP, int N);

struct DerivativeCheck {
  double residual = 0.0;  // ‖FD − C‖/‖C‖, or ‖FD − C‖ when ‖C‖ < 1e-8
  double fd_norm = 0.0;
  double c_norm = 0.0;
  bool relative = true;
};

inline constexpr double derivative_absolute_floor = 1e-8;

/// Compares i hbar d/dt M_N(t)(P(t)) (central difference at ±dt_fd, psi
/// advanced from psi(t) by RK4) with C(V, M_N − R, M_N)(R). dt_fd must be an
/// integer multiple or an integer fraction of the integrator step.
DerivativeCheck derivative_identity_check(const NBodyPropagator& prop, const GridGeometry& g, const PairPotential& v,
                                          const FourierModes& modes, const Vector& psi_t, double t, double dt_fd,
                                          double integrator_dt);

struct MorphismSuiteResult {
  int instances = 0;
  int contraction_failures = 0;   // ‖M_N(t)A‖ <= ‖A‖
  int commutator_failures = 0;    // [M A, M B] = (1/N) M [A, B]
  int adjoint_failures = 0;       // M(A^dagger) = M(A)^dagger
  int identity_failures = 0;      // M(I) = I
  double worst_commutator = 0.0;  // relative
  double worst_adjoint = 0.0;
  double worst_identity = 0.0;
  double worst_contraction = 0.0;  // max of ‖M A‖ − ‖A‖
  bool pass() const {
    return contraction_failures + commutator_failures + adjoint_failures + identity_failures == 0;
  }
};

/// Randomized checks of the Heisenberg morphism M_N(t) at uniformly drawn
/// t in [0, tmax]; A, B are complex Gaussian (not Hermitian for the adjoint
/// and commutator checks, Hermitian for contraction).
MorphismSuiteResult morphism_suite(const NBodyPropagator& prop, double tmax, int instances, std::uint64_t seed,
                                   double tol = 1e-10);

}  // namespace picklab
