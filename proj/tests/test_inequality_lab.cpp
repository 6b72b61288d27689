#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "picklab/inequality_lab.hpp"
#include "picklab/linalg.hpp"
#include "picklab/second_quantization.hpp"
#include "picklab/state.hpp"

using namespace picklab;
using namespace testing;

namespace {

const double L = 2.0 * std::numbers::pi;

PairPotential table(const RealVector& v) { return PairPotential(PotentialKind::custom_table, {}, v); }

PairPotential soft_coulomb(const GridGeometry& g, double strength) {
  PotentialParams p;
  p.g = strength;
  p.eps = g.L() / 8;
  return build_potential(PotentialKind::soft_coulomb, p, g);
}

double rel_op(const Matrix& a, const Matrix& b) { return op_norm(a - b) / std::max(op_norm(b), 1e-300); }

struct Setup {
  GridGeometry g;
  PairPotential v;
  BasisPtr b;
  NBodyPropagator prop;
  FourierModes modes;
  Setup(int N, int d, const PairPotential& pot, double L_ = L)
      : g(d, L_, 1.0), v(pot), b(enumerate_basis(N, d)), prop(build_hamiltonian(g, v, b)), modes(v, g) {}
};

}  // namespace

TEST_CASE("interaction operator for trivial potentials") {
  const int d = 4;
  const GridGeometry g(d, L, 1.0);
  const Vector psi = gaussian_wavefunction(g, L / 2, L / 8, 1.0);
  for (double c : {0.0, 1.7}) {
    Setup s(3, d, table(RealVector::Constant(d, c)));
    const SampleContext ctx = make_context(s.prop, s.g, s.v, psi, 0.4);
    CHECK(max_abs(c_operator_fourier(s.modes, ctx).matrix()) < 1e-13);
    CHECK(max_abs(c_operator_direct(s.v, ctx).matrix()) < 1e-13);
    CHECK(max_abs(c_operator_direct(s.v, ctx, DirectRoute::first_quantized).matrix()) < 1e-13);
  }
  Setup z(3, d, table(RealVector::Zero(d)));
  const TermDecomposition dec = build_terms(z.modes, make_context(z.prop, z.g, z.v, psi, 0.2));
  for (int j = 0; j < 4; ++j) CHECK(max_abs(dec.T[j].matrix()) == 0.0);
}

TEST_CASE("two particles on two sites, expanded by hand") {
  // C at t=0, v = (1, 1/4), u = (0.8, 0.6i); entries from an independent
  // expansion on the four-dimensional two-particle space
  RealVector vv(2);
  vv << 1.0, 0.25;
  Setup s(2, 2, table(vv));
  Vector u(2);
  u << 0.8, cplx(0.0, 0.6);
  const Vector psi = u / std::sqrt(s.g.h());
  const SampleContext ctx = make_context(s.prop, s.g, s.v, psi, 0.0);
  Matrix expect = Matrix::Zero(3, 3);
  const cplx x(0.0, -0.056002857069974515), y(0.0, 0.19855558415718255);
  expect(0, 1) = expect(1, 0) = x;
  expect(1, 2) = expect(2, 1) = y;
  CHECK(max_abs(c_operator_fourier(s.modes, ctx).matrix() - expect) < 1e-15);
  CHECK(max_abs(c_operator_direct(s.v, ctx).matrix() - expect) < 1e-15);
}

TEST_CASE("Fourier and pair-commutator constructions agree") {
  const int d = 4;
  Setup s(3, d, soft_coulomb(GridGeometry(d, L, 1.0), 0.5));
  const Vector psi0 = gaussian_wavefunction(s.g, L / 2, L / 8, 1.0);
  const auto tr = hartree_integrate(psi0, s.g, s.v, 1.0, 1e-3, HartreeMethod::rk4, 250);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const SampleContext ctx = make_context(s.prop, s.g, s.v, tr.psi[i] / s.g.norm(tr.psi[i]), tr.times[i]);
    const Matrix F = c_operator_fourier(s.modes, ctx).matrix();
    CHECK(rel_op(F, c_operator_direct(s.v, ctx).matrix()) <= 1e-12);
    CHECK(rel_op(F, c_operator_direct(s.v, ctx, DirectRoute::first_quantized).matrix()) <= 1e-12);
    // the full operator minus the mean-field piece
    const SymOperator MF = conjugate(ctx.U, lift_mn(commutator(OneBodyOperator::diagonal(ctx.W), ctx.pair.R), ctx.basis));
    CHECK(rel_op(c_operator_full_fourier(s.modes, ctx).matrix() - MF.matrix(), F) <= 1e-12);
  }
  Setup big(5, d, soft_coulomb(GridGeometry(d, L, 1.0), 0.5));
  const SampleContext ctx = make_context(big.prop, big.g, big.v, psi0, 0.0);
  CHECK_THROWS_AS(c_operator_direct(big.v, ctx, DirectRoute::first_quantized, 4), Error);
}

TEST_CASE("term decomposition and skew-adjointness") {
  std::mt19937_64 rng(61);
  for (auto [N, d] : {std::pair{2, 3}, std::pair{3, 4}, std::pair{5, 4}}) {
    Setup s(N, d, soft_coulomb(GridGeometry(d, L, 1.0), 0.8));
    for (int trial = 0; trial < 3; ++trial) {
      const Vector psi = random_unit(d, rng) / std::sqrt(s.g.h());
      const SampleContext ctx = make_context(s.prop, s.g, s.v, psi, 0.3 * trial);
      const SymOperator C = c_operator_fourier(s.modes, ctx);
      const TermDecomposition dec = build_terms(s.modes, ctx);
      CHECK((C.matrix() - dec.sum().matrix()).norm() <= 1e-9 * C.matrix().norm());
      CHECK(skew_drift(C) <= 1e-10);
      for (int j = 0; j < 4; ++j) CHECK(skew_drift(dec.T[j]) <= 1e-10);
    }
  }
}

TEST_CASE("adjoint relation of the T1 and T3 building blocks") {
  // (M(X) M(Y))^dagger = M(Y^dagger) M(X^dagger) with X = P E* P, Y = P E R
  const int d = 4;
  Setup s(3, d, soft_coulomb(GridGeometry(d, L, 1.0), 0.5));
  const Vector psi = gaussian_wavefunction(s.g, 1.0, 0.7, -1.0);
  const SampleContext ctx = make_context(s.prop, s.g, s.v, psi, 0.6);
  const OneBodyOperator& P = ctx.pair.P;
  const OneBodyOperator& R = ctx.pair.R;
  for (int k = 0; k < d; ++k) {
    const OneBodyOperator E = s.modes.E(k), Es = E.adjoint();
    const OneBodyOperator X = P * Es * P, Y = P * E * R, Z = P * Es * R;
    auto M = [&](const OneBodyOperator& A) { return conjugate(ctx.U, lift_mn(A, ctx.basis)).matrix(); };
    const Matrix lhs1 = (M(X) * M(Y)).adjoint();
    CHECK(max_abs(lhs1 - M(Y.adjoint()) * M(X.adjoint())) < 1e-13);
    const Matrix lhs3 = (M(Z) * M(Y)).adjoint();
    CHECK(max_abs(lhs3 - M(Y.adjoint()) * M(Z.adjoint())) < 1e-13);
  }
}

TEST_CASE("per-term and aggregate bounds") {
  std::mt19937_64 rng(63);
  SUBCASE("zero potential sits on the edge") {
    Setup s(3, 4, table(RealVector::Zero(4)));
    const Vector psi = gaussian_wavefunction(s.g, L / 2, L / 8, 1.0);
    const SampleContext ctx = make_context(s.prop, s.g, s.v, psi, 0.5);
    const SymOperator MP = conjugate(ctx.U, lift_mn(ctx.pair.P, ctx.basis));
    const TermBoundMargins m = verify_term_bounds(build_terms(s.modes, ctx), 0.0, MP, 3);
    for (int j = 0; j < 4; ++j) {
      CHECK(m.plus[j] >= -1e-8);
      CHECK(m.minus[j] >= -1e-8);
    }
    CHECK(verify_aggregate(c_operator_fourier(s.modes, ctx), 0.0, MP, 3).worst() >= -1e-8);
  }
  SUBCASE("adversarial one-body states and times") {
    for (auto [N, d] : {std::pair{2, 4}, std::pair{3, 4}, std::pair{4, 5}}) {
      for (double strength : {0.5, 3.0}) {
        Setup s(N, d, soft_coulomb(GridGeometry(d, L, 1.0), strength));
        for (int trial = 0; trial < 4; ++trial) {
          // random phases give states far from the Hartree orbit
          const Vector psi = random_unit(d, rng) / std::sqrt(s.g.h());
          const SampleContext ctx = make_context(s.prop, s.g, s.v, psi, 2.0 * trial);
          const double ell = ell_functional(s.v, psi, s.g);
          const SymOperator MP = conjugate(ctx.U, lift_mn(ctx.pair.P, ctx.basis));
          const TermDecomposition dec = build_terms(s.modes, ctx);
          const TermBoundMargins m = verify_term_bounds(dec, ell, MP, N);
          for (int j = 0; j < 4; ++j) {
            CHECK(m.plus[j] >= -1e-8);
            CHECK(m.minus[j] >= -1e-8);
          }
          CHECK(m.t1_tight_plus >= -1e-8);
          CHECK(m.t1_tight_minus >= -1e-8);
          CHECK(verify_aggregate(c_operator_fourier(s.modes, ctx), ell, MP, N).worst() >= -1e-8);
          // T4 directly: ‖T4‖ <= (2/N) ell
          CHECK(op_norm(dec.T[3].matrix()) <= (2.0 / N) * ell * (1 + 1e-12));
        }
      }
    }
  }
  SUBCASE("the bound fails when the rate is too small") {
    Setup s(3, 4, soft_coulomb(GridGeometry(4, L, 1.0), 2.0));
    const Vector psi = gaussian_wavefunction(s.g, L / 2, L / 8, 1.0);
    const SampleContext ctx = make_context(s.prop, s.g, s.v, psi, 0.0);
    const SymOperator MP = conjugate(ctx.U, lift_mn(ctx.pair.P, ctx.basis));
    CHECK(verify_aggregate(c_operator_fourier(s.modes, ctx), 1e-4, MP, 3).worst() < -1e-8);
  }
}

TEST_CASE("derivative identity") {
  const double dt = 1e-3;
  SUBCASE("free flow") {
    Setup s(3, 4, table(RealVector::Zero(4)));
    const Vector psi0 = gaussian_wavefunction(s.g, L / 2, L / 8, 1.0);
    const auto tr = hartree_integrate(psi0, s.g, s.v, 0.5, dt, HartreeMethod::rk4, 250);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const DerivativeCheck c = derivative_identity_check(s.prop, s.g, s.v, s.modes, tr.psi[i], tr.times[i], 1e-4, dt);
      CHECK_FALSE(c.relative);
      CHECK(c.residual <= 1e-8);
    }
  }
  SUBCASE("soft-Coulomb, second order in the step") {
    Setup s(3, 4, soft_coulomb(GridGeometry(4, L, 1.0), 0.5));
    const Vector psi0 = gaussian_wavefunction(s.g, L / 2, L / 8, 1.0);
    const auto tr = hartree_integrate(psi0, s.g, s.v, 1.0, dt, HartreeMethod::rk4, 250);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const double t = tr.times[i];
      const DerivativeCheck h1 = derivative_identity_check(s.prop, s.g, s.v, s.modes, tr.psi[i], t, 1e-4, dt);
      const DerivativeCheck h2 = derivative_identity_check(s.prop, s.g, s.v, s.modes, tr.psi[i], t, 2e-4, dt);
      const DerivativeCheck h4 = derivative_identity_check(s.prop, s.g, s.v, s.modes, tr.psi[i], t, 2e-3, dt);
      CHECK(h1.relative);
      CHECK(h1.residual <= 1e-5);
      CHECK(h2.residual / h1.residual == doctest::Approx(4.0).epsilon(0.1));
      // a step longer than the integrator step uses RK4 substeps
      CHECK(h4.residual / h2.residual == doctest::Approx(100.0).epsilon(0.1));
    }
  }
  SUBCASE("misaligned finite-difference step") {
    Setup s(2, 4, soft_coulomb(GridGeometry(4, L, 1.0), 0.5));
    const Vector psi0 = gaussian_wavefunction(s.g, L / 2, L / 8, 1.0);
    CHECK_THROWS_AS(derivative_identity_check(s.prop, s.g, s.v, s.modes, psi0, 0.0, 4e-4, dt), Error);
    CHECK_THROWS_AS(derivative_identity_check(s.prop, s.g, s.v, s.modes, psi0, 0.0, 1.5e-3, dt), Error);
  }
}

TEST_CASE("morphism suite") {
  Setup s(3, 4, soft_coulomb(GridGeometry(4, L, 1.0), 0.5));
  for (std::uint64_t seed : {1u, 2u}) {
    const MorphismSuiteResult r = morphism_suite(s.prop, 1.0, 50, seed);
    CHECK(r.instances == 50);
    CHECK(r.pass());
    CHECK(r.worst_commutator < 1e-10);
    CHECK(r.worst_contraction <= 1e-10);
  }
  const MorphismSuiteResult a = morphism_suite(s.prop, 1.0, 10, 7), b = morphism_suite(s.prop, 1.0, 10, 7);
  CHECK(a.worst_commutator == b.worst_commutator);
}
