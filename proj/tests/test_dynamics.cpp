#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "picklab/dynamics.hpp"
#include "picklab/pickl.hpp"
#include "picklab/reduced_density.hpp"
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

// exp(-i t K / hbar) psi from the eigendecomposition of the kinetic matrix
Vector free_evolution(const GridGeometry& g, const Vector& psi, double t) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(g.kinetic_matrix());
  const Matrix Q = es.eigenvectors().cast<cplx>();
  Vector c = Q.adjoint() * psi;
  for (int k = 0; k < g.d(); ++k) c(k) *= std::exp(-I_unit * es.eigenvalues()(k) * t / g.hbar());
  return Q * c;
}

std::vector<double> multiset_spectrum(const RealVector& eps, int N) {
  SectorBasis b(N, static_cast<int>(eps.size()));
  std::vector<double> out;
  for (const auto& n : b.states()) {
    double e = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) e += n[i] * eps(static_cast<Eigen::Index>(i));
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("N-body Hamiltonian spectra") {
  const GridGeometry g(5, L, 1.3);
  const RealVector eps = Eigen::SelfAdjointEigenSolver<RealMatrix>(g.kinetic_matrix()).eigenvalues();
  const PairPotential zero = table(RealVector::Zero(5));
  SUBCASE("one free particle") {
    const NBodyPropagator P = build_hamiltonian(g, zero, enumerate_basis(1, 5));
    for (int k = 0; k < 5; ++k) CHECK(P.eigenvalues()(k) == doctest::Approx(eps(k)).epsilon(1e-13));
  }
  SUBCASE("free particles: sums of single-particle levels") {
    for (int N : {2, 3, 4}) {
      const auto b = enumerate_basis(N, 5);
      const NBodyPropagator P = build_hamiltonian(g, zero, b);
      const auto expect = multiset_spectrum(eps, N);
      for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(std::abs(P.eigenvalues()(static_cast<Eigen::Index>(i)) - expect[i]) < 1e-12);
      const OneBodyOperator K(g.kinetic_matrix().cast<cplx>(), true);
      CHECK(max_abs(P.hamiltonian().matrix() - N * lift_mn(K, b).matrix()) < 1e-13);
    }
  }
  SUBCASE("constant potential shifts the spectrum") {
    const double c = 0.8;
    for (int N : {2, 4}) {
      const auto b = enumerate_basis(N, 5);
      const NBodyPropagator P0 = build_hamiltonian(g, zero, b);
      const NBodyPropagator Pc = build_hamiltonian(g, table(RealVector::Constant(5, c)), b);
      CHECK(max_abs((Pc.eigenvalues() - P0.eigenvalues()).cast<cplx>() -
                    Vector::Constant(P0.eigenvalues().size(), c * (N - 1) / 2.0)) < 1e-12);
    }
  }
}

TEST_CASE("exact propagator") {
  const GridGeometry g(4, L, 1.0);
  const auto b = enumerate_basis(3, 4);
  const NBodyPropagator P = build_hamiltonian(g, soft_coulomb(g, 0.5), b);
  const auto D = static_cast<int>(b->size());
  const Matrix Id = Matrix::Identity(D, D);
  std::mt19937_64 rng(31);
  CHECK(P.reconstruction_error() < 1e-13);
  CHECK(max_abs(P.unitary(0.0) - Id) < 1e-13);
  SUBCASE("eigenvectors only pick up a phase") {
    for (int k : {0, 3, D - 1}) {
      const Vector e = P.eigenvectors().col(k);
      const double t = 0.37;
      const Vector out = P.propagate(e, t);
      CHECK((out - std::exp(-I_unit * P.eigenvalues()(k) * t) * e).norm() < 1e-13);
    }
  }
  SUBCASE("group law and unitarity") {
    const Matrix U = P.unitary(0.4), V = P.unitary(0.25);
    CHECK(max_abs(U * V - P.unitary(0.65)) < 1e-12);
    CHECK(max_abs(U.adjoint() * U - Id) < 1e-12);
    CHECK(max_abs(P.unitary(-0.4) - U.adjoint()) < 1e-12);
    const Vector Psi = random_unit(D, rng);
    CHECK(std::abs(P.propagate(Psi, 0.9).norm() - 1.0) < 1e-13);
  }
  SUBCASE("small t matches the fourth-order Taylor polynomial") {
    const Matrix& H = P.hamiltonian().matrix();
    const double h = Eigen::SelfAdjointEigenSolver<Matrix>(H).eigenvalues().cwiseAbs().maxCoeff();
    for (double t : {1e-2, 5e-3}) {
      const Matrix X = -I_unit * t * H;
      const Matrix taylor = Id + X + X * X / 2.0 + X * X * X / 6.0 + X * X * X * X / 24.0;
      const double err = (P.unitary(t) - taylor).norm();
      // remainder of the exponential series beyond order four
      CHECK(err <= std::sqrt(static_cast<double>(D)) * std::pow(h * t, 5) / 120.0 * std::exp(h * t));
      CHECK(err > 0.0);
    }
  }
  SUBCASE("Heisenberg lift") {
    const Matrix A = random_matrix(4, rng);
    CHECK(max_abs(P.heisenberg_lift(OneBodyOperator(A), 0.0).matrix() - lift_mn(OneBodyOperator(A), b).matrix()) <
          1e-13);
    for (double t : {0.1, 0.7}) CHECK(max_abs(P.heisenberg_lift(OneBodyOperator::identity(4), t).matrix() - Id) < 1e-12);
  }
}

TEST_CASE("Hartree right-hand side") {
  SUBCASE("free plane wave disperses with hbar w^2 / 2") {
    const GridGeometry g(8, L, 0.7, Laplacian::spectral);
    const PairPotential zero = table(RealVector::Zero(8));
    for (int k = 0; k < 8; ++k) {
      const Vector psi = plane_wave(g, k);
      const double w = g.frequency(k);
      CHECK((hartree_rhs(psi, g, zero) + I_unit * (g.hbar() * w * w / 2.0) * psi).norm() < 1e-12);
    }
  }
  SUBCASE("parity is preserved") {
    const GridGeometry g(8, L, 1.0);
    Vector psi(8);
    for (int j = 0; j < 8; ++j) psi(j) = std::exp(-std::pow(g.difference(j), 2));
    psi /= g.norm(psi);
    const Vector r = hartree_rhs(psi, g, soft_coulomb(g, 1.0));
    for (int j = 0; j < 8; ++j) CHECK(std::abs(r(j) - r((8 - j) % 8)) < 1e-13);
  }
  SUBCASE("norm generator vanishes") {
    const GridGeometry g(6, L, 1.0);
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 10; ++trial) {
      const Vector psi = random_unit(6, rng) / std::sqrt(g.h());
      CHECK(std::abs(g.inner(psi, hartree_rhs(psi, g, soft_coulomb(g, 0.7))).real()) < 1e-12);
    }
  }
}

TEST_CASE("Hartree integrators") {
  const GridGeometry g(4, L, 1.0);
  const Vector psi0 = gaussian_wavefunction(g, L / 2, L / 8, 1.0);
  SUBCASE("free flow is exact under Strang and accurate under RK4") {
    const PairPotential zero = table(RealVector::Zero(4));
    const auto s = hartree_integrate(psi0, g, zero, 1.0, 1e-3, HartreeMethod::strang, 250);
    const auto r = hartree_integrate(psi0, g, zero, 1.0, 1e-3, HartreeMethod::rk4, 250);
    REQUIRE(s.times.size() == 5);
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      const Vector exact = free_evolution(g, psi0, s.times[i]);
      CHECK((s.psi[i] - exact).norm() < 1e-10);
      CHECK((r.psi[i] - exact).norm() < 1e-10);
    }
  }
  SUBCASE("conservation on the interacting flow") {
    const PairPotential v = soft_coulomb(g, 0.5);
    const auto r = hartree_integrate(psi0, g, v, 1.0, 1e-3, HartreeMethod::rk4, 250);
    CHECK(r.max_norm_drift <= 1e-10);
    CHECK(r.max_energy_drift <= 1e-8);
    const auto s = hartree_integrate(psi0, g, v, 1.0, 1e-3, HartreeMethod::strang, 250);
    CHECK(s.max_norm_drift <= 1e-12);
    // second-order splitting against the fourth-order reference
    CHECK((s.psi.back() - r.psi.back()).norm() < 1e-5);
  }
  SUBCASE("samples land on step boundaries") {
    const PairPotential v = soft_coulomb(g, 0.5);
    const auto r = hartree_integrate(psi0, g, v, 0.1, 1e-3, HartreeMethod::rk4, 20);
    REQUIRE(r.times.size() == 6);
    for (std::size_t i = 0; i < r.times.size(); ++i) CHECK(r.times[i] == doctest::Approx(0.02 * i));
    CHECK_THROWS_AS(hartree_integrate(psi0, g, v, 0.1, 3e-3, HartreeMethod::rk4), Error);
    CHECK_THROWS_AS(hartree_integrate(psi0, g, v, 0.1, -1e-3, HartreeMethod::rk4), Error);
  }
  SUBCASE("unstable step sizes abort") {
    const GridGeometry fine(32, L, 1.0);
    const Vector p = gaussian_wavefunction(fine, L / 2, L / 16, 2.0);
    CHECK_THROWS_AS(hartree_integrate(p, fine, table(RealVector::Zero(32)), 1.0, 0.5, HartreeMethod::rk4), Error);
  }
  SUBCASE("energy of a plane wave") {
    const GridGeometry sg(8, L, 1.0, Laplacian::spectral);
    const Vector pw = plane_wave(sg, 2);
    CHECK(hartree_energy(pw, sg, table(RealVector::Constant(8, 3.0))) == doctest::Approx(2.0 + 1.5));
  }
  CHECK(parse_hartree_method("strang") == HartreeMethod::strang);
  CHECK_THROWS_AS(parse_hartree_method("euler"), Error);
}

TEST_CASE("free N-body dynamics keeps product states") {
  const GridGeometry g(4, L, 1.0);
  const PairPotential zero = table(RealVector::Zero(4));
  const Vector psi0 = gaussian_wavefunction(g, L / 2, L / 8, 1.0);
  for (int N : {2, 3, 5}) {
    const auto b = enumerate_basis(N, 4);
    const NBodyPropagator P = build_hamiltonian(g, zero, b);
    const Vector Psi0 = product_state(psi0, g, *b);
    for (double t : {0.3, 1.0}) {
      const Vector psi = free_evolution(g, psi0, t);
      const Vector Psit = P.propagate(Psi0, t);
      CHECK(std::abs(std::abs(product_state(psi, g, *b).dot(Psit)) - 1.0) < 1e-12);
      const Vector u = orthonormal_coefficients(g, psi);
      CHECK(max_abs(reduced_density(Psit, *b, 1) - u * u.adjoint()) < 1e-12);
    }
  }
}

TEST_CASE("trajectory CSV") {
  const auto path = (std::filesystem::temp_directory_path() / "picklab_traj.csv").string();
  write_trajectory_csv(path, {0.0, 0.5}, {0.0, 1e-16}, {0.0, 2.5e-15});
  std::ifstream in(path);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "t,norm_drift,energy_drift");
  CHECK(first == "0,0,0");
}
