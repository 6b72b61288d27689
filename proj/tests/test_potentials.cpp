#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "doctest.h"
#include "helpers.hpp"
#include "picklab/linalg.hpp"
#include "picklab/potentials.hpp"
#include "picklab/state.hpp"

using namespace picklab;
using namespace testing;

namespace {

const double L = 2.0 * std::numbers::pi;

RealVector even_random(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealVector v(d);
  for (int k = 0; k <= d / 2; ++k) v(k) = v((d - k) % d) = u(rng);
  return v;
}

PairPotential table(const RealVector& v) { return PairPotential(PotentialKind::custom_table, {}, v); }

std::string write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / ("picklab_test_" + name);
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_CASE("built-in potential tables") {
  const GridGeometry g(8, L, 1.0);
  PotentialParams p;
  p.g = 1.0;
  p.sigma = L / 8;
  p.eps = 0.3;
  p.width = 1.0;
  const PairPotential gauss = build_potential(PotentialKind::gaussian, p, g);
  CHECK(gauss.at(0) == doctest::Approx(1.0));
  CHECK(gauss.at(1) == doctest::Approx(std::exp(-g.h() * g.h() / (2 * p.sigma * p.sigma))));
  const PairPotential sc = build_potential(PotentialKind::soft_coulomb, p, g);
  CHECK(sc.at(0) == doctest::Approx(1.0 / 0.3));
  for (auto kind : {PotentialKind::gaussian, PotentialKind::soft_coulomb, PotentialKind::box}) {
    const PairPotential v = build_potential(kind, p, g);
    for (int k = 0; k < 8; ++k) CHECK(v.at(k) == v.at(-k));
  }
  CHECK(build_potential(PotentialKind::box, p, g).at(4) == 0.0);
  p.eps = 0.0;
  CHECK_THROWS_AS(build_potential(PotentialKind::soft_coulomb, p, g), Error);
  CHECK(parse_potential_kind(to_string(PotentialKind::box)) == PotentialKind::box);
  CHECK_THROWS_AS(parse_potential_kind("coulomb"), Error);
}

TEST_CASE("two-body matrix is diagonal in the pair difference") {
  std::mt19937_64 rng(2);
  const PairPotential v = table(even_random(5, rng));
  const Matrix W = v.two_body_matrix();
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(W(i * 5 + j, i * 5 + j).real() == v.at(i - j));
  CHECK(max_abs(W - Matrix(W.diagonal().asDiagonal())) == 0.0);
}

TEST_CASE("odd tables are rejected") {
  RealVector v(4);
  v << 1.0, 0.5, 0.2, 0.1;
  CHECK_FALSE(is_even_table(v));
  CHECK_THROWS_AS(table(v), Error);
  RealVector w(4);
  w << 1.0, 0.5, 0.2, std::nan("");
  CHECK_THROWS_AS(table(w), Error);
}

TEST_CASE("Fourier modes") {
  const int d = 6;
  const GridGeometry g(d, L, 1.0);
  SUBCASE("constant potential keeps only the DC mode") {
    const FourierModes f(table(RealVector::Constant(d, 1.5)), g);
    CHECK(f.vhat()(0) == doctest::Approx(1.5 * d));
    for (int k = 1; k < d; ++k) CHECK(std::abs(f.vhat()(k)) < 1e-13);
  }
  SUBCASE("cosine has two modes") {
    RealVector v(d);
    for (int m = 0; m < d; ++m) v(m) = std::cos(2.0 * std::numbers::pi * g.difference(m) / L);
    const FourierModes f(table(v), g);
    int nonzero = 0;
    for (int k = 0; k < d; ++k) nonzero += std::abs(f.vhat()(k)) > 1e-12;
    CHECK(nonzero == 2);
    CHECK(f.vhat()(1) == doctest::Approx(d / 2.0));
    CHECK(f.vhat()(d - 1) == doctest::Approx(d / 2.0));
  }
  SUBCASE("round trip of random even tables") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
      const RealVector v = even_random(d, rng);
      const FourierModes f(table(v), g);
      CHECK(f.reconstruction_error() < 1e-12);
      // independent inverse: direct cosine sum over the signed frequencies
      for (int m = 0; m < d; ++m) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += f.vhat()(k) * std::cos(2.0 * std::numbers::pi * k * m / d);
        CHECK(std::abs(s / d - v(m)) < 1e-12);
      }
      for (int k = 0; k < d; ++k) CHECK(f.vhat()(k) == doctest::Approx(f.vhat()(f.mirror(k))));
    }
  }
  SUBCASE("E_k are unitary diagonals with E_k E_j = E_{k+j}") {
    const FourierModes f(table(RealVector::Ones(d)), g);
    for (int k = 0; k < d; ++k) {
      CHECK(max_abs(f.E(k).matrix() * f.E(k).matrix().adjoint() - Matrix::Identity(d, d)) < 1e-14);
      CHECK(max_abs(f.E(k).matrix() * f.E(f.mirror(k)).matrix() - Matrix::Identity(d, d)) < 1e-14);
      CHECK(max_abs(f.E(1).matrix() * f.E(k).matrix() - f.E((k + 1) % d).matrix()) < 1e-14);
    }
  }
}

TEST_CASE("L2 + Linf decomposition") {
  const double h = L / 8;
  auto scan = [h](const RealVector& v) {
    // dense scan over the clamp level
    const double top = v.cwiseAbs().maxCoeff();
    double best = top;
    const int n = 200000;
    for (int i = 0; i <= n; ++i) {
      const double c = top * i / n;
      double s = 0.0;
      for (int k = 0; k < v.size(); ++k) s += std::pow(std::max(std::abs(v(k)) - c, 0.0), 2);
      best = std::min(best, std::sqrt(h * s) + c);
    }
    return best;
  };
  SUBCASE("flat bounded table keeps everything in Linf") {
    // seven entries at the top: h * 7 > 1, so clamping below 0.3 only costs
    RealVector v = RealVector::Constant(8, 0.3);
    v(4) = 0.2;
    const L2LinfSplit s = l2_linf_decomposition(v, h);
    CHECK(s.cutoff == doctest::Approx(0.3));
    CHECK(s.norm == doctest::Approx(0.3));
    CHECK(max_abs(s.v1.cast<cplx>()) == 0.0);
  }
  SUBCASE("spike goes to the L2 part") {
    RealVector v = RealVector::Constant(8, 0.1);
    v(0) = 100.0;
    const L2LinfSplit s = l2_linf_decomposition(v, h);
    CHECK(s.v1(0) > 99.0);
    CHECK(s.v2.cwiseAbs().maxCoeff() <= 0.1);
    CHECK(s.norm <= scan(v) + 1e-12);
    CHECK(s.norm >= scan(v) - 1e-6);
  }
  SUBCASE("random tables match the scan") {
    std::mt19937_64 rng(8);
    std::exponential_distribution<double> e(1.0);
    for (int trial = 0; trial < 5; ++trial) {
      RealVector v(8);
      for (int k = 0; k < 8; ++k) v(k) = e(rng) * e(rng);
      const L2LinfSplit s = l2_linf_decomposition(v, h);
      CHECK(s.norm <= scan(v) + 1e-12);
      CHECK(s.norm >= scan(v) - 1e-4 * v.maxCoeff());
      CHECK(max_abs((s.v1 + s.v2 - v).cast<cplx>()) < 1e-15);
      CHECK(s.v2.cwiseAbs().maxCoeff() <= s.cutoff + 1e-15);
      CHECK(s.norm == doctest::Approx(std::sqrt(h * s.v1.squaredNorm()) + s.cutoff));
    }
  }
}

TEST_CASE("mean-field potential and ell") {
  const int d = 8;
  const GridGeometry g(d, L, 1.0);
  const Vector psi = gaussian_wavefunction(g, L / 3, L / 8, 1.0);
  SUBCASE("zero and constant potentials") {
    CHECK(max_abs(mean_field_potential(table(RealVector::Zero(d)), psi, g).matrix()) == 0.0);
    CHECK(max_abs(mean_field_potential(table(RealVector::Constant(d, 2.0)), psi, g).matrix() -
                  2.0 * Matrix::Identity(d, d)) < 1e-13);
    CHECK(ell_functional(table(RealVector::Zero(d)), psi, g) == 0.0);
    CHECK(ell_functional(table(RealVector::Constant(d, -2.0)), psi, g) == doctest::Approx(2.0));
  }
  SUBCASE("gaussian potential against a double sum") {
    PotentialParams p;
    p.sigma = 0.9;
    const PairPotential v = build_potential(PotentialKind::gaussian, p, g);
    const RealVector W = mean_field_values(v, psi, g);
    for (int x = 0; x < d; ++x) {
      double s = 0.0;
      for (int y = 0; y < d; ++y) {
        const double dx = std::remainder(g.position(x) - g.position(y), L);
        s += std::exp(-dx * dx / (2 * 0.81)) * std::norm(psi(y));
      }
      CHECK(W(x) == doctest::Approx(g.h() * s).epsilon(1e-13));
    }
  }
  SUBCASE("ell bounds the mean-field operator") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
      const PairPotential v = table(even_random(d, rng));
      const Vector phi = random_unit(d, rng) / std::sqrt(g.h());
      const double ell = ell_functional(v, phi, g);
      // ell^2 is the largest entry of v^2 * |phi|^2
      const PairPotential v2 = table(v.values().cwiseAbs2());
      CHECK(ell * ell == doctest::Approx(mean_field_values(v2, phi, g).maxCoeff()));
      const Vector u = orthonormal_coefficients(g, phi);
      const Matrix R = u * u.adjoint();
      CHECK(op_norm(mean_field_potential(v, phi, g).matrix() * R) <= ell * (1 + 1e-12));
      // two-particle: V_12 (I ⊗ R)
      const Matrix J2R = Eigen::kroneckerProduct(Matrix::Identity(d, d), R);
      CHECK(op_norm(v.two_body_matrix() * J2R) <= ell * (1 + 1e-12));
    }
  }
}

TEST_CASE("H2 norm and L") {
  const int d = 8;
  SUBCASE("plane waves") {
    const GridGeometry sg(d, L, 1.0, Laplacian::spectral);
    const GridGeometry fd(d, L, 1.0, Laplacian::three_point);
    for (int k = 0; k < d; ++k) {
      const double w = sg.frequency(k);
      CHECK(h2_norm(plane_wave(sg, k), sg) == doctest::Approx(1.0 + w * w));
      const double s = (2.0 - 2.0 * std::cos(w * fd.h())) / (fd.h() * fd.h());
      CHECK(h2_norm(plane_wave(fd, k), fd) == doctest::Approx(1.0 + s));
    }
  }
  SUBCASE("L for zero and constant potentials") {
    const GridGeometry g(d, L, 1.0);
    const Vector psi = gaussian_wavefunction(g, 1.0, 0.8, 0.5);
    CHECK(L_functional(table(RealVector::Zero(d)), psi, g) == 0.0);
    CHECK(L_functional(table(RealVector::Constant(d, -3.0)), psi, g, 1.0) ==
          doctest::Approx(2.0 * 3.0 * h2_norm(psi, g)));
    CHECK(L_functional(table(RealVector::Constant(d, -3.0)), psi, g, 2.5) ==
          doctest::Approx(2.0 * 2.5 * 3.0 * h2_norm(psi, g)));
  }
  SUBCASE("discrete Sobolev constant") {
    std::mt19937_64 rng(12);
    for (int dd : {4, 8, 16}) {
      const GridGeometry g(dd, L, 1.0);
      const double C = discrete_sobolev_constant(g);
      CHECK(C <= 1.0);
      for (int trial = 0; trial < 20; ++trial) {
        const Vector f = random_unit(dd, rng);
        CHECK(f.cwiseAbs().maxCoeff() <= C * h2_norm(f, g) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("custom potential tables from CSV") {
  const GridGeometry g(4, L, 1.0);
  SUBCASE("valid table with header, any row order") {
    const auto path = write_temp("even.csv", "x_index,value\n2,0.25\n0,1.0\n1,0.5\n3,0.5\n");
    const PairPotential v = load_custom_table(path, g);
    CHECK(v.at(0) == 1.0);
    CHECK(v.at(1) == 0.5);
    CHECK(v.at(2) == 0.25);
  }
  SUBCASE("odd table") {
    const auto path = write_temp("odd.csv", "0,1.0\n1,0.5\n2,0.25\n3,0.1\n");
    CHECK_THROWS_AS(load_custom_table(path, g), Error);
  }
  SUBCASE("duplicate and missing indices") {
    CHECK_THROWS_AS(load_custom_table(write_temp("dup.csv", "0,1\n1,2\n1,2\n3,2\n"), g), Error);
    CHECK_THROWS_AS(load_custom_table(write_temp("miss.csv", "0,1\n1,2\n3,2\n"), g), Error);
    CHECK_THROWS_AS(load_custom_table(write_temp("junk.csv", "0,1\n1,abc\n"), g), Error);
  }
}
