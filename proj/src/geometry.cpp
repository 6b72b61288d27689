#include "picklab/geometry.hpp"

#include <cmath>
#include <numbers>

namespace picklab {

GridGeometry::GridGeometry(int d, double L, double hbar, Laplacian lap)
    : d_(d), L_(L), hbar_(hbar), lap_(lap) {
  if (d < 1) throw Error("geometry: d must be positive");
  if (!(L > 0.0)) throw Error("geometry: L must be positive");
  if (!(hbar > 0.0)) throw Error("geometry: hbar must be positive");
}

int GridGeometry::signed_index(int k) const {
  k = ((k % d_) + d_) % d_;
  return k < (d_ + 1) / 2 ? k : k - d_;
}

double GridGeometry::frequency(int k) const {
  return 2.0 * std::numbers::pi * signed_index(k) / L_;
}

double GridGeometry::norm(const Vector& f) const { return std::sqrt(h()) * f.norm(); }

RealVector GridGeometry::laplacian_symbol() const {
  RealVector s(d_);
  const double hh = h();
  for (int k = 0; k < d_; ++k) {
    const double w = frequency(k);
    if (lap_ == Laplacian::spectral) {
      s(k) = w * w;
    } else {
      const double sn = std::sin(0.5 * w * hh);
      s(k) = 4.0 * sn * sn / (hh * hh);
    }
  }
  return s;
}

Matrix GridGeometry::dft_matrix() const {
  Matrix F(d_, d_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_));
  for (int k = 0; k < d_; ++k)
    for (int j = 0; j < d_; ++j) {
      // exp(-i w_k x_j) depends only on k*j mod d
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * j) % d_) / d_;
      F(k, j) = scale * cplx(std::cos(phase), std::sin(phase));
    }
  return F;
}

RealMatrix GridGeometry::laplacian_matrix() const {
  const double hh = h();
  if (lap_ == Laplacian::three_point) {
    RealMatrix D = RealMatrix::Zero(d_, d_);
    if (d_ == 1) return D;
    for (int j = 0; j < d_; ++j) {
      D(j, j) += -2.0 / (hh * hh);
      D(j, (j + 1) % d_) += 1.0 / (hh * hh);
      D(j, (j + d_ - 1) % d_) += 1.0 / (hh * hh);
    }
    return D;
  }
  const Matrix F = dft_matrix();
  const RealVector s = laplacian_symbol();
  const Matrix D = -(F.adjoint() * s.cast<cplx>().asDiagonal() * F);
  return D.real();
}

RealMatrix GridGeometry::kinetic_matrix() const {
  return -0.5 * hbar_ * hbar_ * laplacian_matrix();
}

}  // namespace picklab
