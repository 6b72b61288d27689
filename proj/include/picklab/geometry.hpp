#pragma once

#include "picklab/types.hpp"

namespace picklab {

enum class Laplacian { three_point, spectral };

/// Periodic 1-D grid of d points on a box of length L.
///
/// Positions are x_j = j*h, j = 0..d-1. Differences and frequencies use the
/// signed index in {-floor(d/2), ..., ceil(d/2)-1}, so for even d the grid of
/// differences is {-L/2, ..., L/2-h}. Every single-particle inner product
/// carries the weight h.
class GridGeometry {
 public:
  GridGeometry(int d, double L, double hbar, Laplacian lap = Laplacian::three_point);

  int d() const { return d_; }
  double L() const { return L_; }
  double h() const { return L_ / d_; }
  double hbar() const { return hbar_; }
  Laplacian laplacian() const { return lap_; }

  double position(int j) const { return j * h(); }
  int signed_index(int k) const;
  double difference(int k) const { return signed_index(k) * h(); }
  double frequency(int k) const;

  /// <f,g> = h * sum conj(f_j) g_j
  cplx inner(const Vector& f, const Vector& g) const { return h() * f.dot(g); }
  double norm(const Vector& f) const;

  /// Discrete Laplacian (periodic 3-point stencil or Fourier-spectral).
  RealMatrix laplacian_matrix() const;
  /// Eigenvalues of -Laplacian on the plane waves exp(i w_k x), k = 0..d-1.
  RealVector laplacian_symbol() const;
  /// Kinetic operator -hbar^2 Laplacian / 2.
  RealMatrix kinetic_matrix() const;

  /// Unitary DFT matrix F with (F f)_k = d^{-1/2} sum_j exp(-i w_k x_j) f_j.
  Matrix dft_matrix() const;

 private:
  int d_;
  double L_;
  double hbar_;
  Laplacian lap_;
};

}  // namespace picklab
