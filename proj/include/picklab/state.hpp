#pragma once

#include "picklab/geometry.hpp"

namespace picklab {

inline constexpr double state_norm_tol = 1e-10;

/// Single-particle wavefunction on the grid, normalized in the h-weighted norm.
struct HartreeState {
  Vector psi;
  double t = 0.0;
};

/// Throws unless |‖psi‖_h - 1| <= tol.
void require_normalized(const GridGeometry& g, const Vector& psi, const char* what, double tol = state_norm_tol);

/// Normalized Gaussian wave packet exp(-dx^2/(4 width^2) + i k0 x) with dx the
/// minimal-image distance to `center`.
Vector gaussian_wavefunction(const GridGeometry& g, double center, double width, double k0 = 0.0);

/// exp(i w_mode x)/sqrt(L).
Vector plane_wave(const GridGeometry& g, int mode);

/// Coordinates sqrt(h) psi in the orthonormal grid basis.
inline Vector orthonormal_coefficients(const GridGeometry& g, const Vector& psi) { return std::sqrt(g.h()) * psi; }

}  // namespace picklab
