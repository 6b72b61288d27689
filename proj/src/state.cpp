#include "picklab/state.hpp"

#include <cmath>
#include <string>

namespace picklab {

void require_normalized(const GridGeometry& g, const Vector& psi, const char* what, double tol) {
  if (psi.size() != g.d()) throw DimensionMismatch(std::string(what) + ": wavefunction has wrong size");
  const double n = g.norm(psi);
  if (std::abs(n - 1.0) > tol)
    throw Error(std::string(what) + ": wavefunction norm " + std::to_string(n) + " is not 1");
}

Vector gaussian_wavefunction(const GridGeometry& g, double center, double width, double k0) {
  if (width <= 0.0) throw Error("gaussian_wavefunction: width must be positive");
  const double L = g.L();
  Vector psi(g.d());
  for (int j = 0; j < g.d(); ++j) {
    const double x = g.position(j);
    double dx = std::remainder(x - center, L);
    psi(j) = std::exp(-dx * dx / (4.0 * width * width)) * std::exp(I_unit * (k0 * x));
  }
  return psi / g.norm(psi);
}

Vector plane_wave(const GridGeometry& g, int mode) {
  Vector psi(g.d());
  const double w = g.frequency(((mode % g.d()) + g.d()) % g.d());
  for (int j = 0; j < g.d(); ++j) psi(j) = std::exp(I_unit * (w * g.position(j))) / std::sqrt(g.L());
  return psi;
}

}  // namespace picklab
