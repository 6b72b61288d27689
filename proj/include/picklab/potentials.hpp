#pragma once

#include <string>
#include <vector>

#include "picklab/geometry.hpp"
#include "picklab/operators.hpp"

namespace picklab {

enum class PotentialKind { gaussian, soft_coulomb, box, custom_table };

PotentialKind parse_potential_kind(const std::string& s);
std::string to_string(PotentialKind k);

struct PotentialParams {
  double g = 1.0;      // amplitude
  double sigma = 1.0;  // gaussian width
  double eps = 1.0;    // soft-Coulomb softening
  double width = 1.0;  // box half-width
};

/// Even pair potential tabulated on grid differences: values[k] = v(x_k - x_0),
/// k = 0..d-1, so values[k] and values[d-k] describe x and -x.
class PairPotential {
 public:
  /// Rejects tables that are not even or contain non-finite entries.
  PairPotential(PotentialKind kind, PotentialParams params, RealVector values);

  PotentialKind kind() const { return kind_; }
  const PotentialParams& params() const { return params_; }
  const RealVector& values() const { return values_; }
  int d() const { return static_cast<int>(values_.size()); }
  double at(int k) const { return values_(((k % d()) + d()) % d()); }

  /// v(x_i - x_j) as a d^2 x d^2 diagonal two-body matrix.
  Matrix two_body_matrix() const;

 private:
  PotentialKind kind_;
  PotentialParams params_;
  RealVector values_;
};

/// True iff v[k] == v[(d-k) mod d] to 1e-12 relative.
bool is_even_table(const RealVector& v);

PairPotential build_potential(PotentialKind kind, const PotentialParams& params, const GridGeometry& g);

/// CSV with two columns (x_index, value); x_index is a difference index taken
/// modulo d, every residue must appear exactly once. A header row is allowed.
PairPotential load_custom_table(const std::string& path, const GridGeometry& g);

/// Discrete Fourier data of an even pair potential.
///
/// vhat_k = sum_m v[m] exp(-i w_k x_m), so v(x) = (1/d) sum_k vhat_k exp(i w_k x),
/// and E_k = diag(exp(i w_k x_j)).
class FourierModes {
 public:
  FourierModes(const PairPotential& v, const GridGeometry& g);

  int size() const { return static_cast<int>(vhat_.size()); }
  const RealVector& omegas() const { return omegas_; }
  const RealVector& vhat() const { return vhat_; }
  const OneBodyOperator& E(int k) const { return E_[k]; }
  /// Index of -w_k.
  int mirror(int k) const { return (size() - k) % size(); }
  /// max_x |v(x) - (1/d) sum vhat exp(i w x)|
  double reconstruction_error() const { return reconstruction_error_; }

 private:
  RealVector omegas_;
  RealVector vhat_;
  std::vector<OneBodyOperator> E_;
  double reconstruction_error_ = 0.0;
};

struct L2LinfSplit {
  double norm = 0.0;
  double cutoff = 0.0;
  RealVector v1;  // unbounded part (measured in the h-weighted l2 norm)
  RealVector v2;  // clamp(v, -c, c)
};

/// inf over clamping splits of sqrt(h sum v1^2) + max |v2|.
L2LinfSplit l2_linf_decomposition(const RealVector& v, double h);

/// (v * |psi|^2)(x) = h sum_y v(x - y) |psi(y)|^2
RealVector mean_field_values(const PairPotential& v, const Vector& psi, const GridGeometry& g);
OneBodyOperator mean_field_potential(const PairPotential& v, const Vector& psi, const GridGeometry& g);

/// max_x (h sum_y v(x-y)^2 |psi(y)|^2)^{1/2}
double ell_functional(const PairPotential& v, const Vector& psi, const GridGeometry& g);

/// ‖(I - Laplacian) psi‖_h with the grid Laplacian.
double h2_norm(const Vector& psi, const GridGeometry& g);

/// 2 max(1, C_S) ‖v‖_{L2+Linf} ‖psi‖_{H2}
double L_functional(const PairPotential& v, const Vector& psi, const GridGeometry& g, double sobolev_constant = 1.0);

/// Smallest C with ‖f‖_inf <= C ‖(I - Laplacian) f‖_h on the grid.
double discrete_sobolev_constant(const GridGeometry& g);

}  // namespace picklab
