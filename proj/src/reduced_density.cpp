#include "picklab/reduced_density.hpp"

#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "picklab/operators.hpp"
#include "picklab/second_quantization.hpp"

namespace picklab {

Matrix reduced_density(const Vector& Psi, const SectorBasis& basis, int m, int reduced_cap) {
  const int N = basis.particles();
  const int d = basis.modes();
  if (m < 1 || m > N || m > reduced_cap)
    throw Error("reduced_density: m=" + std::to_string(m) + " outside [1, min(N, " +
                std::to_string(reduced_cap) + ")]");
  if (Psi.size() != static_cast<Eigen::Index>(basis.size()))
    throw DimensionMismatch("reduced_density: state does not match sector");
  if (std::abs(Psi.norm() - 1.0) > 1e-10) throw Error("reduced_density: state is not normalized");

  // phi_{a_1..a_m} = a_{a_m}..a_{a_1} Psi, stored as columns on the (N-m) sector
  std::vector<SectorBasis> sectors;
  sectors.reserve(m + 1);
  for (int r = 0; r <= m; ++r) sectors.emplace_back(N - r, d, SIZE_MAX);

  Matrix level = Psi;  // columns indexed by multi-index prefix
  for (int r = 1; r <= m; ++r) {
    const auto prev = level.cols();
    Matrix next(static_cast<Eigen::Index>(sectors[r].size()), prev * d);
#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < prev * d; ++c)
      next.col(c) = annihilate(level.col(c / d), sectors[r - 1], sectors[r], static_cast<int>(c % d));
    level = std::move(next);
  }

  double norm = 1.0;  // (N-m)!/N!
  for (int k = 0; k < m; ++k) norm /= static_cast<double>(N - k);
  const Matrix F = norm * (level.adjoint() * level).transpose();
  return enforce_hermitian(F, 1e-10, "reduced_density");
}

Matrix tensor_power(const Matrix& A, int m) {
  Matrix out = Matrix::Identity(1, 1);
  for (int k = 0; k < m; ++k) out = Matrix(Eigen::kroneckerProduct(out, A));
  return out;
}

}  // namespace picklab
