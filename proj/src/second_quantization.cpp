#include "picklab/second_quantization.hpp"

#include <cmath>
#include <set>
#include <string>

#include "picklab/first_quantization.hpp"

namespace picklab {

namespace {

void check_operator_dim(Eigen::Index rows, Eigen::Index expected, const char* what) {
  if (rows != expected)
    throw DimensionMismatch(std::string(what) + ": operator dimension " + std::to_string(rows) +
                            " does not match " + std::to_string(expected));
}

// Column `col` of dGamma(A): a+_i a_j |n> = sqrt(n_j (n_i + 1 - delta_ij)) |n - e_j + e_i>
void one_body_column(const Matrix& A, const SectorBasis& basis, Eigen::Index col, Matrix& out) {
  const int d = basis.modes();
  Occupation occ = basis.state(static_cast<std::size_t>(col));
  for (int j = 0; j < d; ++j) {
    if (occ[j] == 0) continue;
    const double aj = std::sqrt(static_cast<double>(occ[j]));
    occ[j] -= 1;
    for (int i = 0; i < d; ++i) {
      const cplx a = A(i, j);
      if (a == cplx{}) continue;
      const double amp = aj * std::sqrt(static_cast<double>(occ[i] + 1));
      occ[i] += 1;
      out(static_cast<Eigen::Index>(basis.rank(occ)), col) += a * amp;
      occ[i] -= 1;
    }
    occ[j] += 1;
  }
}

void two_body_column(const Matrix& W, const SectorBasis& basis, Eigen::Index col, Matrix& out) {
  const int d = basis.modes();
  Occupation occ = basis.state(static_cast<std::size_t>(col));
  for (int j = 0; j < d; ++j) {
    if (occ[j] == 0) continue;
    const double aj = std::sqrt(static_cast<double>(occ[j]));
    occ[j] -= 1;
    for (int q = 0; q < d; ++q) {
      if (occ[q] == 0) continue;
      const double aq = aj * std::sqrt(static_cast<double>(occ[q]));
      occ[q] -= 1;
      const Eigen::Index wc = j * d + q;
      for (int p = 0; p < d; ++p) {
        const double ap = aq * std::sqrt(static_cast<double>(occ[p] + 1));
        occ[p] += 1;
        for (int i = 0; i < d; ++i) {
          const cplx w = W(i * d + p, wc);
          if (w == cplx{}) continue;
          const double ai = ap * std::sqrt(static_cast<double>(occ[i] + 1));
          occ[i] += 1;
          out(static_cast<Eigen::Index>(basis.rank(occ)), col) += w * ai;
          occ[i] -= 1;
        }
        occ[p] -= 1;
      }
      occ[q] += 1;
    }
    occ[j] += 1;
  }
}

// Recursive m-body kernel: annihilate j_1..j_m, then create i_m..i_1.
struct NormalOrderedKernel {
  std::span<const Matrix> ops;
  const SectorBasis& basis;
  int d;
  std::vector<int> js;

  void annihilate_step(std::size_t k, Occupation& occ, double amp, Eigen::Index col, Matrix& out) {
    if (k == ops.size()) {
      create_step(0, occ, amp, cplx{1.0, 0.0}, col, out);
      return;
    }
    for (int j = 0; j < d; ++j) {
      if (occ[j] == 0) continue;
      const double a = amp * std::sqrt(static_cast<double>(occ[j]));
      occ[j] -= 1;
      js[k] = j;
      annihilate_step(k + 1, occ, a, col, out);
      occ[j] += 1;
    }
  }

  void create_step(std::size_t k, Occupation& occ, double amp, cplx coef, Eigen::Index col, Matrix& out) {
    if (k == ops.size()) {
      out(static_cast<Eigen::Index>(basis.rank(occ)), col) += coef * amp;
      return;
    }
    for (int i = 0; i < d; ++i) {
      const cplx c = ops[k](i, js[k]);
      if (c == cplx{}) continue;
      const double a = amp * std::sqrt(static_cast<double>(occ[i] + 1));
      occ[i] += 1;
      create_step(k + 1, occ, a, coef * c, col, out);
      occ[i] -= 1;
    }
  }
};

}  // namespace

Matrix second_quantize(const Matrix& A, const SectorBasis& basis) {
  check_operator_dim(A.rows(), basis.modes(), "second_quantize");
  const auto D = static_cast<Eigen::Index>(basis.size());
  Matrix out = Matrix::Zero(D, D);
#pragma omp parallel for schedule(static)
  for (Eigen::Index col = 0; col < D; ++col) one_body_column(A, basis, col, out);
  return out;
}

Matrix second_quantize_two_body(const Matrix& W, const SectorBasis& basis) {
  const int d = basis.modes();
  check_operator_dim(W.rows(), static_cast<Eigen::Index>(d) * d, "second_quantize_two_body");
  const auto D = static_cast<Eigen::Index>(basis.size());
  Matrix out = Matrix::Zero(D, D);
#pragma omp parallel for schedule(static)
  for (Eigen::Index col = 0; col < D; ++col) two_body_column(W, basis, col, out);
  return out;
}

Matrix normal_ordered(std::span<const Matrix> ops, const SectorBasis& basis) {
  for (const auto& op : ops) check_operator_dim(op.rows(), basis.modes(), "normal_ordered");
  const auto D = static_cast<Eigen::Index>(basis.size());
  Matrix out = Matrix::Zero(D, D);
  if (static_cast<int>(ops.size()) > basis.particles()) return out;
#pragma omp parallel for schedule(static)
  for (Eigen::Index col = 0; col < D; ++col) {
    NormalOrderedKernel k{ops, basis, basis.modes(), std::vector<int>(ops.size())};
    Occupation occ = basis.state(static_cast<std::size_t>(col));
    k.annihilate_step(0, occ, 1.0, col, out);
  }
  return out;
}

Vector annihilate(const Vector& psi, const SectorBasis& from, const SectorBasis& to, int mode) {
  if (to.particles() + 1 != from.particles() || to.modes() != from.modes())
    throw DimensionMismatch("annihilate: target sector must have one particle fewer");
  check_operator_dim(psi.size(), static_cast<Eigen::Index>(from.size()), "annihilate");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(to.size()));
  for (std::size_t s = 0; s < from.size(); ++s) {
    Occupation occ = from.state(s);
    if (occ[mode] == 0) continue;
    const double a = std::sqrt(static_cast<double>(occ[mode]));
    occ[mode] -= 1;
    out(static_cast<Eigen::Index>(to.rank(occ))) += a * psi(static_cast<Eigen::Index>(s));
  }
  return out;
}

SymOperator lift_mn(const OneBodyOperator& A, const BasisPtr& basis) {
  Matrix m = second_quantize(A.matrix(), *basis) / static_cast<double>(basis->particles());
  if (A.hermitian()) m = enforce_hermitian(m, hermitian_drift_tol, "lift_mn");
  return {basis, std::move(m)};
}

SymOperator lift_pair_sum(const RealVector& v, const BasisPtr& basis) {
  const int d = basis->modes();
  if (v.size() != d) throw DimensionMismatch("lift_pair_sum: table size must equal d");
  const double scale = v.cwiseAbs().maxCoeff();
  for (int k = 0; k < d; ++k)
    if (std::abs(v(k) - v((d - k) % d)) > 1e-12 * std::max(scale, 1.0))
      throw Error("lift_pair_sum: pair potential is not even");
  // diagonal in occupation: (1/2N) [ sum_{i != p} v_ip n_i n_p + sum_i v_0 n_i (n_i - 1) ]
  const auto D = static_cast<Eigen::Index>(basis->size());
  const double N = basis->particles();
  Matrix m = Matrix::Zero(D, D);
#pragma omp parallel for schedule(static)
  for (Eigen::Index s = 0; s < D; ++s) {
    const Occupation& n = basis->state(static_cast<std::size_t>(s));
    double e = 0.0;
    for (int i = 0; i < d; ++i) {
      if (n[i] == 0) continue;
      e += v(0) * n[i] * (n[i] - 1);
      for (int p = 0; p < d; ++p)
        if (p != i) e += v(((i - p) % d + d) % d) * n[i] * n[p];
    }
    m(s, s) = e / (2.0 * N);
  }
  return {basis, std::move(m)};
}

SymOperator lift_jk_product(std::span<const SlotOperator> ops, const BasisPtr& basis, JkRoute route,
                            int first_quantization_cap) {
  const int N = basis->particles();
  std::set<int> slots;
  for (const auto& so : ops) {
    if (so.slot < 1 || so.slot > N) throw Error("lift_jk_product: slot out of range");
    if (!slots.insert(so.slot).second) throw Error("lift_jk_product: repeated slot index");
    check_operator_dim(so.op.dim(), basis->modes(), "lift_jk_product");
  }
  if (ops.empty()) return SymOperator::identity(basis);

  if (route == JkRoute::first_quantized) {
    if (N > first_quantization_cap) throw Error("lift_jk_product: N above first-quantization cap");
    std::vector<std::pair<int, Matrix>> full_ops;
    for (const auto& so : ops) full_ops.emplace_back(so.slot, so.op.matrix());
    const Matrix full = first_quantization::slot_product(full_ops, N, basis->modes());
    return {basis, first_quantization::compress(full, *basis, first_quantization_cap)};
  }

  std::vector<Matrix> mats;
  for (const auto& so : ops) mats.push_back(so.op.matrix());
  double norm = 1.0;  // (N-m)!/N!
  for (int k = 0; k < static_cast<int>(mats.size()); ++k) norm /= static_cast<double>(N - k);
  return {basis, norm * normal_ordered(mats, *basis)};
}

namespace reference {

// Loop over hopping pairs first and resolve targets through the checked
// lookup; independent of the column kernels above.
Matrix second_quantize(const Matrix& A, const SectorBasis& basis) {
  check_operator_dim(A.rows(), basis.modes(), "reference::second_quantize");
  const int d = basis.modes();
  const auto D = static_cast<Eigen::Index>(basis.size());
  Matrix out = Matrix::Zero(D, D);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (Eigen::Index s = 0; s < D; ++s) {
        Occupation n = basis.state(static_cast<std::size_t>(s));
        if (n[j] == 0) continue;
        double amp = std::sqrt(static_cast<double>(n[j]));
        n[j] -= 1;
        amp *= std::sqrt(static_cast<double>(n[i] + 1));
        n[i] += 1;
        out(static_cast<Eigen::Index>(*basis.index_of(n)), s) += A(i, j) * amp;
      }
  return out;
}

Matrix second_quantize_two_body(const Matrix& W, const SectorBasis& basis) {
  const int d = basis.modes();
  check_operator_dim(W.rows(), static_cast<Eigen::Index>(d) * d, "reference::second_quantize_two_body");
  const auto D = static_cast<Eigen::Index>(basis.size());
  Matrix out = Matrix::Zero(D, D);
  for (int i = 0; i < d; ++i)
    for (int p = 0; p < d; ++p)
      for (int j = 0; j < d; ++j)
        for (int q = 0; q < d; ++q) {
          const cplx w = W(i * d + p, j * d + q);
          if (w == cplx{}) continue;
          for (Eigen::Index s = 0; s < D; ++s) {
            Occupation n = basis.state(static_cast<std::size_t>(s));
            double amp = 1.0;
            if (n[j] == 0) continue;
            amp *= std::sqrt(static_cast<double>(n[j]--));
            if (n[q] == 0) continue;
            amp *= std::sqrt(static_cast<double>(n[q]--));
            amp *= std::sqrt(static_cast<double>(++n[p]));
            amp *= std::sqrt(static_cast<double>(++n[i]));
            out(static_cast<Eigen::Index>(*basis.index_of(n)), s) += w * amp;
          }
        }
  return out;
}

}  // namespace reference

}  // namespace picklab
