#include "picklab/first_quantization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace picklab::first_quantization {

namespace {

void check_cap(int N, int cap, const char* what) {
  if (N > cap)
    throw Error(std::string(what) + ": N=" + std::to_string(N) + " above first-quantization cap " +
                std::to_string(cap));
}

Occupation word_digits(std::size_t w, int N, int d) {
  Occupation digits(N);
  for (int k = N - 1; k >= 0; --k) {
    digits[k] = static_cast<int>(w % d);
    w /= d;
  }
  return digits;
}

std::size_t word_index(const Occupation& digits, int d) {
  std::size_t w = 0;
  for (int x : digits) w = w * d + x;
  return w;
}

}  // namespace

std::size_t full_dimension(int N, int d) {
  std::size_t r = 1;
  for (int k = 0; k < N; ++k) r *= static_cast<std::size_t>(d);
  return r;
}

Matrix embedding(const SectorBasis& basis, int cap) {
  const int N = basis.particles();
  const int d = basis.modes();
  check_cap(N, cap, "embedding");
  const std::size_t full = full_dimension(N, d);
  Matrix S = Matrix::Zero(static_cast<Eigen::Index>(full), static_cast<Eigen::Index>(basis.size()));
  std::vector<double> count(basis.size(), 0.0);
  for (std::size_t w = 0; w < full; ++w) {
    Occupation occ(d, 0);
    for (int x : word_digits(w, N, d)) occ[x] += 1;
    const std::size_t col = basis.rank(occ);
    S(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(col)) = 1.0;
    count[col] += 1.0;
  }
  // count[col] = N!/prod n_i!, the number of words per occupation
  for (std::size_t c = 0; c < basis.size(); ++c) S.col(static_cast<Eigen::Index>(c)) /= std::sqrt(count[c]);
  return S;
}

Matrix compress(const Matrix& full, const SectorBasis& basis, int cap) {
  const Matrix S = embedding(basis, cap);
  if (full.rows() != S.rows() || full.cols() != S.rows())
    throw DimensionMismatch("compress: operator does not act on the full tensor space");
  return S.adjoint() * full * S;
}

Matrix slot_operator(const Matrix& A, int slot, int N) {
  const auto d = A.rows();
  if (slot < 1 || slot > N) throw Error("slot_operator: slot out of range");
  Matrix out = Matrix::Identity(1, 1);
  for (int k = 1; k <= N; ++k) {
    const Matrix f = (k == slot) ? A : Matrix::Identity(d, d);
    out = Matrix(Eigen::kroneckerProduct(out, f));
  }
  return out;
}

Matrix slot_product(const std::vector<std::pair<int, Matrix>>& ops, int N, int d) {
  const auto full = static_cast<Eigen::Index>(full_dimension(N, d));
  Matrix out = Matrix::Identity(full, full);
  for (const auto& [slot, A] : ops) out = out * slot_operator(A, slot, N);
  return out;
}

Matrix pair_operator(const Matrix& W, int k, int l, int N, int d) {
  if (k == l || k < 1 || l < 1 || k > N || l > N) throw Error("pair_operator: bad slots");
  if (W.rows() != d * d) throw DimensionMismatch("pair_operator: W must be d^2 x d^2");
  const std::size_t full = full_dimension(N, d);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(full), static_cast<Eigen::Index>(full));
  for (std::size_t w = 0; w < full; ++w) {
    Occupation in = word_digits(w, N, d);
    const Eigen::Index c = in[k - 1] * d + in[l - 1];
    Occupation outw = in;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const cplx val = W(a * d + b, c);
        if (val == cplx{}) continue;
        outw[k - 1] = a;
        outw[l - 1] = b;
        out(static_cast<Eigen::Index>(word_index(outw, d)), static_cast<Eigen::Index>(w)) += val;
      }
  }
  return out;
}

Matrix pair_potential(const RealVector& v, int N) {
  const int d = static_cast<int>(v.size());
  const std::size_t full = full_dimension(N, d);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(full), static_cast<Eigen::Index>(full));
  for (std::size_t w = 0; w < full; ++w) {
    const Occupation x = word_digits(w, N, d);
    double e = 0.0;
    for (int j = 0; j < N; ++j)
      for (int k = j + 1; k < N; ++k) e += v(((x[j] - x[k]) % d + d) % d);
    out(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(w)) = e / N;
  }
  return out;
}

Matrix permutation(const std::vector<int>& sigma, int d) {
  const int N = static_cast<int>(sigma.size());
  const std::size_t full = full_dimension(N, d);
  Matrix U = Matrix::Zero(static_cast<Eigen::Index>(full), static_cast<Eigen::Index>(full));
  for (std::size_t w = 0; w < full; ++w) {
    const Occupation in = word_digits(w, N, d);
    Occupation out(N);
    for (int i = 0; i < N; ++i) out[sigma[i]] = in[i];
    U(static_cast<Eigen::Index>(word_index(out, d)), static_cast<Eigen::Index>(w)) = 1.0;
  }
  return U;
}

Matrix symmetrize_density(const Matrix& F, int N, int d, int cap) {
  check_cap(N, cap, "symmetrize_density");
  const auto full = static_cast<Eigen::Index>(full_dimension(N, d));
  if (F.rows() != full || F.cols() != full) throw DimensionMismatch("symmetrize_density: wrong size");
  std::vector<int> sigma(N);
  std::iota(sigma.begin(), sigma.end(), 0);
  Matrix acc = Matrix::Zero(full, full);
  int count = 0;
  do {
    const Matrix U = permutation(sigma, d);
    acc += U * F * U.adjoint();
    ++count;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return acc / static_cast<double>(count);
}

Matrix partial_trace_tail(const Matrix& F, int d, int n, int traced) {
  if (traced < 0 || traced > n) throw Error("partial_trace_tail: bad slot count");
  const auto keep = static_cast<Eigen::Index>(full_dimension(n - traced, d));
  const auto tail = static_cast<Eigen::Index>(full_dimension(traced, d));
  if (F.rows() != keep * tail) throw DimensionMismatch("partial_trace_tail: wrong size");
  Matrix out = Matrix::Zero(keep, keep);
  for (Eigen::Index a = 0; a < keep; ++a)
    for (Eigen::Index b = 0; b < keep; ++b)
      for (Eigen::Index t = 0; t < tail; ++t) out(a, b) += F(a * tail + t, b * tail + t);
  return out;
}

}  // namespace picklab::first_quantization
