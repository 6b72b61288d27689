#include "picklab/sector_basis.hpp"

#include <limits>
#include <numeric>

namespace picklab {

std::size_t SectorBasis::dimension(int N, int d) {
  // C(N+d-1, d-1) computed incrementally; exact while it fits
  const std::size_t big = std::numeric_limits<std::size_t>::max();
  if (d <= 0) return 0;
  std::size_t r = 1;
  const int k = d - 1;
  for (int i = 1; i <= k; ++i) {
    const std::size_t num = static_cast<std::size_t>(N + i);
    if (r > big / num) return big;
    r = r * num / static_cast<std::size_t>(i);
  }
  return r;
}

SectorBasis::SectorBasis(int N, int d, std::size_t cap) : N_(N), d_(d) {
  if (N < 0 || d < 1) throw Error("sector basis: need N >= 0 and d >= 1");
  const std::size_t D = dimension(N, d);
  if (D > cap) throw SectorTooLarge(N, d, D, cap);

  comp_.assign(N + 1, std::vector<std::size_t>(d + 1, 0));
  for (int r = 0; r <= N; ++r)
    for (int m = 1; m <= d; ++m) comp_[r][m] = dimension(r, m);

  states_.reserve(D);
  Occupation occ(d, 0);
  occ[0] = N;
  // Walk the lexicographically decreasing order: find the rightmost position
  // (excluding the last) holding a boson, move one to its right neighbour and
  // gather everything to the right of it into that neighbour.
  while (true) {
    states_.push_back(occ);
    if (d == 1) break;
    int p = d - 2;
    while (p >= 0 && occ[p] == 0) --p;
    if (p < 0) break;
    occ[p] -= 1;
    int rest = 1;
    for (int q = p + 1; q < d; ++q) {
      rest += occ[q];
      occ[q] = 0;
    }
    occ[p + 1] = rest;
  }
}

std::size_t SectorBasis::compositions(int particles, int modes) const {
  if (modes == 0) return particles == 0 ? 1 : 0;
  return comp_[particles][modes];
}

std::size_t SectorBasis::rank(const Occupation& occ) const {
  std::size_t idx = 0;
  int remaining = N_;
  for (int i = 0; i + 1 < d_; ++i) {
    const int tail_modes = d_ - i - 1;
    // states with the same prefix and a larger entry at position i come first
    for (int v = remaining; v > occ[i]; --v) idx += compositions(remaining - v, tail_modes);
    remaining -= occ[i];
  }
  return idx;
}

std::optional<std::size_t> SectorBasis::index_of(const Occupation& occ) const {
  if (static_cast<int>(occ.size()) != d_) return std::nullopt;
  int total = 0;
  for (int n : occ) {
    if (n < 0) return std::nullopt;
    total += n;
  }
  if (total != N_) return std::nullopt;
  return rank(occ);
}

BasisPtr enumerate_basis(int N, int d, std::size_t cap) {
  if (N < 1) throw Error("enumerate_basis: N must be >= 1");
  if (d < 2) throw Error("enumerate_basis: d must be >= 2");
  return std::make_shared<const SectorBasis>(N, d, cap);
}

}  // namespace picklab
