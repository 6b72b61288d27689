#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "picklab/types.hpp"

namespace picklab {

using Occupation = std::vector<int>;

/// Occupation-number basis of the bosonic N-particle sector over d modes.
///
/// States are ordered lexicographically decreasing, (N,0,...,0) first and
/// (0,...,0,N) last. Reverse lookup is the combinatorial rank of that order,
/// so no hash table is kept.
class SectorBasis {
 public:
  static constexpr std::size_t default_cap = 20000;

  /// Accepts N >= 0 so that annihilation targets (N-m particles) exist.
  SectorBasis(int N, int d, std::size_t cap = default_cap);

  int particles() const { return N_; }
  int modes() const { return d_; }
  std::size_t size() const { return states_.size(); }
  const Occupation& state(std::size_t i) const { return states_[i]; }
  const std::vector<Occupation>& states() const { return states_; }

  /// Position of an occupation vector, nullopt if it is not in this sector.
  std::optional<std::size_t> index_of(const Occupation& occ) const;
  /// Unchecked rank; occ must have d entries summing to N.
  std::size_t rank(const Occupation& occ) const;

  /// binomial(N+d-1, N), saturating at SIZE_MAX.
  static std::size_t dimension(int N, int d);

 private:
  std::size_t compositions(int particles, int modes) const;

  int N_;
  int d_;
  std::vector<Occupation> states_;
  // comp_[r][m] = number of ways to put r bosons in m modes
  std::vector<std::vector<std::size_t>> comp_;
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

/// Checked construction: N >= 1, d >= 2, D <= cap.
BasisPtr enumerate_basis(int N, int d, std::size_t cap = SectorBasis::default_cap);

}  // namespace picklab
