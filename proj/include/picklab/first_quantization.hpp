#pragma once

#include <utility>
#include <vector>

#include "picklab/sector_basis.hpp"
#include "picklab/types.hpp"

/// Brute-force operators on the full tensor space (C^d)^{⊗N}.
///
/// Words |w_1 ... w_N> are indexed with slot 1 most significant, so a
/// product A ⊗ B of Eigen Kronecker products acts with A on slot 1. Only
/// meant for small N; every entry point checks `cap`.
namespace picklab::first_quantization {

inline constexpr int default_cap = 4;

std::size_t full_dimension(int N, int d);

/// Isometry S: sector -> full space, column n = sqrt(prod n_i! / N!) * sum of
/// all words with occupation n.
Matrix embedding(const SectorBasis& basis, int cap = default_cap);

/// S^dagger X S.
Matrix compress(const Matrix& full, const SectorBasis& basis, int cap = default_cap);

/// J_slot(A) = I ⊗ .. ⊗ A ⊗ .. ⊗ I, slot 1-based.
Matrix slot_operator(const Matrix& A, int slot, int N);

/// Product of J_{slot}(A) in the given order.
Matrix slot_product(const std::vector<std::pair<int, Matrix>>& ops, int N, int d);

/// Two-body W (d^2 x d^2, first factor on slot k) acting on slots (k, l).
Matrix pair_operator(const Matrix& W, int k, int l, int N, int d);

/// (1/N) sum_{j<k} v(x_j - x_k), v tabulated by difference index.
Matrix pair_potential(const RealVector& v_by_difference, int N);

/// U_sigma |w_1..w_N> = |w_{sigma^{-1}(1)} .. w_{sigma^{-1}(N)}>, i.e. the
/// content of slot i moves to slot sigma(i). sigma is 0-based.
Matrix permutation(const std::vector<int>& sigma, int d);

/// (1/N!) sum_sigma U_sigma F U_sigma^dagger.
Matrix symmetrize_density(const Matrix& F, int N, int d, int cap = default_cap);

/// Partial trace over the last `traced` slots of an operator on (C^d)^{⊗n}.
Matrix partial_trace_tail(const Matrix& F, int d, int n, int traced);

}  // namespace picklab::first_quantization
