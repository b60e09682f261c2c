#pragma once

#include <cstdint>

#include "consflow/flow.hpp"
#include "consflow/linalg.hpp"

namespace consflow {

/// Seeded instance generators used by the sweep and the test suites.
/// All are pure functions of their arguments.

/// Random n x n orthogonal matrix: eigenvector basis of a seeded random
/// symmetric matrix.
DenseMatrix random_orthogonal(std::size_t n, std::uint64_t seed);

/// Random nonsingular A = Q1 * diag(sigma) * Q2' with singular values
/// log-uniform in [sigma_min, sigma_max]; the condition number is bounded
/// by sigma_max/sigma_min by construction. Right-hand side uniform in [-1,1].
struct DenseInstance {
  DenseMatrix a;
  DenseVector b;
};
DenseInstance random_square_instance(std::size_t n, std::uint64_t seed,
                                     double sigma_min = 0.5, double sigma_max = 2.0);

/// Random m x n (m < n) full-row-rank instance: m orthonormal rows scaled
/// by singular values, mixed by a random m x m orthogonal factor.
DenseInstance random_rect_instance(std::size_t m, std::size_t n, std::uint64_t seed,
                                   double sigma_min = 0.5, double sigma_max = 2.0);

/// Square instance with rows grouped into blocks of size 1..3 (at least
/// two blocks for n >= 2).
struct BlockInstance {
  DenseMatrix a;
  DenseVector b;
  std::vector<std::size_t> block_sizes;
};
BlockInstance random_block_instance(std::size_t n, std::uint64_t seed);

LinearSystem to_system(const DenseInstance& inst);
LinearSystem to_system(const BlockInstance& inst);

}  // namespace consflow
