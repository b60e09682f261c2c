#include "consflow/instances.hpp"

#include <cmath>

#include "consflow/rng.hpp"

namespace consflow {

DenseMatrix random_orthogonal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix sym(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      sym(i, j) = v;
      sym(j, i) = v;
    }
  }
  return sym_eigen(sym).vectors;
}

namespace {

std::vector<double> log_uniform_sigmas(std::size_t count, Rng& rng,
                                       double sigma_min, double sigma_max) {
  std::vector<double> sigmas(count);
  const double lo = std::log(sigma_min);
  const double hi = std::log(sigma_max);
  for (auto& s : sigmas) s = std::exp(rng.uniform(lo, hi));
  return sigmas;
}

DenseVector random_rhs(std::size_t m, Rng& rng) {
  DenseVector b(m);
  for (std::size_t i = 0; i < m; ++i) b[i] = rng.uniform(-1.0, 1.0);
  return b;
}

}  // namespace

DenseInstance random_square_instance(std::size_t n, std::uint64_t seed,
                                     double sigma_min, double sigma_max) {
  Rng rng(Rng::mix(seed, 0x5157));
  const DenseMatrix q2 = random_orthogonal(n, Rng::mix(seed, 2));
  const auto sigmas = log_uniform_sigmas(n, rng, sigma_min, sigma_max);

  DenseMatrix scaled = random_orthogonal(n, Rng::mix(seed, 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= sigmas[j];
  }
  return {scaled * transpose(q2), random_rhs(n, rng)};
}

DenseInstance random_rect_instance(std::size_t m, std::size_t n, std::uint64_t seed,
                                   double sigma_min, double sigma_max) {
  Rng rng(Rng::mix(seed, 0x5245));
  const DenseMatrix q_right = random_orthogonal(n, Rng::mix(seed, 3));
  const DenseMatrix q_left = random_orthogonal(m, Rng::mix(seed, 4));
  const auto sigmas = log_uniform_sigmas(m, rng, sigma_min, sigma_max);

  // First m rows of q_right' scaled by sigma, mixed on the left.
  DenseMatrix rows(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) rows(i, j) = sigmas[i] * q_right(j, i);
  }
  return {q_left * rows, random_rhs(m, rng)};
}

BlockInstance random_block_instance(std::size_t n, std::uint64_t seed) {
  const DenseInstance base = random_square_instance(n, Rng::mix(seed, 5));
  Rng rng(Rng::mix(seed, 6));
  std::vector<std::size_t> sizes;
  std::size_t used = 0;
  while (used < n) {
    std::size_t s = 1 + rng.below(3);
    // Keep at least two blocks so the graph coupling matters.
    if (sizes.empty() && s >= n && n >= 2) s = n - 1;
    s = std::min(s, n - used);
    sizes.push_back(s);
    used += s;
  }
  return {base.a, base.b, sizes};
}

LinearSystem to_system(const DenseInstance& inst) {
  return LinearSystem::from_rows(inst.a, inst.b);
}

LinearSystem to_system(const BlockInstance& inst) {
  return LinearSystem::from_blocks(inst.a, inst.b, inst.block_sizes);
}

}  // namespace consflow
