#include "consflow/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "consflow/errors.hpp"
#include "consflow/tolerances.hpp"

namespace consflow {

namespace {

void require_setup(const LinearSystem& system, const NetworkGraph& g) {
  if (g.vertex_count() != system.block_count()) {
    throw Error(ErrorCode::mismatched_topology,
                "graph vertex count != system block count");
  }
  if (!is_connected(g)) {
    throw Error(ErrorCode::disconnected, "analysis needs a connected graph");
  }
  if (rank(system.stacked_matrix()) != system.total_rows()) {
    throw Error(ErrorCode::rank_deficient, "stacked matrix is not full row rank");
  }
}

// Smallest eigenvalue above the relative zero threshold, plus the count of
// eigenvalues at or below it. `values` ascending.
std::pair<double, std::size_t> smallest_nonzero(const std::vector<double>& values) {
  const double lambda_max = values.empty() ? 0.0 : values.back();
  const double threshold = tol::zero_eigen_rel * lambda_max;
  std::size_t zeros = 0;
  for (double v : values) {
    if (v > threshold) return {v, zeros};
    ++zeros;
  }
  return {0.0, zeros};
}

}  // namespace

StackedOperators stacked_operators(const LinearSystem& system,
                                   const NetworkGraph& g) {
  if (g.vertex_count() != system.block_count()) {
    throw Error(ErrorCode::mismatched_topology,
                "graph vertex count != system block count");
  }
  const std::size_t n = system.unknown_dim();
  const std::size_t agents = system.block_count();
  const std::size_t big_n = agents * n;

  DenseMatrix p(big_n, big_n);
  for (std::size_t i = 0; i < agents; ++i) {
    const Projection proj = projection_for_block(system.block(i).matrix);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        p(i * n + r, i * n + c) = proj.matrix(r, c);
      }
    }
  }
  return {std::move(p), kron(laplacian(g), DenseMatrix::identity(n))};
}

double rho(const LinearSystem& system, const NetworkGraph& g) {
  require_setup(system, g);
  const auto ops = stacked_operators(system, g);
  const DenseMatrix plp = ops.p * ops.lbar * ops.p;
  return smallest_nonzero(sym_eigenvalues(plp)).first;
}

std::size_t equilibrium_space_dim(const LinearSystem& system,
                                  const NetworkGraph& g) {
  require_setup(system, g);
  const auto ops = stacked_operators(system, g);
  const DenseMatrix plp = ops.p * ops.lbar * ops.p;
  return smallest_nonzero(sym_eigenvalues(plp)).second;
}

Lemma1Check verify_lemma1(const LinearSystem& system, const NetworkGraph& g) {
  require_setup(system, g);
  if (!system.square()) {
    throw Error(ErrorCode::rank_deficient,
                "lemma 1 check needs ker A = 0 (square full-rank system)");
  }
  const auto ops = stacked_operators(system, g);
  const std::size_t big_n = ops.p.rows();
  const DenseMatrix identity = DenseMatrix::identity(big_n);

  const DenseMatrix sym_form = ops.p * ops.lbar * ops.p + identity - ops.p;
  const std::vector<double> sym_values = sym_eigenvalues(sym_form);

  const DenseMatrix general_form = ops.p * ops.lbar + identity - ops.p;
  const auto general_values = general_eigenvalues(general_form);

  double max_imag = 0.0;
  for (const auto& v : general_values) {
    max_imag = std::max(max_imag, std::abs(v.imag()));
  }
  // The two routes must produce the same spectrum (sorted real parts).
  double max_diff = 0.0;
  for (std::size_t i = 0; i < sym_values.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(sym_values[i] - general_values[i].real()));
  }
  if (max_diff > tol::spectra_agree) {
    throw Error(ErrorCode::no_convergence,
                "symmetric and general spectra disagree by " +
                    std::to_string(max_diff));
  }
  return {sym_values.front(), max_imag};
}

DenseMatrix image_basis(const LinearSystem& system) {
  const std::size_t n = system.unknown_dim();
  const std::size_t agents = system.block_count();
  const std::size_t big_n = agents * n;

  // Per-agent kernel bases; P is block diagonal so its image basis is too.
  std::vector<std::vector<DenseVector>> agent_basis(agents);
  std::size_t total_cols = 0;
  for (std::size_t i = 0; i < agents; ++i) {
    const Projection proj = projection_for_block(system.block(i).matrix);
    const EigenResult eig = sym_eigen(proj.matrix);
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
      if (std::abs(eig.values[k] - 1.0) > tol::projector_one) continue;
      DenseVector v(n);
      for (std::size_t r = 0; r < n; ++r) v[r] = eig.vectors(r, k);
      agent_basis[i].push_back(std::move(v));
    }
    // Re-enforce orthonormality (modified Gram-Schmidt).
    auto& basis = agent_basis[i];
    for (std::size_t k = 0; k < basis.size(); ++k) {
      for (std::size_t j = 0; j < k; ++j) {
        const double proj_coeff = dot(basis[j], basis[k]);
        for (std::size_t r = 0; r < n; ++r) basis[k][r] -= proj_coeff * basis[j][r];
      }
      const double nrm = norm2(basis[k]);
      for (std::size_t r = 0; r < n; ++r) basis[k][r] /= nrm;
    }
    total_cols += basis.size();
  }

  DenseMatrix qbar(big_n, total_cols);
  std::size_t col = 0;
  for (std::size_t i = 0; i < agents; ++i) {
    for (const DenseVector& v : agent_basis[i]) {
      for (std::size_t r = 0; r < n; ++r) qbar(i * n + r, col) = v[r];
      ++col;
    }
  }
  return qbar;
}

namespace {

double rho_via_image_basis(const LinearSystem& system, const DenseMatrix& lbar) {
  const DenseMatrix qbar = image_basis(system);
  const DenseMatrix reduced = transpose(qbar) * lbar * qbar;
  return smallest_nonzero(sym_eigenvalues(reduced)).first;
}

}  // namespace

bool verify_theorem2(const LinearSystem& system, const NetworkGraph& g) {
  require_setup(system, g);
  const auto ops = stacked_operators(system, g);
  const DenseMatrix plp = ops.p * ops.lbar * ops.p;
  const double rho_direct = smallest_nonzero(sym_eigenvalues(plp)).first;
  const double rho_qbar = rho_via_image_basis(system, ops.lbar);
  if (std::abs(rho_direct - rho_qbar) > tol::rho_dual_path) {
    throw Error(ErrorCode::no_convergence,
                "dual-path rho computations disagree: " +
                    std::to_string(rho_direct) + " vs " + std::to_string(rho_qbar));
  }
  return rho_direct <= lambda2(g) + tol::theorem2_slack;
}

SpectralReport spectral_report(const LinearSystem& system, const NetworkGraph& g,
                               bool include_lemma1) {
  require_setup(system, g);
  const auto ops = stacked_operators(system, g);
  const DenseMatrix plp = ops.p * ops.lbar * ops.p;
  const auto plp_values = sym_eigenvalues(plp);
  const auto [rho_direct, zero_count] = smallest_nonzero(plp_values);

  SpectralReport report;
  report.rho = rho_direct;
  report.rho_qbar = rho_via_image_basis(system, ops.lbar);
  if (std::abs(report.rho - report.rho_qbar) > tol::rho_dual_path) {
    throw Error(ErrorCode::no_convergence,
                "dual-path rho computations disagree: " +
                    std::to_string(report.rho) + " vs " +
                    std::to_string(report.rho_qbar));
  }
  report.lambda2 = lambda2(g);
  report.theorem2_holds = report.rho <= report.lambda2 + tol::theorem2_slack;
  report.equilibrium_dim = zero_count;

  if (include_lemma1 && system.square()) {
    const Lemma1Check lemma1 = verify_lemma1(system, g);
    report.lemma1_min_eigenvalue = lemma1.min_real;
    report.lemma1_max_imag = lemma1.max_imag;
  }
  return report;
}

}  // namespace consflow
