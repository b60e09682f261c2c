#pragma once

#include <cstddef>

// Single table of numeric tolerances. Implementation code and the test
// suites reference these constants instead of repeating literals, so a
// threshold can never drift between a check and the property that tests it.
namespace consflow::tol {

// Symmetry precondition for the Jacobi eigensolver and projector checks:
// max |m(i,j) - m(j,i)| admitted.
inline constexpr double symmetry_check = 1e-10;

// Jacobi stops when the off-diagonal Frobenius norm falls below
// jacobi_offdiag_rel * ||M||_F, or fails after jacobi_max_sweeps sweeps.
inline constexpr double jacobi_offdiag_rel = 1e-12;
inline constexpr std::size_t jacobi_max_sweeps = 50;

// EigenResult contract: pairwise orthonormality of eigenvectors and the
// per-pair reconstruction bound ||M v - lambda v|| <= recon * (1+|lambda|) * ||v||.
inline constexpr double eigen_orthonormal = 1e-10;
inline constexpr double eigen_reconstruction = 1e-8;

// Gaussian elimination: a pivot below solve_pivot_rel * max|A| is singular.
// Well-conditioned solves satisfy ||Ax-b||_inf <= solve_residual_rel * (1+||b||_inf).
inline constexpr double solve_pivot_rel = 1e-12;
inline constexpr double solve_residual_rel = 1e-9;

// Numerical rank: pivots below rank_pivot_rel * max|A| do not count.
inline constexpr double rank_pivot_rel = 1e-10;

// General (nonsymmetric) eigenvalue path: total QR iteration cap and the
// accuracy target it is expected to meet on the small matrices it serves.
inline constexpr std::size_t general_eigen_max_iter = 500;
inline constexpr double general_eigen_accuracy = 1e-7;

// Projection matrix contract.
inline constexpr double projection_symmetry = 1e-10;
inline constexpr double projection_idempotent = 1e-9;
inline constexpr double projection_annihilate = 1e-9;

// Flow: tangency of the plain right-hand side and the per-step Lyapunov
// slack V(k+1) <= V(k) + lyapunov_step_slack.
inline constexpr double tangency_check = 1e-10;
inline constexpr double lyapunov_step_slack = 1e-12;
inline constexpr double manifold_drift = 1e-10;

// Spectral: eigenvalues below zero_eigen_rel * lambda_max count as zero;
// eigenvectors of a projector with eigenvalue within projector_one of 1
// span its image; dual-path rho computations must agree to rho_dual_path.
inline constexpr double zero_eigen_rel = 1e-9;
inline constexpr double projector_one = 1e-6;
inline constexpr double rho_dual_path = 1e-7;
inline constexpr double theorem2_slack = 1e-9;
inline constexpr double lemma1_max_imag = 1e-7;
inline constexpr double spectra_agree = 1e-6;

// Graph: positive-semidefiniteness slack, connectivity threshold on
// lambda2, and alignment of the Laplacian kernel with the ones vector.
inline constexpr double laplacian_psd_slack = 1e-10;
inline constexpr double lambda2_positive = 1e-9;
inline constexpr double kernel_ones_align = 1e-8;
inline constexpr double lambda2_upper_slack = 1e-9;
inline constexpr double lambda2_complete_eq = 1e-7;

// Harness: points with oracle distance at or below rate_fit_floor are
// roundoff and excluded from rate fits.
inline constexpr double rate_fit_floor = 1e-13;

}  // namespace consflow::tol
