#pragma once

#include <optional>

#include "consflow/flow.hpp"
#include "consflow/graph.hpp"
#include "consflow/linalg.hpp"

namespace consflow {

/// The stacked operators of the compact form: P block-diagonal of the
/// per-agent projectors, Lbar = L (x) I_n, both N x N with
/// N = agent_count * unknown_dim.
struct StackedOperators {
  DenseMatrix p;
  DenseMatrix lbar;
};

StackedOperators stacked_operators(const LinearSystem& system,
                                   const NetworkGraph& g);

/// Smallest nonzero eigenvalue of P Lbar, computed from the symmetric
/// P Lbar P (same spectrum). "Nonzero" means above
/// tol::zero_eigen_rel * lambda_max. Requires full row rank and a
/// connected graph.
double rho(const LinearSystem& system, const NetworkGraph& g);

struct Lemma1Check {
  double min_real;  // smallest eigenvalue of P Lbar P + I - P
  double max_imag;  // largest |imag| on the general path for P Lbar + I - P
};

/// Checks that the error-system matrix P Lbar + I - P has a real positive
/// spectrum: the symmetric similar form gives min_real; the general
/// eigensolver on P Lbar + I - P itself gives max_imag and must agree with
/// the symmetric spectrum to tol::spectra_agree. Requires ker A = 0
/// (square full-rank system).
Lemma1Check verify_lemma1(const LinearSystem& system, const NetworkGraph& g);

/// True iff rho <= lambda2(L) + tol::theorem2_slack. Also recomputes rho
/// through the orthonormal-basis route (smallest nonzero eigenvalue of
/// Qbar' Lbar Qbar with Qbar a basis of Im P) and throws if the two values
/// disagree beyond tol::rho_dual_path.
bool verify_theorem2(const LinearSystem& system, const NetworkGraph& g);

/// Multiplicity of the zero eigenvalue of P Lbar P at the relative
/// threshold; equals unknown_dim for square nonsingular systems.
std::size_t equilibrium_space_dim(const LinearSystem& system,
                                  const NetworkGraph& g);

struct SpectralReport {
  double rho = 0.0;
  double rho_qbar = 0.0;  // independent recomputation via Qbar' Lbar Qbar
  double lambda2 = 0.0;
  bool theorem2_holds = false;
  std::size_t equilibrium_dim = 0;
  // Only present when ker A = 0 (square systems).
  std::optional<double> lemma1_min_eigenvalue;
  std::optional<double> lemma1_max_imag;
};

/// One-pass analysis sharing the eigensolves across all the checks above.
/// The Lemma-1 fields apply to square systems only and can be skipped when
/// a caller sweeps many instances and does not need them.
SpectralReport spectral_report(const LinearSystem& system, const NetworkGraph& g,
                               bool include_lemma1 = true);

/// Orthonormal basis of Im P assembled per agent from eigenvectors of the
/// symmetric idempotent projector blocks (eigenvalue within
/// tol::projector_one of 1), re-orthonormalized by Gram-Schmidt.
DenseMatrix image_basis(const LinearSystem& system);

}  // namespace consflow
