#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "consflow/graph.hpp"
#include "consflow/linalg.hpp"

namespace consflow {

/// One agent's private constraint A_i x = b_i. The scalar-row case is a
/// 1-row block holding a_i' and b_i.
struct RowBlock {
  DenseMatrix matrix;  // rows x n, full row rank
  DenseVector rhs;     // rows
};

/// The equation Ax=b split into per-agent row blocks. Construction rejects
/// zero rows, rank-deficient blocks, and more rows than unknowns; whether
/// the stacked matrix has full row rank is checked at run setup.
class LinearSystem {
 public:
  LinearSystem(std::vector<RowBlock> blocks, std::size_t unknown_dim);

  /// One scalar row per agent.
  static LinearSystem from_rows(const DenseMatrix& a, const DenseVector& b);
  /// Consecutive rows of `a` grouped by `block_sizes` (must sum to a.rows).
  static LinearSystem from_blocks(const DenseMatrix& a, const DenseVector& b,
                                  const std::vector<std::size_t>& block_sizes);

  std::size_t unknown_dim() const { return unknown_dim_; }
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t total_rows() const { return total_rows_; }
  bool square() const { return total_rows_ == unknown_dim_; }
  const RowBlock& block(std::size_t i) const { return blocks_[i]; }
  const std::vector<RowBlock>& blocks() const { return blocks_; }

  /// All blocks stacked back into one m x n matrix / m-vector.
  DenseMatrix stacked_matrix() const;
  DenseVector stacked_rhs() const;

 private:
  std::vector<RowBlock> blocks_;
  std::size_t unknown_dim_ = 0;
  std::size_t total_rows_ = 0;
};

/// Orthogonal projector onto the kernel of a row block: symmetric,
/// idempotent, annihilates the block.
struct Projection {
  DenseMatrix matrix;  // n x n
};

/// P = I - A'(AA')^{-1}A; for a single row a this is I - aa'/(a'a).
Projection projection_for_block(const DenseMatrix& block);

/// Per-agent state vectors, one per graph vertex.
struct AgentState {
  std::vector<DenseVector> x;

  std::size_t agent_count() const { return x.size(); }
  bool all_finite() const;
};

enum class Variant { plain, restoring, gains };
enum class Integrator { euler, rk4 };
enum class InitMode { min_norm, tangent_noise, free_random };

Variant variant_from_string(const std::string& name);
Integrator integrator_from_string(const std::string& name);
InitMode init_from_string(const std::string& name);
const char* to_string(Variant v) noexcept;
const char* to_string(Integrator i) noexcept;
const char* to_string(InitMode m) noexcept;

struct FlowConfig {
  Variant variant = Variant::plain;
  double alpha = 1.0;                  // gains variant: coupling gain
  std::vector<double> alpha_i;         // gains variant: per-agent restoring gains
  Integrator integrator = Integrator::euler;
  std::optional<double> step;          // empty = auto rule
  std::size_t max_steps = 2'000'000;
  double convergence_tol = 1e-8;
  std::uint64_t seed = 0;
  InitMode init = InitMode::min_norm;
  std::size_t record_every = 10;
  double drift_tolerance = 1e-10;      // plain variant: admitted manifold drift
};

/// Per-agent projectors plus the restoring maps R_i = A_i'(A_i A_i')^{-1},
/// so one derivative evaluation is matrix-vector work only.
class FlowOperators {
 public:
  FlowOperators(const LinearSystem& system, const NetworkGraph& graph);

  const std::vector<Projection>& projections() const { return projections_; }
  const Projection& projection(std::size_t i) const { return projections_[i]; }
  const DenseMatrix& restorer(std::size_t i) const { return restorers_[i]; }

 private:
  std::vector<Projection> projections_;
  std::vector<DenseMatrix> restorers_;
};

/// dx_i = -P_i sum_{j in N_i} (x_i - x_j); neighbor sums accumulate in
/// ascending index order.
std::vector<DenseVector> rhs_plain(const AgentState& state,
                                   const NetworkGraph& g,
                                   const FlowOperators& ops);

/// Plain derivative plus the restoring pull -R_i (A_i x_i - b_i) back onto
/// each manifold. `rhs_offset` shifts every b entry uniformly; tracking
/// scenarios use it to move the manifolds without rebuilding the system.
std::vector<DenseVector> rhs_restoring(const AgentState& state,
                                       const NetworkGraph& g,
                                       const FlowOperators& ops,
                                       const LinearSystem& system,
                                       double rhs_offset = 0.0);

/// -alpha * P_i (neighbor sum) - alpha_i * restoring term.
std::vector<DenseVector> rhs_gains(const AgentState& state,
                                   const NetworkGraph& g,
                                   const FlowOperators& ops,
                                   const LinearSystem& system, double alpha,
                                   const std::vector<double>& alpha_i,
                                   double rhs_offset = 0.0);

/// Starting state per config.init: min_norm puts x_i(0) at the closest
/// point of its manifold to the origin; tangent_noise adds projected
/// uniform noise (still on the manifold); free_random draws unconstrained
/// uniform entries in [-1,1] and is only admitted for variants with a
/// restoring term.
AgentState initialize(const LinearSystem& system, const NetworkGraph& g,
                      const FlowConfig& config);

/// Default step size 1/(2*d_max + c): c = 0.5 for plain, 1 for
/// restoring/gains, keeping explicit Euler inside its stability bound
/// since lambda_max(L) <= 2*d_max.
double auto_step(const NetworkGraph& g, Variant variant);

/// Derivative field; the time argument serves time-varying right-hand sides.
using RhsFunction =
    std::function<std::vector<DenseVector>(const AgentState&, double)>;

/// One explicit Euler or classical RK4 step from time t. Throws
/// ErrorCode::non_finite if the state leaves the finite range (the
/// diagnostic for a too-large step size).
AgentState step(const AgentState& state, double t, double h,
                Integrator integrator, const RhsFunction& rhs);

// ---- per-state metrics ----

/// V = 1/2 sum_{(i,j) in E} ||x_i - x_j||^2.
double consensus_cost(const AgentState& state, const NetworkGraph& g);

/// max over edges of ||x_i - x_j||_inf.
double consensus_spread(const AgentState& state, const NetworkGraph& g);

/// max over agents of ||A_i x_i - b_i||_inf (with b uniformly shifted by
/// rhs_offset).
double manifold_residual(const AgentState& state, const LinearSystem& system,
                         double rhs_offset = 0.0);

}  // namespace consflow
