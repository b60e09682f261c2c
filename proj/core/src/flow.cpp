#include "consflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include "consflow/errors.hpp"
#include "consflow/rng.hpp"
#include "consflow/tolerances.hpp"

namespace consflow {

LinearSystem::LinearSystem(std::vector<RowBlock> blocks, std::size_t unknown_dim)
    : blocks_(std::move(blocks)), unknown_dim_(unknown_dim) {
  if (blocks_.empty()) {
    throw Error(ErrorCode::bad_param, "system needs at least one row block");
  }
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const RowBlock& blk = blocks_[i];
    if (blk.matrix.cols() != unknown_dim_) {
      throw Error(ErrorCode::bad_param,
                  "block " + std::to_string(i) + " column count != unknowns");
    }
    if (blk.matrix.rows() == 0) {
      throw Error(ErrorCode::bad_param, "block " + std::to_string(i) + " is empty");
    }
    if (blk.rhs.dim() != blk.matrix.rows()) {
      throw Error(ErrorCode::bad_param,
                  "block " + std::to_string(i) + " rhs length != rows");
    }
    for (std::size_t r = 0; r < blk.matrix.rows(); ++r) {
      double mag = 0.0;
      for (std::size_t c = 0; c < unknown_dim_; ++c) {
        mag = std::max(mag, std::abs(blk.matrix(r, c)));
      }
      if (mag == 0.0) {
        throw Error(ErrorCode::zero_row,
                    "zero row in block " + std::to_string(i));
      }
    }
    if (rank(blk.matrix) != blk.matrix.rows()) {
      throw Error(ErrorCode::rank_deficient,
                  "block " + std::to_string(i) + " is not full row rank");
    }
    total_rows_ += blk.matrix.rows();
  }
  if (total_rows_ > unknown_dim_) {
    throw Error(ErrorCode::bad_param,
                "more rows than unknowns (tall systems unsupported)");
  }
}

LinearSystem LinearSystem::from_rows(const DenseMatrix& a, const DenseVector& b) {
  std::vector<std::size_t> sizes(a.rows(), 1);
  return from_blocks(a, b, sizes);
}

LinearSystem LinearSystem::from_blocks(const DenseMatrix& a, const DenseVector& b,
                                       const std::vector<std::size_t>& block_sizes) {
  if (a.rows() != b.dim()) {
    throw Error(ErrorCode::bad_param, "rhs length != matrix rows");
  }
  std::size_t total = 0;
  for (std::size_t s : block_sizes) total += s;
  if (total != a.rows()) {
    throw Error(ErrorCode::bad_param, "block sizes do not sum to matrix rows");
  }
  std::vector<RowBlock> blocks;
  blocks.reserve(block_sizes.size());
  std::size_t row = 0;
  for (std::size_t s : block_sizes) {
    if (s == 0) {
      throw Error(ErrorCode::bad_param, "zero block size");
    }
    DenseMatrix blk(s, a.cols());
    DenseVector rhs(s);
    for (std::size_t r = 0; r < s; ++r) {
      for (std::size_t c = 0; c < a.cols(); ++c) blk(r, c) = a(row + r, c);
      rhs[r] = b[row + r];
    }
    blocks.push_back({std::move(blk), std::move(rhs)});
    row += s;
  }
  return LinearSystem(std::move(blocks), a.cols());
}

DenseMatrix LinearSystem::stacked_matrix() const {
  DenseMatrix a(total_rows_, unknown_dim_);
  std::size_t row = 0;
  for (const RowBlock& blk : blocks_) {
    for (std::size_t r = 0; r < blk.matrix.rows(); ++r, ++row) {
      for (std::size_t c = 0; c < unknown_dim_; ++c) a(row, c) = blk.matrix(r, c);
    }
  }
  return a;
}

DenseVector LinearSystem::stacked_rhs() const {
  DenseVector b(total_rows_);
  std::size_t row = 0;
  for (const RowBlock& blk : blocks_) {
    for (std::size_t r = 0; r < blk.rhs.dim(); ++r, ++row) b[row] = blk.rhs[r];
  }
  return b;
}

namespace {

// Columns of A'(AA')^{-1}, i.e. the map pulling a block residual back onto
// the manifold. Solves (AA') y = column for each column of A.
DenseMatrix restoring_map(const DenseMatrix& block) {
  const std::size_t rows = block.rows();
  DenseMatrix gram(rows, rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < rows; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < block.cols(); ++c) s += block(i, c) * block(j, c);
      gram(i, j) = s;
    }
  }
  DenseMatrix inv_cols(rows, rows);
  for (std::size_t j = 0; j < rows; ++j) {
    DenseVector e(rows);
    e[j] = 1.0;
    DenseVector col;
    try {
      col = direct_solve(gram, e);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::singular) {
        throw Error(ErrorCode::rank_deficient, "block Gram matrix is singular");
      }
      throw;
    }
    for (std::size_t i = 0; i < rows; ++i) inv_cols(i, j) = col[i];
  }
  return transpose(block) * inv_cols;  // n x rows
}

}  // namespace

Projection projection_for_block(const DenseMatrix& block) {
  const std::size_t n = block.cols();
  if (block.rows() == 1) {
    double norm_sq = 0.0;
    for (std::size_t c = 0; c < n; ++c) norm_sq += block(0, c) * block(0, c);
    if (norm_sq == 0.0) {
      throw Error(ErrorCode::zero_row, "cannot project onto kernel of zero row");
    }
    DenseMatrix p = DenseMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        p(i, j) -= block(0, i) * block(0, j) / norm_sq;
      }
    }
    return Projection{std::move(p)};
  }
  const DenseMatrix r = restoring_map(block);  // A'(AA')^{-1}
  DenseMatrix p = DenseMatrix::identity(n) - r * block;
  return Projection{std::move(p)};
}

bool AgentState::all_finite() const {
  return std::all_of(x.begin(), x.end(),
                     [](const DenseVector& v) { return consflow::all_finite(v); });
}

Variant variant_from_string(const std::string& name) {
  if (name == "plain") return Variant::plain;
  if (name == "restoring") return Variant::restoring;
  if (name == "gains") return Variant::gains;
  throw Error(ErrorCode::bad_param, "unknown variant '" + name + "'");
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "euler") return Integrator::euler;
  if (name == "rk4") return Integrator::rk4;
  throw Error(ErrorCode::bad_param, "unknown integrator '" + name + "'");
}

InitMode init_from_string(const std::string& name) {
  if (name == "min-norm" || name == "min_norm") return InitMode::min_norm;
  if (name == "tangent-noise" || name == "tangent_noise") {
    return InitMode::tangent_noise;
  }
  if (name == "free-random" || name == "free_random") return InitMode::free_random;
  throw Error(ErrorCode::bad_param, "unknown init mode '" + name + "'");
}

const char* to_string(Variant v) noexcept {
  switch (v) {
    case Variant::plain: return "plain";
    case Variant::restoring: return "restoring";
    case Variant::gains: return "gains";
  }
  return "?";
}

const char* to_string(Integrator i) noexcept {
  switch (i) {
    case Integrator::euler: return "euler";
    case Integrator::rk4: return "rk4";
  }
  return "?";
}

const char* to_string(InitMode m) noexcept {
  switch (m) {
    case InitMode::min_norm: return "min-norm";
    case InitMode::tangent_noise: return "tangent-noise";
    case InitMode::free_random: return "free-random";
  }
  return "?";
}

FlowOperators::FlowOperators(const LinearSystem& system, const NetworkGraph& graph) {
  if (graph.vertex_count() != system.block_count()) {
    throw Error(ErrorCode::mismatched_topology,
                "graph has " + std::to_string(graph.vertex_count()) +
                    " vertices but system has " +
                    std::to_string(system.block_count()) + " row blocks");
  }
  projections_.reserve(system.block_count());
  restorers_.reserve(system.block_count());
  for (std::size_t i = 0; i < system.block_count(); ++i) {
    const DenseMatrix& blk = system.block(i).matrix;
    projections_.push_back(projection_for_block(blk));
    if (blk.rows() == 1) {
      // a/(a'a) as an n x 1 map.
      double norm_sq = 0.0;
      for (std::size_t c = 0; c < blk.cols(); ++c) norm_sq += blk(0, c) * blk(0, c);
      DenseMatrix r(blk.cols(), 1);
      for (std::size_t c = 0; c < blk.cols(); ++c) r(c, 0) = blk(0, c) / norm_sq;
      restorers_.push_back(std::move(r));
    } else {
      restorers_.push_back(restoring_map(blk));
    }
  }
}

namespace {

// Sum of (x_i - x_j) over neighbors j of i, ascending j.
DenseVector neighbor_sum(const AgentState& state, const NetworkGraph& g,
                         std::size_t i) {
  const std::size_t n = state.x[i].dim();
  DenseVector sum(n);
  for (std::size_t j : g.neighbors(i)) {
    for (std::size_t c = 0; c < n; ++c) sum[c] += state.x[i][c] - state.x[j][c];
  }
  return sum;
}

DenseVector block_residual(const AgentState& state, const LinearSystem& system,
                           std::size_t i, double rhs_offset) {
  const RowBlock& blk = system.block(i);
  DenseVector r = blk.matrix * state.x[i];
  for (std::size_t k = 0; k < r.dim(); ++k) r[k] -= blk.rhs[k] + rhs_offset;
  return r;
}

}  // namespace

std::vector<DenseVector> rhs_plain(const AgentState& state, const NetworkGraph& g,
                                   const FlowOperators& ops) {
  std::vector<DenseVector> derivs(state.agent_count());
  for (std::size_t i = 0; i < state.agent_count(); ++i) {
    derivs[i] = -1.0 * (ops.projection(i).matrix * neighbor_sum(state, g, i));
  }
  return derivs;
}

std::vector<DenseVector> rhs_restoring(const AgentState& state,
                                       const NetworkGraph& g,
                                       const FlowOperators& ops,
                                       const LinearSystem& system,
                                       double rhs_offset) {
  std::vector<DenseVector> derivs(state.agent_count());
  for (std::size_t i = 0; i < state.agent_count(); ++i) {
    DenseVector d = -1.0 * (ops.projection(i).matrix * neighbor_sum(state, g, i));
    const DenseVector pull =
        ops.restorer(i) * block_residual(state, system, i, rhs_offset);
    for (std::size_t c = 0; c < d.dim(); ++c) d[c] -= pull[c];
    derivs[i] = std::move(d);
  }
  return derivs;
}

std::vector<DenseVector> rhs_gains(const AgentState& state, const NetworkGraph& g,
                                   const FlowOperators& ops,
                                   const LinearSystem& system, double alpha,
                                   const std::vector<double>& alpha_i,
                                   double rhs_offset) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::bad_gain, "alpha must be positive");
  }
  if (alpha_i.size() != state.agent_count()) {
    throw Error(ErrorCode::bad_gain, "need one alpha_i per agent");
  }
  for (double a : alpha_i) {
    if (!(a > 0.0)) {
      throw Error(ErrorCode::bad_gain, "alpha_i must be positive");
    }
  }
  std::vector<DenseVector> derivs(state.agent_count());
  for (std::size_t i = 0; i < state.agent_count(); ++i) {
    DenseVector d = -alpha * (ops.projection(i).matrix * neighbor_sum(state, g, i));
    const DenseVector pull =
        ops.restorer(i) * block_residual(state, system, i, rhs_offset);
    for (std::size_t c = 0; c < d.dim(); ++c) d[c] -= alpha_i[i] * pull[c];
    derivs[i] = std::move(d);
  }
  return derivs;
}

AgentState initialize(const LinearSystem& system, const NetworkGraph& g,
                      const FlowConfig& config) {
  if (g.vertex_count() != system.block_count()) {
    throw Error(ErrorCode::mismatched_topology,
                "graph vertex count != system block count");
  }
  if (config.init == InitMode::free_random && config.variant == Variant::plain) {
    throw Error(ErrorCode::bad_param,
                "free-random init needs a restoring term (restoring/gains)");
  }
  const std::size_t n = system.unknown_dim();
  AgentState state;
  state.x.reserve(system.block_count());
  Rng rng(Rng::mix(config.seed, 0x696e6974));  // dedicated init stream
  for (std::size_t i = 0; i < system.block_count(); ++i) {
    DenseVector noise(n);
    if (config.init != InitMode::min_norm) {
      for (std::size_t c = 0; c < n; ++c) noise[c] = rng.uniform(-1.0, 1.0);
    }
    if (config.init == InitMode::free_random) {
      state.x.push_back(std::move(noise));
      continue;
    }
    const RowBlock& blk = system.block(i);
    DenseVector x0(n);
    if (blk.matrix.rows() == 1) {
      double norm_sq = 0.0;
      for (std::size_t c = 0; c < n; ++c) norm_sq += blk.matrix(0, c) * blk.matrix(0, c);
      for (std::size_t c = 0; c < n; ++c) {
        x0[c] = blk.rhs[0] * blk.matrix(0, c) / norm_sq;
      }
    } else {
      x0 = restoring_map(blk.matrix) * blk.rhs;
    }
    if (config.init == InitMode::tangent_noise) {
      const Projection p = projection_for_block(blk.matrix);
      const DenseVector tangent = p.matrix * noise;
      for (std::size_t c = 0; c < n; ++c) x0[c] += tangent[c];
    }
    state.x.push_back(std::move(x0));
  }
  return state;
}

double auto_step(const NetworkGraph& g, Variant variant) {
  const double c = variant == Variant::plain ? 0.5 : 1.0;
  return 1.0 / (2.0 * static_cast<double>(g.max_degree()) + c);
}

namespace {

AgentState axpy_state(const AgentState& state, double h,
                      const std::vector<DenseVector>& derivs) {
  AgentState out;
  out.x.reserve(state.agent_count());
  for (std::size_t i = 0; i < state.agent_count(); ++i) {
    DenseVector v = state.x[i];
    for (std::size_t c = 0; c < v.dim(); ++c) v[c] += h * derivs[i][c];
    out.x.push_back(std::move(v));
  }
  return out;
}

}  // namespace

AgentState step(const AgentState& state, double t, double h,
                Integrator integrator, const RhsFunction& rhs) {
  if (!(h > 0.0)) {
    throw Error(ErrorCode::bad_param, "step size must be positive");
  }
  AgentState next;
  if (integrator == Integrator::euler) {
    next = axpy_state(state, h, rhs(state, t));
  } else {
    const auto k1 = rhs(state, t);
    const auto k2 = rhs(axpy_state(state, 0.5 * h, k1), t + 0.5 * h);
    const auto k3 = rhs(axpy_state(state, 0.5 * h, k2), t + 0.5 * h);
    const auto k4 = rhs(axpy_state(state, h, k3), t + h);
    next.x.reserve(state.agent_count());
    for (std::size_t i = 0; i < state.agent_count(); ++i) {
      DenseVector v = state.x[i];
      for (std::size_t c = 0; c < v.dim(); ++c) {
        v[c] += (h / 6.0) * (k1[i][c] + 2.0 * k2[i][c] + 2.0 * k3[i][c] + k4[i][c]);
      }
      next.x.push_back(std::move(v));
    }
  }
  if (!next.all_finite()) {
    throw Error(ErrorCode::non_finite,
                "state left the finite range (step size too large?)");
  }
  return next;
}

double consensus_cost(const AgentState& state, const NetworkGraph& g) {
  double v = 0.0;
  for (auto [i, j] : g.edges()) {
    double sq = 0.0;
    for (std::size_t c = 0; c < state.x[i].dim(); ++c) {
      const double d = state.x[i][c] - state.x[j][c];
      sq += d * d;
    }
    v += sq;
  }
  return 0.5 * v;
}

double consensus_spread(const AgentState& state, const NetworkGraph& g) {
  double spread = 0.0;
  for (auto [i, j] : g.edges()) {
    for (std::size_t c = 0; c < state.x[i].dim(); ++c) {
      spread = std::max(spread, std::abs(state.x[i][c] - state.x[j][c]));
    }
  }
  return spread;
}

double manifold_residual(const AgentState& state, const LinearSystem& system,
                         double rhs_offset) {
  double r = 0.0;
  for (std::size_t i = 0; i < system.block_count(); ++i) {
    r = std::max(r, max_abs(block_residual(state, system, i, rhs_offset)));
  }
  return r;
}

}  // namespace consflow
