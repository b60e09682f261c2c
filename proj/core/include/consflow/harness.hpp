#pragma once

#include <optional>
#include <string>
#include <vector>

#include "consflow/flow.hpp"
#include "consflow/graph.hpp"
#include "consflow/spectral.hpp"

namespace consflow {

struct TraceRow {
  std::size_t step = 0;
  double t = 0.0;
  double cost_v = 0.0;
  double spread = 0.0;
  double residual = 0.0;
  /// Distance to the oracle solution (tracking runs: to the instantaneous
  /// oracle); present only when a square full-rank system provides one.
  std::optional<double> oracle_dist;
};

struct RateFit {
  double fitted_rate = 0.0;
  std::size_t window_begin = 0;  // recorded-row indices used by the fit
  std::size_t window_end = 0;    // exclusive
  double r_squared = 0.0;
};

struct SimulationTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  std::size_t steps_used = 0;
  double step_size = 0.0;
  double t_final = 0.0;
  DenseVector consensus_value;           // mean of agent states at the end
  std::optional<DenseVector> oracle;     // direct_solve solution when square
  std::optional<RateFit> rate;
  /// Plain variant only: tightest bounds observed over every step taken
  /// (not just recorded rows).
  double max_manifold_residual = 0.0;
  double max_cost_increase = 0.0;
  std::optional<double> steady_state_lag;  // tracking runs only
  std::vector<std::string> warnings;
};

/// Integrate the configured flow until max(spread, residual) falls to
/// convergence_tol or max_steps is hit (soft failure: converged=false).
/// Deterministic: identical inputs give bit-identical traces.
SimulationTrace run(const LinearSystem& system, const NetworkGraph& g,
                    const FlowConfig& config);

/// Least-squares slope of log(oracle distance) against t over the tail of
/// the trace; the window drops the first 20% of steps and any points at
/// the roundoff floor. Needs >= 30 usable points.
RateFit fit_rate(const SimulationTrace& trace);

/// Sinusoidal right-hand-side drift b_i(t) = b_i + amplitude*sin(omega*t),
/// optionally frozen at a fixed time (after which b stays at its frozen
/// value and the run can converge).
struct DriftSpec {
  double amplitude = 0.0;
  double omega = 0.0;
  std::optional<double> freeze_time;
};

/// Run the restoring flow against a moving target. Rows' oracle_dist is
/// the lag to the instantaneous solution x*(t); steady_state_lag is the
/// max lag over the last 30% of recorded rows. Square systems only.
SimulationTrace track_varying_b(const LinearSystem& system, const NetworkGraph& g,
                                const FlowConfig& config, const DriftSpec& drift);

struct SweepEntry {
  Topology topology = Topology::path;
  std::size_t n = 2;
  std::uint64_t seed = 0;
  Variant variant = Variant::plain;
};

struct SweepRow {
  SweepEntry entry;
  std::optional<GraphReport> graph;
  std::optional<SpectralReport> spectral;
  std::optional<RateFit> rate;
  /// Set when the fitted rate lands above 1.1*rho: the initialization did
  /// not excite the slow mode, so the fit does not witness rho.
  bool nongeneric_rate = false;
  std::string error;  // per-entry failures are collected, not fatal
};

/// Analysis + simulation per entry on a seeded random square system over
/// the entry's topology. Output order follows input order.
std::vector<SweepRow> sweep(const std::vector<SweepEntry>& entries);

}  // namespace consflow
