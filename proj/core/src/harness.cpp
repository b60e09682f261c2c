#include "consflow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "consflow/errors.hpp"
#include "consflow/instances.hpp"
#include "consflow/tolerances.hpp"

namespace consflow {

namespace {

struct Setup {
  FlowOperators ops;
  std::optional<DenseVector> oracle;
  std::vector<std::string> warnings;
};

Setup prepare(const LinearSystem& system, const NetworkGraph& g) {
  if (!is_connected(g)) {
    throw Error(ErrorCode::disconnected, "run needs a connected graph");
  }
  Setup setup{FlowOperators(system, g), std::nullopt, {}};

  const DenseMatrix stacked = system.stacked_matrix();
  const std::size_t stacked_rank = rank(stacked);
  if (system.square()) {
    if (stacked_rank == system.unknown_dim()) {
      setup.oracle = direct_solve(stacked, system.stacked_rhs());
    } else {
      setup.warnings.push_back(
          "square system is singular; oracle comparison skipped");
    }
  } else if (stacked_rank < system.total_rows()) {
    setup.warnings.push_back(
        "stacked matrix is not full row rank; convergence not guaranteed");
  }
  return setup;
}

double oracle_distance(const AgentState& state, const DenseVector& oracle) {
  double d = 0.0;
  for (const DenseVector& x : state.x) {
    for (std::size_t c = 0; c < x.dim(); ++c) {
      d = std::max(d, std::abs(x[c] - oracle[c]));
    }
  }
  return d;
}

DenseVector mean_state(const AgentState& state) {
  const std::size_t n = state.x.front().dim();
  DenseVector mean(n);
  for (const DenseVector& x : state.x) {
    for (std::size_t c = 0; c < n; ++c) mean[c] += x[c];
  }
  const double inv = 1.0 / static_cast<double>(state.agent_count());
  for (std::size_t c = 0; c < n; ++c) mean[c] *= inv;
  return mean;
}

std::vector<double> gains_or_default(const FlowConfig& config, std::size_t agents) {
  if (!config.alpha_i.empty()) return config.alpha_i;
  return std::vector<double>(agents, 1.0);
}

RhsFunction make_rhs(const LinearSystem& system, const NetworkGraph& g,
                     const FlowOperators& ops, const FlowConfig& config) {
  switch (config.variant) {
    case Variant::plain:
      return [&g, &ops](const AgentState& s, double) {
        return rhs_plain(s, g, ops);
      };
    case Variant::restoring:
      return [&g, &ops, &system](const AgentState& s, double) {
        return rhs_restoring(s, g, ops, system);
      };
    case Variant::gains: {
      auto alpha_i = gains_or_default(config, system.block_count());
      const double alpha = config.alpha;
      return [&g, &ops, &system, alpha, alpha_i](const AgentState& s, double) {
        return rhs_gains(s, g, ops, system, alpha, alpha_i);
      };
    }
  }
  throw Error(ErrorCode::bad_param, "unknown variant");
}

// Shared integration loop. `rhs_offset(t)` is the uniform shift applied to
// every right-hand-side entry at time t (identically zero for plain runs);
// `instant_oracle(t)` supplies the oracle a recorded row is measured
// against.
SimulationTrace integrate(const LinearSystem& system, const NetworkGraph& g,
                          const FlowConfig& config, const Setup& setup,
                          const RhsFunction& rhs,
                          const std::function<double(double)>& rhs_offset,
                          bool moving_oracle) {
  SimulationTrace trace;
  trace.warnings = setup.warnings;
  trace.oracle = setup.oracle;

  const double h = config.step ? *config.step : auto_step(g, config.variant);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::bad_param, "step size must be positive and finite");
  }
  trace.step_size = h;

  const std::size_t record_every = std::max<std::size_t>(config.record_every, 1);
  const bool plain = config.variant == Variant::plain;
  const DenseMatrix stacked = system.stacked_matrix();
  const DenseVector base_rhs = system.stacked_rhs();

  auto shifted_oracle = [&](double t) -> std::optional<DenseVector> {
    if (!setup.oracle) return std::nullopt;
    if (!moving_oracle) return setup.oracle;
    DenseVector b = base_rhs;
    const double offset = rhs_offset(t);
    for (std::size_t i = 0; i < b.dim(); ++i) b[i] += offset;
    return direct_solve(stacked, b);
  };

  AgentState state = initialize(system, g, config);

  auto record = [&](std::size_t k, double t, double v, double spread,
                    double residual) {
    TraceRow row;
    row.step = k;
    row.t = t;
    row.cost_v = v;
    row.spread = spread;
    row.residual = residual;
    if (const auto target = shifted_oracle(t)) {
      row.oracle_dist = oracle_distance(state, *target);
    }
    trace.rows.push_back(row);
  };

  double spread = consensus_spread(state, g);
  double residual = manifold_residual(state, system, rhs_offset(0.0));
  double cost = consensus_cost(state, g);
  double prev_cost = cost;
  trace.max_manifold_residual = residual;
  record(0, 0.0, cost, spread, residual);

  bool converged = std::max(spread, residual) <= config.convergence_tol;
  std::size_t k = 0;
  double t = 0.0;
  while (!converged && k < config.max_steps) {
    state = step(state, t, h, config.integrator, rhs);
    ++k;
    t = static_cast<double>(k) * h;

    spread = consensus_spread(state, g);
    residual = manifold_residual(state, system, rhs_offset(t));
    trace.max_manifold_residual = std::max(trace.max_manifold_residual, residual);
    converged = std::max(spread, residual) <= config.convergence_tol;

    const bool record_now = (k % record_every == 0) || converged || k == config.max_steps;
    if (plain || record_now) {
      cost = consensus_cost(state, g);
      if (plain) {
        trace.max_cost_increase = std::max(trace.max_cost_increase, cost - prev_cost);
        prev_cost = cost;
      }
    }
    if (record_now) record(k, t, cost, spread, residual);
  }

  trace.converged = converged;
  trace.steps_used = k;
  trace.t_final = t;
  trace.consensus_value = mean_state(state);
  if (plain && trace.max_manifold_residual > config.drift_tolerance) {
    trace.warnings.push_back("manifold drift exceeded the configured tolerance");
  }
  return trace;
}

void attach_rate_fit(SimulationTrace& trace) {
  try {
    trace.rate = fit_rate(trace);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::insufficient_data) throw;
  }
}

}  // namespace

SimulationTrace run(const LinearSystem& system, const NetworkGraph& g,
                    const FlowConfig& config) {
  const Setup setup = prepare(system, g);
  const RhsFunction rhs = make_rhs(system, g, setup.ops, config);
  SimulationTrace trace = integrate(system, g, config, setup, rhs,
                                    [](double) { return 0.0; },
                                    /*moving_oracle=*/false);
  attach_rate_fit(trace);
  return trace;
}

RateFit fit_rate(const SimulationTrace& trace) {
  std::vector<const TraceRow*> usable;
  for (const TraceRow& row : trace.rows) {
    if (row.oracle_dist && *row.oracle_dist > tol::rate_fit_floor) {
      usable.push_back(&row);
    }
  }
  if (usable.size() < 30) {
    throw Error(ErrorCode::insufficient_data,
                "rate fit needs >= 30 recorded points above the roundoff floor");
  }
  // Drop the transient: keep rows past 20% of the steps taken.
  const double cutoff =
      0.2 * static_cast<double>(std::max(trace.steps_used, trace.rows.back().step));
  std::vector<const TraceRow*> window;
  for (const TraceRow* row : usable) {
    if (static_cast<double>(row->step) >= cutoff) window.push_back(row);
  }
  if (window.size() < 2) {
    throw Error(ErrorCode::insufficient_data, "rate-fit window is empty");
  }

  const double count = static_cast<double>(window.size());
  double mean_t = 0.0, mean_y = 0.0;
  for (const TraceRow* row : window) {
    mean_t += row->t;
    mean_y += std::log(*row->oracle_dist);
  }
  mean_t /= count;
  mean_y /= count;
  double cov = 0.0, var_t = 0.0, var_y = 0.0;
  for (const TraceRow* row : window) {
    const double dt = row->t - mean_t;
    const double dy = std::log(*row->oracle_dist) - mean_y;
    cov += dt * dy;
    var_t += dt * dt;
    var_y += dy * dy;
  }
  if (var_t == 0.0) {
    throw Error(ErrorCode::insufficient_data, "rate-fit window has no time spread");
  }
  const double slope = cov / var_t;

  RateFit fit;
  fit.fitted_rate = -slope;
  fit.window_begin = window.front()->step;
  fit.window_end = window.back()->step;
  if (var_y == 0.0) {
    fit.r_squared = 1.0;  // constant data is fit exactly by a flat line
  } else {
    double ss_res = 0.0;
    const double intercept = mean_y - slope * mean_t;
    for (const TraceRow* row : window) {
      const double err = std::log(*row->oracle_dist) - (intercept + slope * row->t);
      ss_res += err * err;
    }
    fit.r_squared = 1.0 - ss_res / var_y;
  }
  return fit;
}

SimulationTrace track_varying_b(const LinearSystem& system, const NetworkGraph& g,
                                const FlowConfig& config, const DriftSpec& drift) {
  if (config.variant == Variant::plain) {
    throw Error(ErrorCode::bad_param,
                "manifolds move under drift; the plain variant cannot follow "
                "(use restoring or gains)");
  }
  const Setup setup = prepare(system, g);
  if (!setup.oracle) {
    throw Error(ErrorCode::rank_deficient,
                "tracking needs a square nonsingular system for the "
                "instantaneous oracle");
  }

  const double freeze = drift.freeze_time.value_or(
      std::numeric_limits<double>::infinity());
  auto offset = [amplitude = drift.amplitude, omega = drift.omega,
                 freeze](double t) {
    return amplitude * std::sin(omega * std::min(t, freeze));
  };

  const FlowOperators& ops = setup.ops;
  RhsFunction rhs;
  if (config.variant == Variant::restoring) {
    rhs = [&g, &ops, &system, offset](const AgentState& s, double t) {
      return rhs_restoring(s, g, ops, system, offset(t));
    };
  } else {
    auto alpha_i = gains_or_default(config, system.block_count());
    const double alpha = config.alpha;
    rhs = [&g, &ops, &system, alpha, alpha_i, offset](const AgentState& s, double t) {
      return rhs_gains(s, g, ops, system, alpha, alpha_i, offset(t));
    };
  }

  SimulationTrace trace =
      integrate(system, g, config, setup, rhs, offset, /*moving_oracle=*/true);

  const std::size_t tail_start =
      trace.rows.size() - std::max<std::size_t>(1, (trace.rows.size() * 3) / 10);
  double lag = 0.0;
  for (std::size_t i = tail_start; i < trace.rows.size(); ++i) {
    if (trace.rows[i].oracle_dist) lag = std::max(lag, *trace.rows[i].oracle_dist);
  }
  trace.steady_state_lag = lag;
  return trace;
}

std::vector<SweepRow> sweep(const std::vector<SweepEntry>& entries) {
  std::vector<SweepRow> rows;
  rows.reserve(entries.size());
  for (const SweepEntry& entry : entries) {
    SweepRow row;
    row.entry = entry;
    try {
      const NetworkGraph g = generate(entry.topology, entry.n, entry.seed);
      const LinearSystem system =
          to_system(random_square_instance(entry.n, entry.seed));
      row.graph = graph_report(g);
      row.spectral = spectral_report(system, g, /*include_lemma1=*/false);

      FlowConfig config;
      config.variant = entry.variant;
      config.integrator = Integrator::rk4;
      config.convergence_tol = 1e-10;
      config.record_every = 1;
      config.seed = entry.seed;
      // Keep the discretization bias on the slow mode negligible so the
      // fitted rate reflects the continuous-time one.
      config.step = std::min(auto_step(g, entry.variant),
                             0.2 / row.spectral->rho);
      const SimulationTrace trace = run(system, g, config);
      row.rate = trace.rate;
      if (row.rate) {
        row.nongeneric_rate =
            row.rate->fitted_rate > 1.1 * row.spectral->rho;
      } else {
        row.error = "no rate fit (insufficient data)";
      }
    } catch (const Error& err) {
      row.error = err.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace consflow
