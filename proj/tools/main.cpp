// consflow: simulate and analyze networks of agents that cooperatively
// solve Ax=b by a projected consensus flow.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "consflow/errors.hpp"
#include "consflow/harness.hpp"
#include "consflow/instances.hpp"
#include "consflow/io.hpp"

namespace {

using namespace consflow;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct SolveOptions {
  std::string matrix_path;
  std::string rhs_path;
  std::string graph_path;
  std::string variant = "plain";
  double alpha = 1.0;
  std::string alpha_i;  // comma list
  std::string integrator = "euler";
  std::string step = "auto";
  double tol = 1e-8;
  std::size_t max_steps = 2'000'000;
  std::uint64_t seed = 0;
  std::string init = "min-norm";
  std::string trace_path;
  std::string summary_path;
  std::size_t record_every = 10;
  std::string block_sizes;  // comma list, optional
};

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::bad_param, "bad number '" + item + "' in list");
    }
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& csv) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(csv)) {
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw Error(ErrorCode::bad_param, "expected nonnegative integers in list");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

FlowConfig make_config(const SolveOptions& opt) {
  FlowConfig config;
  config.variant = variant_from_string(opt.variant);
  config.alpha = opt.alpha;
  if (!opt.alpha_i.empty()) config.alpha_i = parse_double_list(opt.alpha_i);
  config.integrator = integrator_from_string(opt.integrator);
  if (opt.step != "auto") {
    try {
      config.step = std::stod(opt.step);
    } catch (const std::exception&) {
      throw Error(ErrorCode::bad_param, "--step expects a number or 'auto'");
    }
  }
  config.max_steps = opt.max_steps;
  config.convergence_tol = opt.tol;
  config.seed = opt.seed;
  config.init = init_from_string(opt.init);
  config.record_every = opt.record_every;
  return config;
}

// Fail-fast: all referenced files must exist and parse before any
// computation starts.
struct LoadedInputs {
  LinearSystem system;
  NetworkGraph graph;
};

LoadedInputs load_inputs(const SolveOptions& opt) {
  const DenseMatrix a = read_matrix_market_file(opt.matrix_path);
  const DenseVector b = read_rhs_file(opt.rhs_path);
  NetworkGraph g = read_edge_list_file(opt.graph_path);
  LinearSystem system =
      opt.block_sizes.empty()
          ? LinearSystem::from_rows(a, b)
          : LinearSystem::from_blocks(a, b, parse_size_list(opt.block_sizes));
  return {std::move(system), std::move(g)};
}

void add_solve_flags(CLI::App* cmd, SolveOptions& opt) {
  cmd->add_option("--matrix", opt.matrix_path, "Matrix Market file")->required();
  cmd->add_option("--rhs", opt.rhs_path, "right-hand side, one decimal per line")
      ->required();
  cmd->add_option("--graph", opt.graph_path, "edge-list file")->required();
  cmd->add_option("--variant", opt.variant, "plain|restoring|gains");
  cmd->add_option("--alpha", opt.alpha, "coupling gain (gains variant)");
  cmd->add_option("--alpha-i", opt.alpha_i,
                  "comma list of per-agent restoring gains (gains variant)");
  cmd->add_option("--integrator", opt.integrator, "euler|rk4");
  cmd->add_option("--step", opt.step, "step size or 'auto'");
  cmd->add_option("--tol", opt.tol, "convergence tolerance");
  cmd->add_option("--max-steps", opt.max_steps, "step budget");
  cmd->add_option("--seed", opt.seed, "random seed");
  cmd->add_option("--init", opt.init, "min-norm|tangent-noise|free-random");
  cmd->add_option("--trace", opt.trace_path, "write per-step records here");
  cmd->add_option("--summary", opt.summary_path, "write the run summary here");
  cmd->add_option("--record-every", opt.record_every, "record every K steps");
  cmd->add_option("--block-sizes", opt.block_sizes,
                  "comma list grouping matrix rows into agent blocks");
}

void print_solution(const SimulationTrace& trace) {
  std::ostringstream line;
  line << "solution:";
  for (std::size_t i = 0; i < trace.consensus_value.dim(); ++i) {
    line << " " << format_double(trace.consensus_value[i]);
  }
  std::cout << line.str() << "\n";
}

void emit_outputs(const SolveOptions& opt, const SimulationTrace& trace,
                  const FlowConfig& config) {
  for (const std::string& w : trace.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  if (!opt.trace_path.empty()) write_trace_file(opt.trace_path, trace);
  if (!opt.summary_path.empty()) {
    write_run_summary_file(opt.summary_path, trace, config);
  }
  print_solution(trace);
}

int cmd_solve(const SolveOptions& opt) {
  const FlowConfig config = make_config(opt);
  const LoadedInputs inputs = load_inputs(opt);
  const SimulationTrace trace = run(inputs.system, inputs.graph, config);
  emit_outputs(opt, trace, config);
  if (!trace.converged) {
    std::cerr << "not converged after " << trace.steps_used << " steps\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_track(const SolveOptions& opt, double amplitude, double omega,
              double freeze) {
  const FlowConfig config = make_config(opt);
  const LoadedInputs inputs = load_inputs(opt);
  DriftSpec drift;
  drift.amplitude = amplitude;
  drift.omega = omega;
  if (freeze >= 0.0) drift.freeze_time = freeze;
  const SimulationTrace trace =
      track_varying_b(inputs.system, inputs.graph, config, drift);
  emit_outputs(opt, trace, config);
  return kExitOk;
}

int cmd_analyze(const std::string& matrix_path, const std::string& graph_path,
                const std::string& block_sizes, const std::string& summary_path) {
  const DenseMatrix a = read_matrix_market_file(matrix_path);
  const NetworkGraph g = read_edge_list_file(graph_path);
  // Analysis needs no right-hand side; pair the matrix with zeros.
  const DenseVector b(a.rows());
  const LinearSystem system =
      block_sizes.empty()
          ? LinearSystem::from_rows(a, b)
          : LinearSystem::from_blocks(a, b, parse_size_list(block_sizes));

  const GraphReport graph = graph_report(g);
  const SpectralReport spectral = spectral_report(system, g);
  if (summary_path.empty()) {
    write_analysis_report(std::cout, spectral, graph);
  } else {
    write_analysis_report_file(summary_path, spectral, graph);
  }
  return kExitOk;
}

int cmd_graph_gen(const std::string& topology, std::size_t n, std::uint64_t seed,
                  double edge_prob, const std::string& out_path) {
  const NetworkGraph g =
      generate(topology_from_string(topology), n, seed, edge_prob);
  if (out_path.empty()) {
    write_edge_list(std::cout, g);
  } else {
    write_edge_list_file(out_path, g);
  }
  return kExitOk;
}

int cmd_sweep(const std::string& topologies, const std::string& sizes,
              const std::string& seeds, const std::string& variant,
              const std::string& out_path) {
  std::vector<SweepEntry> entries;
  const Variant var = variant_from_string(variant);
  std::istringstream topo_in(topologies);
  std::string topo;
  while (std::getline(topo_in, topo, ',')) {
    if (topo.empty()) continue;
    const Topology t = topology_from_string(topo);
    for (std::size_t n : parse_size_list(sizes)) {
      for (std::size_t s : parse_size_list(seeds)) {
        entries.push_back({t, n, static_cast<std::uint64_t>(s), var});
      }
    }
  }
  const auto rows = sweep(entries);
  if (out_path.empty()) {
    write_sweep_rows(std::cout, rows);
  } else {
    write_sweep_rows_file(out_path, rows);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"network consensus solver for Ax=b"};
  app.require_subcommand(1);
  // Flags may be preloaded from an INI file with one section per
  // subcommand ([solve], [track], ...); command-line values take
  // precedence. The --config flag goes before the subcommand.
  app.set_config("--config", "", "read flag defaults from an INI file");

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand("solve", "integrate the flow to consensus");
  add_solve_flags(solve, solve_opt);

  SolveOptions track_opt;
  double drift_amplitude = 0.0;
  double drift_omega = 0.0;
  double drift_freeze = -1.0;
  CLI::App* track =
      app.add_subcommand("track", "follow a sinusoidally drifting rhs");
  add_solve_flags(track, track_opt);
  track->add_option("--drift-amplitude", drift_amplitude, "sinusoid amplitude");
  track->add_option("--drift-omega", drift_omega, "sinusoid angular frequency");
  track->add_option("--drift-freeze", drift_freeze,
                    "freeze b at this time (negative: never)");

  std::string an_matrix, an_graph, an_blocks, an_summary;
  CLI::App* analyze =
      app.add_subcommand("analyze", "spectral and graph reports for an instance");
  analyze->add_option("--matrix", an_matrix, "Matrix Market file")->required();
  analyze->add_option("--graph", an_graph, "edge-list file")->required();
  analyze->add_option("--block-sizes", an_blocks, "comma list of agent block sizes");
  analyze->add_option("--summary", an_summary, "write the report here");

  CLI::App* graph = app.add_subcommand("graph", "graph utilities");
  graph->require_subcommand(1);
  std::string gen_topology = "path";
  std::size_t gen_n = 2;
  std::uint64_t gen_seed = 0;
  double gen_edge_prob = 0.3;
  std::string gen_out;
  CLI::App* gen = graph->add_subcommand("gen", "write a generated topology");
  gen->add_option("--topology", gen_topology,
                  "path|cycle|complete|star|random_connected");
  gen->add_option("--n", gen_n, "vertex count")->required();
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--edge-prob", gen_edge_prob,
                  "extra-edge probability for random_connected");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  std::string sw_topologies = "path,cycle,star,complete,random_connected";
  std::string sw_sizes = "3,4,5";
  std::string sw_seeds = "1,2,3";
  std::string sw_variant = "plain";
  std::string sw_out;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "batch analysis over topologies and sizes");
  sweep_cmd->add_option("--topologies", sw_topologies, "comma list");
  sweep_cmd->add_option("--sizes", sw_sizes, "comma list of agent counts");
  sweep_cmd->add_option("--seeds", sw_seeds, "comma list of seeds");
  sweep_cmd->add_option("--variant", sw_variant, "plain|restoring|gains");
  sweep_cmd->add_option("--out", sw_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Exit-code contract: 0 ok, 1 any error, 2 not converged. --help lands
    // here too and must stay 0.
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_opt);
    if (track->parsed()) {
      return cmd_track(track_opt, drift_amplitude, drift_omega, drift_freeze);
    }
    if (analyze->parsed()) {
      return cmd_analyze(an_matrix, an_graph, an_blocks, an_summary);
    }
    if (graph->parsed() && gen->parsed()) {
      return cmd_graph_gen(gen_topology, gen_n, gen_seed, gen_edge_prob, gen_out);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sw_topologies, sw_sizes, sw_seeds, sw_variant, sw_out);
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  }
  std::cerr << "error: no subcommand\n";
  return kExitError;
}
