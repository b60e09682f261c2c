#include "consflow/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "consflow/errors.hpp"

namespace consflow {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot open '" + path + "' for writing");
  }
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open '" + path + "' for reading");
  }
  return in;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(const std::string& token, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse_error,
                std::string("bad ") + what + " '" + token + "'");
  }
}

long long parse_int(const std::string& token, const char* what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse_error,
                std::string("bad ") + what + " '" + token + "'");
  }
}

void escape_json(std::ostream& out, const std::string& s) {
  out << '"';
  for (char c : s) {
    switch (c) {
      case '"': out << "\\\""; break;
      case '\\': out << "\\\\"; break;
      case '\n': out << "\\n"; break;
      case '\t': out << "\\t"; break;
      default: out << c;
    }
  }
  out << '"';
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix Market
// ---------------------------------------------------------------------------

DenseMatrix read_matrix_market(std::istream& in) {
  std::string banner;
  if (!std::getline(in, banner)) {
    throw Error(ErrorCode::parse_error, "empty matrix file");
  }
  std::istringstream header(banner);
  std::string tag, object, format, field, symmetry;
  header >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lowercase(object) != "matrix") {
    throw Error(ErrorCode::parse_error, "missing MatrixMarket banner");
  }
  format = lowercase(format);
  field = lowercase(field);
  symmetry = lowercase(symmetry);
  if (field != "real" || symmetry != "general") {
    throw Error(ErrorCode::parse_error,
                "only 'real general' matrices are supported");
  }
  if (format != "array" && format != "coordinate") {
    throw Error(ErrorCode::parse_error, "unknown format '" + format + "'");
  }

  // Remaining content with % comments stripped.
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '%') continue;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) {
      throw Error(ErrorCode::parse_error, "unexpected end of matrix data");
    }
    return tokens[pos++];
  };

  const long long rows = parse_int(next(), "row count");
  const long long cols = parse_int(next(), "column count");
  if (rows < 0 || cols < 0) {
    throw Error(ErrorCode::parse_error, "negative matrix dimension");
  }
  DenseMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));

  if (format == "array") {
    // Array format lists entries in column-major order.
    for (long long j = 0; j < cols; ++j) {
      for (long long i = 0; i < rows; ++i) {
        m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
            parse_double(next(), "matrix entry");
      }
    }
  } else {
    const long long nnz = parse_int(next(), "entry count");
    std::vector<bool> seen(static_cast<std::size_t>(rows * cols), false);
    for (long long k = 0; k < nnz; ++k) {
      const long long i = parse_int(next(), "row index");
      const long long j = parse_int(next(), "column index");
      const double v = parse_double(next(), "matrix entry");
      if (i < 1 || i > rows || j < 1 || j > cols) {
        throw Error(ErrorCode::parse_error, "coordinate index out of range");
      }
      const std::size_t flat =
          static_cast<std::size_t>((i - 1) * cols + (j - 1));
      if (seen[flat]) {
        throw Error(ErrorCode::parse_error, "duplicate coordinate entry");
      }
      seen[flat] = true;
      m(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) = v;
    }
  }
  if (pos != tokens.size()) {
    throw Error(ErrorCode::parse_error, "trailing data in matrix file");
  }
  if (!all_finite(m)) {
    throw Error(ErrorCode::non_finite, "matrix file contains NaN/Inf");
  }
  return m;
}

DenseMatrix read_matrix_market_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_matrix_market(in);
  } catch (const Error& err) {
    throw Error(err.code(), path + ": " + err.what());
  }
}

void write_matrix_market(std::ostream& out, const DenseMatrix& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      out << format_double(m(i, j)) << "\n";
    }
  }
}

void write_matrix_market_file(const std::string& path, const DenseMatrix& m) {
  auto out = open_output(path);
  write_matrix_market(out, m);
}

// ---------------------------------------------------------------------------
// Right-hand side
// ---------------------------------------------------------------------------

DenseVector read_rhs(std::istream& in) {
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) values.push_back(parse_double(tok, "rhs entry"));
  }
  return DenseVector(std::move(values));
}

DenseVector read_rhs_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_rhs(in);
  } catch (const Error& err) {
    throw Error(err.code(), path + ": " + err.what());
  }
}

void write_rhs(std::ostream& out, const DenseVector& v) {
  for (std::size_t i = 0; i < v.dim(); ++i) out << format_double(v[i]) << "\n";
}

void write_rhs_file(const std::string& path, const DenseVector& v) {
  auto out = open_output(path);
  write_rhs(out, v);
}

// ---------------------------------------------------------------------------
// Edge list
// ---------------------------------------------------------------------------

NetworkGraph read_edge_list(std::istream& in) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t max_vertex = 0;
  bool any_edge = false;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string ta, tb;
    if (!(ls >> ta)) continue;
    if (!(ls >> tb)) {
      throw Error(ErrorCode::parse_error, "edge line needs two endpoints");
    }
    std::string extra;
    if (ls >> extra) {
      throw Error(ErrorCode::parse_error, "edge line has trailing data");
    }
    const long long a = parse_int(ta, "vertex index");
    const long long b = parse_int(tb, "vertex index");
    if (a < 0 || b < 0) {
      throw Error(ErrorCode::parse_error, "negative vertex index");
    }
    edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    max_vertex = std::max({max_vertex, static_cast<std::size_t>(a),
                           static_cast<std::size_t>(b)});
    any_edge = true;
  }
  // An empty edge list is the single-vertex graph; otherwise the vertex set
  // is 0..max endpoint.
  const std::size_t vertex_count = any_edge ? max_vertex + 1 : 1;
  try {
    return NetworkGraph(vertex_count, std::move(edges));
  } catch (const Error& err) {
    throw Error(ErrorCode::parse_error, err.what());
  }
}

NetworkGraph read_edge_list_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_edge_list(in);
  } catch (const Error& err) {
    throw Error(err.code(), path + ": " + err.what());
  }
}

void write_edge_list(std::ostream& out, const NetworkGraph& g) {
  for (auto [a, b] : g.edges()) out << a << " " << b << "\n";
}

void write_edge_list_file(const std::string& path, const NetworkGraph& g) {
  auto out = open_output(path);
  write_edge_list(out, g);
}

// ---------------------------------------------------------------------------
// Trace and report documents
// ---------------------------------------------------------------------------

void write_trace(std::ostream& out, const SimulationTrace& trace) {
  for (const TraceRow& row : trace.rows) {
    out << "{\"step\":" << row.step << ",\"t\":" << format_double(row.t)
        << ",\"cost_v\":" << format_double(row.cost_v)
        << ",\"spread\":" << format_double(row.spread)
        << ",\"residual\":" << format_double(row.residual);
    if (row.oracle_dist) {
      out << ",\"oracle_dist\":" << format_double(*row.oracle_dist);
    }
    out << "}\n";
  }
}

void write_trace_file(const std::string& path, const SimulationTrace& trace) {
  auto out = open_output(path);
  write_trace(out, trace);
}

void write_run_summary(std::ostream& out, const SimulationTrace& trace,
                       const FlowConfig& config) {
  const TraceRow& last = trace.rows.back();
  out << "{\n";
  out << "  \"variant\": \"" << to_string(config.variant) << "\",\n";
  out << "  \"integrator\": \"" << to_string(config.integrator) << "\",\n";
  out << "  \"init\": \"" << to_string(config.init) << "\",\n";
  out << "  \"seed\": " << config.seed << ",\n";
  out << "  \"step_size\": " << format_double(trace.step_size) << ",\n";
  out << "  \"convergence_tol\": " << format_double(config.convergence_tol)
      << ",\n";
  out << "  \"converged\": " << (trace.converged ? "true" : "false") << ",\n";
  out << "  \"steps\": " << trace.steps_used << ",\n";
  out << "  \"t_final\": " << format_double(trace.t_final) << ",\n";
  out << "  \"cost_v\": " << format_double(last.cost_v) << ",\n";
  out << "  \"spread\": " << format_double(last.spread) << ",\n";
  out << "  \"residual\": " << format_double(last.residual) << ",\n";
  out << "  \"max_manifold_residual\": "
      << format_double(trace.max_manifold_residual) << ",\n";
  if (last.oracle_dist) {
    out << "  \"oracle_dist\": " << format_double(*last.oracle_dist) << ",\n";
  }
  if (trace.rate) {
    out << "  \"fitted_rate\": " << format_double(trace.rate->fitted_rate)
        << ",\n";
    out << "  \"rate_window_begin\": " << trace.rate->window_begin << ",\n";
    out << "  \"rate_window_end\": " << trace.rate->window_end << ",\n";
    out << "  \"r_squared\": " << format_double(trace.rate->r_squared) << ",\n";
  }
  if (trace.steady_state_lag) {
    out << "  \"steady_state_lag\": " << format_double(*trace.steady_state_lag)
        << ",\n";
  }
  out << "  \"warnings\": [";
  for (std::size_t i = 0; i < trace.warnings.size(); ++i) {
    if (i > 0) out << ", ";
    escape_json(out, trace.warnings[i]);
  }
  out << "],\n";
  out << "  \"solution\": [";
  for (std::size_t i = 0; i < trace.consensus_value.dim(); ++i) {
    if (i > 0) out << ", ";
    out << format_double(trace.consensus_value[i]);
  }
  out << "]\n";
  out << "}\n";
}

void write_run_summary_file(const std::string& path, const SimulationTrace& trace,
                            const FlowConfig& config) {
  auto out = open_output(path);
  write_run_summary(out, trace, config);
}

void write_analysis_report(std::ostream& out, const SpectralReport& spectral,
                           const GraphReport& graph) {
  out << "{\n";
  out << "  \"connected\": " << (graph.connected ? "true" : "false") << ",\n";
  if (graph.diameter) out << "  \"diameter\": " << *graph.diameter << ",\n";
  if (graph.lambda2) {
    out << "  \"lambda2\": " << format_double(*graph.lambda2) << ",\n";
    out << "  \"lambda2_lower_bound\": " << format_double(*graph.lower_bound)
        << ",\n";
    out << "  \"lambda2_upper_bound\": " << format_double(*graph.upper_bound)
        << ",\n";
    out << "  \"paper_upper_bound\": " << format_double(*graph.paper_upper_bound)
        << ",\n";
  }
  out << "  \"rho\": " << format_double(spectral.rho) << ",\n";
  out << "  \"rho_qbar\": " << format_double(spectral.rho_qbar) << ",\n";
  out << "  \"theorem2_holds\": " << (spectral.theorem2_holds ? "true" : "false")
      << ",\n";
  if (spectral.lemma1_min_eigenvalue) {
    out << "  \"lemma1_min_eigenvalue\": "
        << format_double(*spectral.lemma1_min_eigenvalue) << ",\n";
    out << "  \"lemma1_max_imag\": " << format_double(*spectral.lemma1_max_imag)
        << ",\n";
  }
  out << "  \"equilibrium_dim\": " << spectral.equilibrium_dim << "\n";
  out << "}\n";
}

void write_analysis_report_file(const std::string& path,
                                const SpectralReport& spectral,
                                const GraphReport& graph) {
  auto out = open_output(path);
  write_analysis_report(out, spectral, graph);
}

void write_sweep_rows(std::ostream& out, const std::vector<SweepRow>& rows) {
  for (const SweepRow& row : rows) {
    out << "{\"topology\":\"" << to_string(row.entry.topology) << "\""
        << ",\"n\":" << row.entry.n << ",\"seed\":" << row.entry.seed
        << ",\"variant\":\"" << to_string(row.entry.variant) << "\"";
    if (row.graph && row.graph->lambda2) {
      out << ",\"diameter\":" << *row.graph->diameter
          << ",\"lambda2\":" << format_double(*row.graph->lambda2)
          << ",\"lambda2_lower_bound\":" << format_double(*row.graph->lower_bound)
          << ",\"lambda2_upper_bound\":" << format_double(*row.graph->upper_bound);
    }
    if (row.spectral) {
      out << ",\"rho\":" << format_double(row.spectral->rho)
          << ",\"rho_qbar\":" << format_double(row.spectral->rho_qbar)
          << ",\"theorem2_holds\":"
          << (row.spectral->theorem2_holds ? "true" : "false")
          << ",\"equilibrium_dim\":" << row.spectral->equilibrium_dim;
    }
    if (row.rate) {
      out << ",\"fitted_rate\":" << format_double(row.rate->fitted_rate)
          << ",\"r_squared\":" << format_double(row.rate->r_squared)
          << ",\"nongeneric_rate\":" << (row.nongeneric_rate ? "true" : "false");
    }
    if (!row.error.empty()) {
      out << ",\"error\":";
      std::ostringstream tmp;
      escape_json(tmp, row.error);
      out << tmp.str();
    }
    out << "}\n";
  }
}

void write_sweep_rows_file(const std::string& path,
                           const std::vector<SweepRow>& rows) {
  auto out = open_output(path);
  write_sweep_rows(out, rows);
}

}  // namespace consflow
